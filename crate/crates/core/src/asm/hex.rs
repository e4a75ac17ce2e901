//! Intel HEX (record types 00 and 01 only).

use std::fmt::Write as _;

use thiserror::Error;

use super::image::ObjectImage;

pub const EOF_RECORD: &str = ":00000001FF";
const MAX_RECORD_DATA: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HexError {
    #[error("record {record}: checksum 0x{found:02X} does not match computed 0x{expected:02X}")]
    Checksum {
        record: usize,
        expected: u8,
        found: u8,
    },
    #[error("record {record}: unsupported record type 0x{kind:02X}")]
    RecordType { record: usize, kind: u8 },
    #[error("record {record}: {msg}")]
    Malformed { record: usize, msg: String },
    #[error("record {record}: address 0x{addr:04X} appears twice")]
    Duplicate { record: usize, addr: u16 },
    #[error("missing end-of-file record")]
    MissingEof,
}

fn checksum(bytes: &[u8]) -> u8 {
    bytes
        .iter()
        .fold(0u8, |s, &b| s.wrapping_add(b))
        .wrapping_neg()
}

fn record(addr: u16, kind: u8, data: &[u8]) -> String {
    let mut raw = vec![data.len() as u8, (addr >> 8) as u8, addr as u8, kind];
    raw.extend_from_slice(data);
    let mut line = String::with_capacity(11 + data.len() * 2);
    line.push(':');
    for b in &raw {
        let _ = write!(line, "{b:02X}");
    }
    let _ = write!(line, "{:02X}", checksum(&raw));
    line
}

/// Emits data records of at most 16 bytes in ascending address order, then
/// the EOF record. Every line ends with LF.
pub fn emit_hex(image: &ObjectImage) -> String {
    let mut out = String::new();
    for (start, data) in image.runs() {
        for (i, chunk) in data.chunks(MAX_RECORD_DATA).enumerate() {
            let addr = start.wrapping_add((i * MAX_RECORD_DATA) as u16);
            out.push_str(&record(addr, 0x00, chunk));
            out.push('\n');
        }
    }
    out.push_str(EOF_RECORD);
    out.push('\n');
    out
}

/// Parses Intel HEX text. Records are numbered from 1 in error messages;
/// blank lines are skipped and nothing may follow the EOF record.
pub fn parse_hex(text: &str) -> Result<ObjectImage, HexError> {
    let mut image = ObjectImage::new();
    let mut record_no = 0;
    let mut seen_eof = false;
    for line in text.lines() {
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        record_no += 1;
        let malformed = |msg: &str| HexError::Malformed {
            record: record_no,
            msg: msg.to_string(),
        };
        if seen_eof {
            return Err(malformed("data after end-of-file record"));
        }
        let body = line
            .strip_prefix(':')
            .ok_or_else(|| malformed("missing ':' start code"))?;
        if body.len() % 2 != 0 || body.len() < 10 {
            return Err(malformed("record has an odd or too short length"));
        }
        let raw = (0..body.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&body[i..i + 2], 16))
            .collect::<Result<Vec<u8>, _>>()
            .map_err(|_| malformed("non-hex digit"))?;
        let count = raw[0] as usize;
        if raw.len() != count + 5 {
            return Err(malformed("byte count does not match record length"));
        }
        let (payload, found) = raw.split_at(raw.len() - 1);
        let expected = checksum(payload);
        if expected != found[0] {
            return Err(HexError::Checksum {
                record: record_no,
                expected,
                found: found[0],
            });
        }
        let addr = u16::from_be_bytes([raw[1], raw[2]]);
        match raw[3] {
            0x00 => {
                for (i, &b) in raw[4..4 + count].iter().enumerate() {
                    let a = addr.wrapping_add(i as u16);
                    image.insert(a, b).map_err(|_| HexError::Duplicate {
                        record: record_no,
                        addr: a,
                    })?;
                }
            }
            0x01 => seen_eof = true,
            kind => {
                return Err(HexError::RecordType {
                    record: record_no,
                    kind,
                })
            }
        }
    }
    if !seen_eof {
        return Err(HexError::MissingEof);
    }
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_nop() {
        let img: ObjectImage = [(0u16, 0u8)].into_iter().collect();
        assert_eq!(emit_hex(&img), ":0100000000FF\n:00000001FF\n");
    }

    #[test]
    fn empty_image() {
        assert_eq!(emit_hex(&ObjectImage::new()), ":00000001FF\n");
    }

    #[test]
    fn seventeen_bytes_split() {
        let img: ObjectImage = (0..17u16).map(|a| (a, a as u8)).collect();
        let hex = emit_hex(&img);
        let lines: Vec<&str> = hex.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with(":10000000"));
        assert!(lines[1].starts_with(":01001000"));
    }

    #[test]
    fn bad_checksum() {
        let e = parse_hex(":0100000000FE\n:00000001FF\n").unwrap_err();
        assert_eq!(
            e,
            HexError::Checksum {
                record: 1,
                expected: 0xFF,
                found: 0xFE
            }
        );
    }

    #[test]
    fn missing_eof() {
        assert_eq!(parse_hex(":0100000000FF\n"), Err(HexError::MissingEof));
    }

    #[test]
    fn extended_address_records_rejected() {
        let e = parse_hex(":020000040000FA\n:00000001FF\n").unwrap_err();
        assert_eq!(e, HexError::RecordType { record: 1, kind: 4 });
    }

    #[test]
    fn round_trip_sparse() {
        let img: ObjectImage = [(0u16, 1u8), (1, 2), (0x0800, 3), (0x0FFF, 4)]
            .into_iter()
            .collect();
        assert_eq!(parse_hex(&emit_hex(&img)).unwrap(), img);
    }
}
