use thiserror::Error;

use crate::mcs51::isa;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    A,
    AB,
    C,
    Dptr,
    Pc,
    R(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directive {
    Org,
    Equ,
    Db,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// `NAME:` at any position; the colon is consumed.
    Label(String),
    /// Upper-cased mnemonic (includes the `CALL`/`JMP` aliases).
    Mnemonic(String),
    Directive(Directive),
    Register(Register),
    Ident(String),
    Number(u32),
    Str(Vec<u8>),
    Comma,
    Hash,
    At,
    Plus,
    Minus,
    Slash,
    Dot,
    Dollar,
    Newline,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn classify(word: &str) -> TokenKind {
    let upper = word.to_ascii_uppercase();
    match upper.as_str() {
        "A" => return TokenKind::Register(Register::A),
        "AB" => return TokenKind::Register(Register::AB),
        "C" => return TokenKind::Register(Register::C),
        "DPTR" => return TokenKind::Register(Register::Dptr),
        "PC" => return TokenKind::Register(Register::Pc),
        "ORG" => return TokenKind::Directive(Directive::Org),
        "EQU" => return TokenKind::Directive(Directive::Equ),
        "DB" => return TokenKind::Directive(Directive::Db),
        "END" => return TokenKind::Directive(Directive::End),
        "CALL" | "JMP" => return TokenKind::Mnemonic(upper),
        _ => {}
    }
    let b = upper.as_bytes();
    if b.len() == 2 && b[0] == b'R' && (b'0'..=b'7').contains(&b[1]) {
        return TokenKind::Register(Register::R(b[1] - b'0'));
    }
    if isa::is_mnemonic(&upper) {
        return TokenKind::Mnemonic(upper);
    }
    TokenKind::Ident(upper)
}

/// Parses `55h`, `0x55`, `85` and `01010101b` forms.
pub fn parse_number(text: &str) -> Option<u32> {
    let lower = text.to_ascii_lowercase();
    let (digits, radix) = if let Some(rest) = lower.strip_prefix("0x") {
        (rest, 16)
    } else if let Some(rest) = lower.strip_suffix('h') {
        (rest, 16)
    } else if let Some(rest) = lower.strip_suffix('b') {
        (rest, 2)
    } else {
        (lower.as_str(), 10)
    };
    if digits.is_empty() {
        return None;
    }
    u32::from_str_radix(digits, radix).ok()
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line_no = lineno + 1;
        if lineno > 0 {
            out.push(Token {
                kind: TokenKind::Newline,
                line: lineno,
                col: 0,
            });
        }
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let tok = |kind| Token {
                kind,
                line: line_no,
                col,
            };
            let err = |msg: String| LexError {
                line: line_no,
                col,
                msg,
            };
            match c {
                ' ' | '\t' | '\r' => i += 1,
                ';' => break,
                ',' => {
                    out.push(tok(TokenKind::Comma));
                    i += 1;
                }
                '#' => {
                    out.push(tok(TokenKind::Hash));
                    i += 1;
                }
                '@' => {
                    out.push(tok(TokenKind::At));
                    i += 1;
                }
                '+' => {
                    out.push(tok(TokenKind::Plus));
                    i += 1;
                }
                '-' => {
                    out.push(tok(TokenKind::Minus));
                    i += 1;
                }
                '/' => {
                    out.push(tok(TokenKind::Slash));
                    i += 1;
                }
                '.' => {
                    out.push(tok(TokenKind::Dot));
                    i += 1;
                }
                '$' => {
                    out.push(tok(TokenKind::Dollar));
                    i += 1;
                }
                '\'' | '"' => {
                    let end = chars[i + 1..]
                        .iter()
                        .position(|&x| x == c)
                        .ok_or_else(|| err("unterminated string".into()))?;
                    let s: String = chars[i + 1..i + 1 + end].iter().collect();
                    if !s.is_ascii() {
                        return Err(err("non-ASCII character in string".into()));
                    }
                    out.push(tok(TokenKind::Str(s.into_bytes())));
                    i += end + 2;
                }
                '0'..='9' => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                        i += 1;
                    }
                    let text: String = chars[start..i].iter().collect();
                    let value = parse_number(&text)
                        .ok_or_else(|| err(format!("malformed numeric literal `{text}`")))?;
                    out.push(tok(TokenKind::Number(value)));
                }
                c if c.is_ascii_alphabetic() || c == '_' || c == '?' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '?')
                    {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    if chars.get(i) == Some(&':') {
                        i += 1;
                        out.push(tok(TokenKind::Label(word.to_ascii_uppercase())));
                    } else {
                        out.push(tok(classify(&word)));
                    }
                }
                other => return Err(err(format!("illegal character `{other}`"))),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn instruction_with_comment() {
        assert_eq!(
            kinds("MOV A,#55h ; load"),
            vec![
                TokenKind::Mnemonic("MOV".into()),
                TokenKind::Register(Register::A),
                TokenKind::Comma,
                TokenKind::Hash,
                TokenKind::Number(0x55),
            ]
        );
    }

    #[test]
    fn label_and_branch() {
        assert_eq!(
            kinds("LOOP: DJNZ R2,LOOP"),
            vec![
                TokenKind::Label("LOOP".into()),
                TokenKind::Mnemonic("DJNZ".into()),
                TokenKind::Register(Register::R(2)),
                TokenKind::Comma,
                TokenKind::Ident("LOOP".into()),
            ]
        );
    }

    #[test]
    fn malformed_literal_position() {
        let e = tokenize("MOV A,#0xZZ").unwrap_err();
        assert_eq!((e.line, e.col), (1, 8));
        assert!(e.msg.contains("0xZZ"));
    }

    #[test]
    fn illegal_character() {
        let e = tokenize("NOP\n  mov a, %1").unwrap_err();
        assert_eq!((e.line, e.col), (2, 10));
    }

    #[test]
    fn literal_forms() {
        assert_eq!(parse_number("55h"), Some(0x55));
        assert_eq!(parse_number("0x55"), Some(0x55));
        assert_eq!(parse_number("85"), Some(85));
        assert_eq!(parse_number("01010101b"), Some(0x55));
        assert_eq!(parse_number("0B1h"), Some(0xB1));
        assert_eq!(parse_number("0FFH"), Some(0xFF));
        assert_eq!(parse_number("12b"), None);
        assert_eq!(parse_number("0x"), None);
    }

    #[test]
    fn case_insensitive() {
        assert_eq!(kinds("mov"), vec![TokenKind::Mnemonic("MOV".into())]);
        assert_eq!(kinds("dptr"), vec![TokenKind::Register(Register::Dptr)]);
    }
}
