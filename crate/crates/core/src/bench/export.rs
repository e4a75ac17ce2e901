//! CSV and VCD trace dumps, plus a VCD reader.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::sim::{Level, Logic, NetKind, SimTime, Trace, TraceSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceFormat {
    #[default]
    Csv,
    Vcd,
}

impl TraceFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TraceFormat::Csv => "csv",
            TraceFormat::Vcd => "vcd",
        }
    }

    pub fn render(self, traces: &TraceSet) -> String {
        match self {
            TraceFormat::Csv => to_csv(traces),
            TraceFormat::Vcd => to_vcd(traces),
        }
    }
}

impl FromStr for TraceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TraceFormat::Csv),
            "vcd" => Ok(TraceFormat::Vcd),
            other => Err(format!("unknown trace format `{other}` (csv or vcd)")),
        }
    }
}

fn value_text(level: Level) -> String {
    match level {
        Level::Digital(Logic::Low) => "0".into(),
        Level::Digital(Logic::High) => "1".into(),
        Level::Analog(v) => v.to_string(),
    }
}

/// Every change point, one row each, ordered by time and then by net.
fn rows(traces: &TraceSet) -> Vec<(SimTime, usize, Level)> {
    let mut rows: Vec<_> = traces
        .nets
        .iter()
        .enumerate()
        .flat_map(|(i, (_, _, t))| t.points().iter().map(move |&(at, l)| (at, i, l)))
        .collect();
    rows.sort_by_key(|&(at, i, _)| (at, i));
    rows
}

/// `time_ns,net,value` rows under a header. Logic levels print as 0/1.
pub fn to_csv(traces: &TraceSet) -> String {
    let mut out = String::from("time_ns,net,value\n");
    for (at, i, level) in rows(traces) {
        let _ = writeln!(
            out,
            "{},{},{}",
            at.ns(),
            traces.nets[i].0,
            value_text(level)
        );
    }
    out
}

/// Short VCD identifier for the n-th net: base-94 over `!`..=`~`.
fn vcd_id(mut n: usize) -> String {
    let mut id = String::new();
    loop {
        id.push((b'!' + (n % 94) as u8) as char);
        n /= 94;
        if n == 0 {
            return id;
        }
        n -= 1;
    }
}

/// Value change dump with a 1 ns timescale; analog nets are `real`.
pub fn to_vcd(traces: &TraceSet) -> String {
    let mut out = String::new();
    out.push_str("$version wiperbench $end\n$timescale 1ns $end\n$scope module bench $end\n");
    for (i, (name, kind, _)) in traces.nets.iter().enumerate() {
        let decl = match kind {
            NetKind::Digital => "wire 1",
            NetKind::Analog => "real 64",
        };
        let _ = writeln!(out, "$var {decl} {} {name} $end", vcd_id(i));
    }
    out.push_str("$upscope $end\n$enddefinitions $end\n");
    let mut current = None;
    for (at, i, level) in rows(traces) {
        if current != Some(at) {
            let _ = writeln!(out, "#{}", at.ns());
            current = Some(at);
        }
        let id = vcd_id(i);
        match level {
            Level::Digital(_) => {
                let _ = writeln!(out, "{}{id}", value_text(level));
            }
            Level::Analog(v) => {
                let _ = writeln!(out, "r{v} {id}");
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("VCD line {line}: {msg}")]
pub struct VcdError {
    pub line: usize,
    pub msg: String,
}

/// Reads the subset of VCD that [`to_vcd`] writes: `wire 1` and `real`
/// variables, `#time` stamps and scalar or real value changes.
pub fn parse_vcd(text: &str) -> Result<TraceSet, VcdError> {
    let mut set = TraceSet::default();
    let mut ids: Vec<String> = Vec::new();
    let mut in_header = true;
    let mut now: Option<SimTime> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| VcdError { line, msg };
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        if in_header {
            let words: Vec<&str> = content.split_whitespace().collect();
            match words.as_slice() {
                ["$var", ty, _, id, name, "$end"] => {
                    let kind = match *ty {
                        "wire" | "reg" => NetKind::Digital,
                        "real" => NetKind::Analog,
                        other => return Err(err(format!("unsupported variable type `{other}`"))),
                    };
                    if ids.iter().any(|x| x == id) {
                        return Err(err(format!("identifier `{id}` declared twice")));
                    }
                    ids.push(id.to_string());
                    set.nets.push((name.to_string(), kind, Trace::new()));
                }
                ["$enddefinitions", "$end"] => in_header = false,
                [first, ..] if first.starts_with('$') => {}
                _ => return Err(err(format!("unexpected header line `{content}`"))),
            }
            continue;
        }
        if let Some(t) = content.strip_prefix('#') {
            let t: u64 = t.parse().map_err(|_| err(format!("bad timestamp `{t}`")))?;
            if now.is_some_and(|n| SimTime(t) < n) {
                return Err(err("timestamps go backwards".into()));
            }
            now = Some(SimTime(t));
            continue;
        }
        let at = now.ok_or_else(|| err("value change before the first timestamp".into()))?;
        let (level, id) = if let Some(rest) = content.strip_prefix('r') {
            let (v, id) = rest
                .split_once(' ')
                .ok_or_else(|| err(format!("bad real change `{content}`")))?;
            let v: f64 = v.parse().map_err(|_| err(format!("bad real `{v}`")))?;
            (Level::Analog(v), id.trim())
        } else {
            let (v, id) = content.split_at(1);
            let l = match v {
                "0" => Logic::Low,
                "1" => Logic::High,
                _ => return Err(err(format!("unsupported value `{content}`"))),
            };
            (Level::Digital(l), id)
        };
        let idx = ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| err(format!("undeclared identifier `{id}`")))?;
        let (name, kind, trace) = &mut set.nets[idx];
        if level.kind() != *kind {
            return Err(err(format!("value kind does not match `{name}`")));
        }
        trace.record(at, level);
    }
    if in_header {
        return Err(VcdError {
            line: text.lines().count(),
            msg: "missing $enddefinitions".into(),
        });
    }
    Ok(set)
}

/// Writes `<dir>/<stem>.<ext>`, creating `dir` if needed.
pub fn write_traces(
    traces: &TraceSet,
    dir: &Path,
    stem: &str,
    format: TraceFormat,
) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    std::fs::write(&path, format.render(traces))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TraceSet {
        let mut pwm = Trace::new();
        pwm.record(SimTime::ZERO, Level::Digital(Logic::Low));
        pwm.record(SimTime::from_us(10), Level::Digital(Logic::High));
        pwm.record(SimTime::from_us(1010), Level::Digital(Logic::Low));
        let mut ao = Trace::new();
        ao.record(SimTime::ZERO, Level::Analog(4.95));
        ao.record(SimTime::from_us(10), Level::Analog(0.1 + 0.2));
        TraceSet {
            nets: vec![
                ("SERVO_PWM".into(), NetKind::Digital, pwm),
                ("AO".into(), NetKind::Analog, ao),
                ("EMPTY".into(), NetKind::Digital, Trace::new()),
            ],
        }
    }

    #[test]
    fn csv_rows_sorted() {
        assert_eq!(
            to_csv(&sample()),
            "time_ns,net,value\n0,SERVO_PWM,0\n0,AO,4.95\n10000,SERVO_PWM,1\n\
             10000,AO,0.30000000000000004\n1010000,SERVO_PWM,0\n"
        );
    }

    #[test]
    fn empty_set_is_header_only() {
        assert_eq!(to_csv(&TraceSet::default()), "time_ns,net,value\n");
    }

    #[test]
    fn vcd_round_trip() {
        let s = sample();
        assert_eq!(parse_vcd(&to_vcd(&s)).unwrap(), s);
    }

    #[test]
    fn ids_are_distinct() {
        let ids: std::collections::HashSet<String> = (0..20_000).map(vcd_id).collect();
        assert_eq!(ids.len(), 20_000);
        assert_eq!(vcd_id(0), "!");
        assert_eq!(vcd_id(93), "~");
    }

    #[test]
    fn format_names() {
        assert_eq!("vcd".parse::<TraceFormat>(), Ok(TraceFormat::Vcd));
        assert!("json".parse::<TraceFormat>().is_err());
    }
}
