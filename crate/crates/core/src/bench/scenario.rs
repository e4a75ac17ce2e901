//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! name = light_rain
//! horizon_ms = 10000
//! crystal_hz = 12000000          # optional
//! sensor.pot_light = 2.5         # optional sensor overrides
//! schedule
//! 0 0.3                          # time_ms wetness
//! end
//! assert sweep_period from_ms=0 expected_ms=2200 tol=5%
//! ```
//!
//! Sensor keys: `vcc r_dry r_wet r_fixed pot_light pot_heavy hysteresis`.
//! Assertion kinds and their keys are listed on [`Check`]. A tolerance
//! ending in `%` is relative to the expected value.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::mcs51::ClockConfig;
use crate::peripherals::RainSensor;
use crate::sim::SimTime;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {msg}")]
pub struct ScenarioError {
    pub line: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Abs(f64),
    Percent(f64),
}

impl Tolerance {
    pub fn allowed(&self, expected: f64) -> f64 {
        match *self {
            Tolerance::Abs(t) => t,
            Tolerance::Percent(p) => expected.abs() * p / 100.0,
        }
    }

    pub fn admits(&self, expected: f64, measured: f64) -> bool {
        (measured - expected).abs() <= self.allowed(expected)
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Abs(t) => write!(f, "{t}"),
            Tolerance::Percent(p) => write!(f, "{p}%"),
        }
    }
}

/// One pass/fail check evaluated on the finished traces.
#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// `sweep_period from_ms expected_ms tol`: mean time between servo
    /// angle maxima (at or above 170 degrees) after `from_ms`.
    SweepPeriod {
        from_ms: u64,
        expected_ms: f64,
        tol: Tolerance,
    },
    /// `pulse_count from_ms to_ms expected tol`: complete SERVO_PWM pulses
    /// rising inside the window.
    PulseCount {
        from_ms: u64,
        to_ms: u64,
        expected: f64,
        tol: Tolerance,
    },
    /// `park_angle from_ms to_ms expected_deg tol`: every SERVO_ANGLE value
    /// in the window.
    ParkAngle {
        from_ms: u64,
        to_ms: u64,
        expected_deg: f64,
        tol: Tolerance,
    },
    /// `frame_period from_ms to_ms expected_ms tol`: every interval between
    /// successive SERVO_PWM rises in the window.
    FramePeriod {
        from_ms: u64,
        to_ms: u64,
        expected_ms: f64,
        tol: Tolerance,
    },
    /// `pulse_width from_ms to_ms min_us max_us tol_us`: every pulse width
    /// in the window lies in `[min_us - tol_us, max_us + tol_us]`.
    PulseWidth {
        from_ms: u64,
        to_ms: u64,
        min_us: f64,
        max_us: f64,
        tol_us: f64,
    },
    /// `onset at_ms within_ms`: the first pulse wider than 1010 us rises no
    /// later than `within_ms` after `at_ms`.
    Onset { at_ms: u64, within_ms: f64 },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::SweepPeriod { .. } => "sweep_period",
            Check::PulseCount { .. } => "pulse_count",
            Check::ParkAngle { .. } => "park_angle",
            Check::FramePeriod { .. } => "frame_period",
            Check::PulseWidth { .. } => "pulse_width",
            Check::Onset { .. } => "onset",
        }
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        match self {
            Check::SweepPeriod {
                from_ms,
                expected_ms,
                tol,
            } => vec![
                ("from_ms", from_ms.to_string()),
                ("expected_ms", expected_ms.to_string()),
                ("tol", tol.to_string()),
            ],
            Check::PulseCount {
                from_ms,
                to_ms,
                expected,
                tol,
            } => vec![
                ("from_ms", from_ms.to_string()),
                ("to_ms", to_ms.to_string()),
                ("expected", expected.to_string()),
                ("tol", tol.to_string()),
            ],
            Check::ParkAngle {
                from_ms,
                to_ms,
                expected_deg,
                tol,
            } => vec![
                ("from_ms", from_ms.to_string()),
                ("to_ms", to_ms.to_string()),
                ("expected_deg", expected_deg.to_string()),
                ("tol", tol.to_string()),
            ],
            Check::FramePeriod {
                from_ms,
                to_ms,
                expected_ms,
                tol,
            } => vec![
                ("from_ms", from_ms.to_string()),
                ("to_ms", to_ms.to_string()),
                ("expected_ms", expected_ms.to_string()),
                ("tol", tol.to_string()),
            ],
            Check::PulseWidth {
                from_ms,
                to_ms,
                min_us,
                max_us,
                tol_us,
            } => vec![
                ("from_ms", from_ms.to_string()),
                ("to_ms", to_ms.to_string()),
                ("min_us", min_us.to_string()),
                ("max_us", max_us.to_string()),
                ("tol_us", tol_us.to_string()),
            ],
            Check::Onset { at_ms, within_ms } => vec![
                ("at_ms", at_ms.to_string()),
                ("within_ms", within_ms.to_string()),
            ],
        }
    }

    /// Largest time the check looks at, if it names one.
    fn latest_ms(&self) -> u64 {
        match *self {
            Check::SweepPeriod { from_ms, .. } => from_ms,
            Check::ParkAngle { to_ms, .. }
            | Check::PulseCount { to_ms, .. }
            | Check::FramePeriod { to_ms, .. }
            | Check::PulseWidth { to_ms, .. } => to_ms,
            Check::Onset { at_ms, .. } => at_ms,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())?;
        for (k, v) in self.fields() {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub clock: ClockConfig,
    pub sensor: RainSensor,
    /// (time in ms, wetness), strictly increasing, first entry at 0.
    pub schedule: Vec<(u64, f64)>,
    pub horizon: SimTime,
    pub checks: Vec<Check>,
}

impl Scenario {
    /// Scenario with the default sensor and a constant wetness.
    pub fn constant(name: &str, wetness: f64, horizon_ms: u64) -> Self {
        Scenario {
            name: name.to_string(),
            clock: ClockConfig::default(),
            sensor: RainSensor::default(),
            schedule: vec![(0, wetness)],
            horizon: SimTime::from_ms(horizon_ms),
            checks: Vec::new(),
        }
    }

    pub fn wetness_at(&self, t: SimTime) -> f64 {
        self.schedule
            .iter()
            .take_while(|(ms, _)| SimTime::from_ms(*ms) <= t)
            .last()
            .map_or(0.0, |&(_, w)| w)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let d = RainSensor::default();
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "horizon_ms = {}", self.horizon.ns() / 1_000_000);
        if self.clock != ClockConfig::default() {
            let _ = writeln!(out, "crystal_hz = {}", self.clock.crystal_hz);
        }
        for (key, value, default) in sensor_fields(&self.sensor, &d) {
            if value.to_bits() != default.to_bits() {
                let _ = writeln!(out, "sensor.{key} = {value}");
            }
        }
        out.push_str("schedule\n");
        for (t, w) in &self.schedule {
            let _ = writeln!(out, "{t} {w}");
        }
        out.push_str("end\n");
        for c in &self.checks {
            let _ = writeln!(out, "assert {c}");
        }
        out
    }
}

fn sensor_fields(s: &RainSensor, d: &RainSensor) -> [(&'static str, f64, f64); 7] {
    [
        ("vcc", s.vcc, d.vcc),
        ("r_dry", s.r_dry, d.r_dry),
        ("r_wet", s.r_wet, d.r_wet),
        ("r_fixed", s.r_fixed, d.r_fixed),
        ("pot_light", s.pot_light, d.pot_light),
        ("pot_heavy", s.pot_heavy, d.pot_heavy),
        ("hysteresis", s.hysteresis, d.hysteresis),
    ]
}

fn sensor_slot<'a>(s: &'a mut RainSensor, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "vcc" => &mut s.vcc,
        "r_dry" => &mut s.r_dry,
        "r_wet" => &mut s.r_wet,
        "r_fixed" => &mut s.r_fixed,
        "pot_light" => &mut s.pot_light,
        "pot_heavy" => &mut s.pot_heavy,
        "hysteresis" => &mut s.hysteresis,
        _ => return None,
    })
}

struct Fields<'a> {
    line: usize,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn err(&self, msg: String) -> ScenarioError {
        ScenarioError {
            line: self.line,
            msg,
        }
    }

    fn take(&mut self, key: &str) -> Result<&'a str, ScenarioError> {
        let pos = self
            .pairs
            .iter()
            .position(|(k, _)| *k == key)
            .ok_or_else(|| self.err(format!("missing `{key}`")))?;
        Ok(self.pairs.remove(pos).1)
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ScenarioError> {
        let v = self.take(key)?;
        v.parse()
            .map_err(|_| self.err(format!("`{key}`: bad number `{v}`")))
    }

    fn real(&mut self, key: &str) -> Result<f64, ScenarioError> {
        let v: f64 = self.num(key)?;
        if !v.is_finite() {
            return Err(self.err(format!("`{key}` must be finite")));
        }
        Ok(v)
    }

    fn tol(&mut self, key: &str) -> Result<Tolerance, ScenarioError> {
        let v = self.take(key)?;
        let (num, pct) = match v.strip_suffix('%') {
            Some(n) => (n, true),
            None => (v, false),
        };
        let x: f64 = num
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite() && *x >= 0.0)
            .ok_or_else(|| self.err(format!("`{key}`: bad tolerance `{v}`")))?;
        Ok(if pct {
            Tolerance::Percent(x)
        } else {
            Tolerance::Abs(x)
        })
    }

    fn done(self) -> Result<(), ScenarioError> {
        match self.pairs.first() {
            Some((k, _)) => Err(self.err(format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn parse_check(line: usize, rest: &str) -> Result<Check, ScenarioError> {
    let err = |msg: String| ScenarioError { line, msg };
    let mut words = rest.split_whitespace();
    let kind = words
        .next()
        .ok_or_else(|| err("assert needs a kind".into()))?;
    let mut pairs = Vec::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, found `{w}`")))?;
        if pairs.iter().any(|(seen, _)| *seen == k) {
            return Err(err(format!("duplicate key `{k}`")));
        }
        pairs.push((k, v));
    }
    let mut f = Fields { line, pairs };
    let check = match kind {
        "sweep_period" => Check::SweepPeriod {
            from_ms: f.num("from_ms")?,
            expected_ms: f.real("expected_ms")?,
            tol: f.tol("tol")?,
        },
        "pulse_count" => Check::PulseCount {
            from_ms: f.num("from_ms")?,
            to_ms: f.num("to_ms")?,
            expected: f.real("expected")?,
            tol: f.tol("tol")?,
        },
        "park_angle" => Check::ParkAngle {
            from_ms: f.num("from_ms")?,
            to_ms: f.num("to_ms")?,
            expected_deg: f.real("expected_deg")?,
            tol: f.tol("tol")?,
        },
        "frame_period" => Check::FramePeriod {
            from_ms: f.num("from_ms")?,
            to_ms: f.num("to_ms")?,
            expected_ms: f.real("expected_ms")?,
            tol: f.tol("tol")?,
        },
        "pulse_width" => Check::PulseWidth {
            from_ms: f.num("from_ms")?,
            to_ms: f.num("to_ms")?,
            min_us: f.real("min_us")?,
            max_us: f.real("max_us")?,
            tol_us: f.real("tol_us")?,
        },
        "onset" => Check::Onset {
            at_ms: f.num("at_ms")?,
            within_ms: f.real("within_ms")?,
        },
        other => return Err(err(format!("unknown assertion kind `{other}`"))),
    };
    f.done()?;
    if let Check::PulseCount { from_ms, to_ms, .. }
    | Check::FramePeriod { from_ms, to_ms, .. }
    | Check::PulseWidth { from_ms, to_ms, .. }
    | Check::ParkAngle { from_ms, to_ms, .. } = check
    {
        if to_ms <= from_ms {
            return Err(err("window must have to_ms > from_ms".into()));
        }
    }
    Ok(check)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut name = None;
    let mut horizon_ms: Option<u64> = None;
    let mut clock = ClockConfig::default();
    let mut sensor = RainSensor::default();
    let mut schedule: Vec<(u64, f64)> = Vec::new();
    let mut schedule_seen = false;
    let mut in_schedule = false;
    let mut checks = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let err = |msg: String| ScenarioError { line, msg };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if in_schedule {
            if content == "end" {
                in_schedule = false;
                continue;
            }
            let mut parts = content.split_whitespace();
            let (Some(t), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!(
                    "expected `time_ms wetness`, found `{content}`"
                )));
            };
            let t: u64 = t.parse().map_err(|_| err(format!("bad time `{t}`")))?;
            let w: f64 = w.parse().map_err(|_| err(format!("bad wetness `{w}`")))?;
            if !(0.0..=1.0).contains(&w) {
                return Err(err(format!("wetness {w} is outside [0, 1]")));
            }
            match schedule.last() {
                None if t != 0 => return Err(err("schedule must start at time 0".into())),
                Some(&(prev, _)) if t <= prev => {
                    return Err(err(format!("time {t} does not follow {prev}")))
                }
                _ => {}
            }
            schedule.push((t, w));
            continue;
        }
        if content == "schedule" {
            if schedule_seen {
                return Err(err("second schedule block".into()));
            }
            schedule_seen = true;
            in_schedule = true;
            continue;
        }
        if let Some(rest) = content.strip_prefix("assert ") {
            checks.push(parse_check(line, rest)?);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected key = value, found `{content}`")))?;
        let bad = |what: &str| err(format!("bad {what} `{value}`"));
        match key {
            "name" => {
                if value.is_empty() || value.contains(char::is_whitespace) {
                    return Err(bad("name"));
                }
                name = Some(value.to_string());
            }
            "horizon_ms" => horizon_ms = Some(value.parse().map_err(|_| bad("horizon"))?),
            "crystal_hz" => {
                let hz: u64 = value.parse().map_err(|_| bad("crystal frequency"))?;
                if hz == 0 {
                    return Err(bad("crystal frequency"));
                }
                clock = ClockConfig { crystal_hz: hz };
            }
            _ => {
                let slot = key
                    .strip_prefix("sensor.")
                    .and_then(|k| sensor_slot(&mut sensor, k))
                    .ok_or_else(|| err(format!("unknown key `{key}`")))?;
                *slot = value.parse().map_err(|_| bad("number"))?;
            }
        }
    }
    let end = |msg: &str| ScenarioError {
        line: last_line,
        msg: msg.to_string(),
    };
    if in_schedule {
        return Err(end("schedule block is not closed with `end`"));
    }
    let name = name.ok_or_else(|| end("missing `name`"))?;
    let horizon_ms = horizon_ms.ok_or_else(|| end("missing `horizon_ms`"))?;
    if schedule.is_empty() {
        return Err(end("missing schedule"));
    }
    if let Some(&(t, _)) = schedule.last() {
        if horizon_ms < t {
            return Err(end("horizon is before the last schedule entry"));
        }
    }
    if let Some(c) = checks.iter().find(|c| c.latest_ms() > horizon_ms) {
        return Err(end(&format!("`{c}` looks past the horizon")));
    }
    sensor.validate().map_err(|e| end(&e.to_string()))?;
    Ok(Scenario {
        name,
        clock,
        sensor,
        schedule,
        horizon: SimTime::from_ms(horizon_ms),
        checks,
    })
}
