use crate::sim::{Logic, SimTime};

pub const DEFAULT_SLEW_DEG_PER_S: f64 = 600.0;

const MIN_NS: u64 = 1_000_000;
const MAX_NS: u64 = 2_000_000;
const REJECT_BELOW_NS: u64 = 500_000;
const REJECT_ABOVE_NS: u64 = 2_500_000;

/// Commanded angle for a pulse width, or `None` for a width outside
/// 0.5..=2.5 ms. Accepted widths clamp to 1..=2 ms, mapped linearly to 0..=180.
pub fn decode_angle(width: SimTime) -> Option<f64> {
    let w = width.ns();
    if !(REJECT_BELOW_NS..=REJECT_ABOVE_NS).contains(&w) {
        return None;
    }
    let w = w.clamp(MIN_NS, MAX_NS);
    Some((w - MIN_NS) as f64 * 180.0 / (MAX_NS - MIN_NS) as f64)
}

/// Moves `current` toward `target` by at most `slew * dt`.
pub fn slew_toward(current: f64, target: f64, slew_deg_per_s: f64, dt: SimTime) -> f64 {
    let max_step = slew_deg_per_s * dt.ns() as f64 / 1e9;
    let delta = target - current;
    if delta.abs() <= max_step {
        target
    } else {
        current + max_step.copysign(delta)
    }
}

/// Pulse decoder plus slew-limited horn position. Once pulses stop the
/// last commanded angle is held for good.
#[derive(Debug, Clone, PartialEq)]
pub struct Servo {
    pub slew_deg_per_s: f64,
    angle: f64,
    commanded: f64,
    at: SimTime,
    rise: Option<SimTime>,
    last_pulse: Option<SimTime>,
    rejected: u64,
}

impl Default for Servo {
    fn default() -> Self {
        Servo::new(0.0)
    }
}

impl Servo {
    pub fn new(angle: f64) -> Self {
        Servo {
            slew_deg_per_s: DEFAULT_SLEW_DEG_PER_S,
            angle,
            commanded: angle,
            at: SimTime::ZERO,
            rise: None,
            last_pulse: None,
            rejected: 0,
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn commanded(&self) -> f64 {
        self.commanded
    }

    pub fn last_pulse(&self) -> Option<SimTime> {
        self.last_pulse
    }

    /// Pulses ignored as noise.
    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    /// Runs the kinematics forward to `to` and returns the angle there.
    pub fn advance(&mut self, to: SimTime) -> f64 {
        if to > self.at {
            self.angle = slew_toward(
                self.angle,
                self.commanded,
                self.slew_deg_per_s,
                to - self.at,
            );
            self.at = to;
        }
        self.angle
    }

    /// Feeds one edge of the control line.
    pub fn on_edge(&mut self, at: SimTime, level: Logic) {
        self.advance(at);
        match level {
            Logic::High => self.rise = Some(at),
            Logic::Low => {
                if let Some(rise) = self.rise.take() {
                    self.accept(rise, at - rise);
                }
            }
        }
    }

    /// Applies a pulse of `width` measured from `rise`.
    pub fn accept(&mut self, rise: SimTime, width: SimTime) {
        match decode_angle(width) {
            Some(a) => {
                self.commanded = a;
                self.last_pulse = Some(rise);
            }
            None => self.rejected += 1,
        }
    }
}
