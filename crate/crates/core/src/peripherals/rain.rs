use thiserror::Error;

use crate::sim::Logic;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensorError {
    #[error("wetness {0} is outside [0, 1]")]
    Wetness(f64),
    #[error("invalid sensor parameters: {0}")]
    Params(String),
}

/// Resistive grid, divider and the two potentiometer comparators.
///
/// The grid sits on the high side of the divider, so the analog output
/// falls as the grid gets wetter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RainSensor {
    pub vcc: f64,
    pub r_dry: f64,
    pub r_wet: f64,
    pub r_fixed: f64,
    pub pot_light: f64,
    pub pot_heavy: f64,
    pub hysteresis: f64,
}

impl Default for RainSensor {
    fn default() -> Self {
        RainSensor {
            vcc: 5.0,
            r_dry: 1.0e6,
            r_wet: 1.0e3,
            r_fixed: 10.0e3,
            pot_light: 2.5,
            pot_heavy: 1.0,
            hysteresis: 0.0,
        }
    }
}

/// Levels driven onto AO, DO and HEAVY.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorOutputs {
    pub ao: f64,
    pub rain: Logic,
    pub heavy: Logic,
}

impl RainSensor {
    pub fn validate(&self) -> Result<(), SensorError> {
        let bad = |m: &str| Err(SensorError::Params(m.to_string()));
        let all = [
            self.vcc,
            self.r_dry,
            self.r_wet,
            self.r_fixed,
            self.pot_light,
            self.pot_heavy,
            self.hysteresis,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite");
        }
        if !(self.r_wet > 0.0 && self.r_wet < self.r_dry) {
            return bad("need 0 < r_wet < r_dry");
        }
        if self.r_fixed <= 0.0 {
            return bad("r_fixed must be positive");
        }
        if !(0.0 < self.pot_heavy && self.pot_heavy < self.pot_light && self.pot_light < self.vcc) {
            return bad("need 0 < pot_heavy < pot_light < vcc");
        }
        if self.hysteresis < 0.0 {
            return bad("hysteresis must be non-negative");
        }
        Ok(())
    }

    /// Grid resistance: dry and wet paths combined in parallel proportion.
    pub fn resistance(&self, wetness: f64) -> Result<f64, SensorError> {
        if !(0.0..=1.0).contains(&wetness) {
            return Err(SensorError::Wetness(wetness));
        }
        Ok(self.r_dry * self.r_wet / (wetness * self.r_dry + (1.0 - wetness) * self.r_wet))
    }

    pub fn analog_out(&self, wetness: f64) -> Result<f64, SensorError> {
        let r = self.resistance(wetness)?;
        Ok(self.vcc * r / (r + self.r_fixed))
    }

    /// Comparator outputs with no history (hysteresis ignored).
    pub fn outputs(&self, wetness: f64) -> Result<SensorOutputs, SensorError> {
        let ao = self.analog_out(wetness)?;
        Ok(SensorOutputs {
            ao,
            rain: comparator(ao, self.pot_light),
            heavy: comparator(ao, self.pot_heavy),
        })
    }
}

/// Low (wet) iff `ao` is strictly below `threshold`; a tie reads dry.
pub fn comparator(ao: f64, threshold: f64) -> Logic {
    Logic::from_bool(ao >= threshold)
}

/// Comparator with optional hysteresis. Falls when `ao < threshold`, rises
/// again only once `ao >= threshold + hysteresis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparator {
    pub threshold: f64,
    pub hysteresis: f64,
    out: Logic,
}

impl Comparator {
    pub fn new(threshold: f64, hysteresis: f64, ao: f64) -> Self {
        Comparator {
            threshold,
            hysteresis,
            out: comparator(ao, threshold),
        }
    }

    pub fn output(&self) -> Logic {
        self.out
    }

    pub fn update(&mut self, ao: f64) -> Logic {
        self.out = match self.out {
            Logic::High => comparator(ao, self.threshold),
            Logic::Low => comparator(ao, self.threshold + self.hysteresis),
        };
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resistance_endpoints() {
        let s = RainSensor::default();
        assert_eq!(s.resistance(0.0).unwrap(), 1.0e6);
        assert_eq!(s.resistance(1.0).unwrap(), 1.0e3);
    }

    #[test]
    fn resistance_rejects_out_of_range() {
        let s = RainSensor::default();
        assert_eq!(s.resistance(1.5), Err(SensorError::Wetness(1.5)));
        assert!(s.resistance(-0.01).is_err());
        assert!(s.resistance(f64::NAN).is_err());
    }

    #[test]
    fn symmetric_divider_is_half_vcc() {
        let s = RainSensor {
            r_fixed: 1.0e6,
            ..RainSensor::default()
        };
        assert_eq!(s.analog_out(0.0).unwrap(), 2.5);
    }

    #[test]
    fn comparator_tie_is_dry() {
        assert_eq!(comparator(2.5, 2.5), Logic::High);
        assert_eq!(comparator(4.95, 2.5), Logic::High);
        assert_eq!(comparator(0.455, 2.5), Logic::Low);
    }

    #[test]
    fn hysteresis_holds_low_until_margin() {
        let mut c = Comparator::new(2.5, 0.2, 4.0);
        assert_eq!(c.update(2.4), Logic::Low);
        assert_eq!(c.update(2.6), Logic::Low);
        assert_eq!(c.update(2.7), Logic::High);
    }

    #[test]
    fn default_params_valid() {
        RainSensor::default().validate().unwrap();
        let bad = RainSensor {
            pot_heavy: 3.0,
            ..RainSensor::default()
        };
        assert!(bad.validate().is_err());
    }
}
