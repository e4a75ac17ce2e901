//! Behavioural models of the rain-sensor board and the hobby servo.

pub mod rain;
pub mod servo;

pub use rain::{comparator, Comparator, RainSensor, SensorError, SensorOutputs};
pub use servo::{decode_angle, slew_toward, Servo, DEFAULT_SLEW_DEG_PER_S};
