//! The reference wiper controller and the constants it was built around.

use crate::asm::{assemble, AsmError, Assembly};
use crate::sim::SimTime;

/// Assembly source of the controller.
pub const SOURCE: &str = include_str!("../../../../firmware/wiper.a51");

/// Timing and pin constants the firmware source is written against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmwareConfig {
    pub frame_reload: u16,
    pub pulse_min_us: u16,
    pub pulse_max_us: u16,
    pub light_period: SimTime,
    pub heavy_period: SimTime,
    pub light_step_us: u16,
    pub heavy_step_us: u16,
    /// (port, bit) of the rain, heavy-rain and servo lines.
    pub rain_pin: (u8, u8),
    pub heavy_pin: (u8, u8),
    pub servo_pin: (u8, u8),
}

impl FirmwareConfig {
    pub const REFERENCE: FirmwareConfig = FirmwareConfig {
        frame_reload: 0xB1E0,
        pulse_min_us: 1000,
        pulse_max_us: 2000,
        light_period: SimTime::from_ms(2200),
        heavy_period: SimTime::from_ms(1400),
        light_step_us: 18,
        heavy_step_us: 29,
        rain_pin: (1, 0),
        heavy_pin: (1, 1),
        servo_pin: (2, 0),
    };

    /// Machine cycles from one frame-timer reload to its overflow.
    pub fn frame_cycles(&self) -> u32 {
        0x1_0000 - self.frame_reload as u32
    }

    /// Per-frame width step that sweeps 1000..2000..1000 us in `period`,
    /// assuming 1 us machine cycles.
    pub fn ideal_step_us(&self, period: SimTime) -> f64 {
        let frames = period.ns() as f64 / (self.frame_cycles() as f64 * 1000.0);
        2.0 * (self.pulse_max_us - self.pulse_min_us) as f64 / frames
    }
}

impl Default for FirmwareConfig {
    fn default() -> Self {
        Self::REFERENCE
    }
}

pub fn build() -> Result<Assembly, AsmError> {
    assemble(SOURCE)
}
