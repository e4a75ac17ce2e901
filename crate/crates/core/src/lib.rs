//! Co-simulation bench for a rain-sensing wiper controller built on an
//! AT89C51: event kernel, MCS-51 emulator and toolchain, sensor and servo
//! models, the reference firmware and a scenario runner.

pub mod asm;
pub mod bench;
pub mod firmware;
pub mod mcs51;
pub mod peripherals;
pub mod sim;
