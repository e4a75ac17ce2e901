//! Behavioral AT89C51: CPU, 128 bytes of internal RAM, SFRs, timers 0/1 and
//! four quasi-bidirectional ports, executing from a 4 KB code ROM.

mod cpu;
pub mod isa;
pub mod sfr;
mod timer;

pub use cpu::{
    ClockConfig, Cpu, CpuError, Pins, PortWrite, INTERRUPT_LATENCY, IRAM_SIZE, ROM_SIZE,
};
pub use timer::Overflows;

/// Net name for a port pin, e.g. `P1.0`.
pub fn pin_net_name(port: u8, bit: u8) -> String {
    format!("P{port}.{bit}")
}
