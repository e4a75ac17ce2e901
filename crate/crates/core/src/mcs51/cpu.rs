use std::fmt;

use thiserror::Error;

use super::isa;
use super::sfr::*;
use super::timer::{self, Overflows};
use crate::asm::ObjectImage;
use crate::sim::{Logic, SimTime};

pub const ROM_SIZE: usize = 4096;
pub const IRAM_SIZE: usize = 128;

/// Machine cycles spent entering an interrupt handler.
pub const INTERRUPT_LATENCY: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpuError {
    #[error("unimplemented opcode 0x{opcode:02X} at PC 0x{pc:04X}")]
    Unimplemented { opcode: u8, pc: u16 },
    #[error("PC 0x{pc:04X} is outside the 4 KB code ROM")]
    PcOutOfRom { pc: u16 },
    #[error("MOVC reads 0x{addr:04X}, outside the 4 KB code ROM (PC 0x{pc:04X})")]
    CodeReadOutOfRom { addr: u16, pc: u16 },
    #[error("internal RAM address 0x{addr:02X} does not exist (PC 0x{pc:04X})")]
    IramOutOfRange { addr: u8, pc: u16 },
    #[error("MOVX at PC 0x{pc:04X}: external memory is not modelled")]
    ExternalMemory { pc: u16 },
    #[error("address out of ROM: 0x{addr:04X}")]
    LoadOutOfRom { addr: u16 },
}

/// Crystal frequency; one machine cycle is twelve crystal periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockConfig {
    pub crystal_hz: u64,
}

impl Default for ClockConfig {
    fn default() -> Self {
        ClockConfig {
            crystal_hz: 12_000_000,
        }
    }
}

impl ClockConfig {
    /// Exact machine-cycle length, if it is a whole number of nanoseconds.
    pub fn machine_cycle_ns(&self) -> Option<u64> {
        let num = 12_000_000_000u64;
        (num.checked_rem(self.crystal_hz) == Some(0)).then(|| num / self.crystal_hz)
    }

    /// Time of a cycle boundary. Computed from the absolute count, so
    /// non-integer cycle lengths never accumulate rounding error.
    pub fn time_of_cycle(&self, cycles: u64) -> SimTime {
        SimTime((cycles as u128 * 12_000_000_000 / self.crystal_hz as u128) as u64)
    }
}

/// External levels seen on the four ports, one bit per pin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pins(pub [u8; 4]);

impl Default for Pins {
    fn default() -> Self {
        Pins([0xFF; 4])
    }
}

impl Pins {
    pub fn set(&mut self, port: usize, bit: u8, level: Logic) {
        if level.is_high() {
            self.0[port] |= 1 << bit;
        } else {
            self.0[port] &= !(1 << bit);
        }
    }
}

/// A port latch change, stamped with the cycle count at which it retired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PortWrite {
    pub cycle: u64,
    pub port: u8,
    pub old: u8,
    pub new: u8,
}

/// Programmer-visible AT89C51 state plus its code ROM.
#[derive(Clone, PartialEq, Eq)]
pub struct Cpu {
    iram: [u8; IRAM_SIZE],
    sfr: [u8; 128],
    pc: u16,
    code: Box<[u8; ROM_SIZE]>,
    cycle_count: u64,
    in_service: [bool; 2],
    irq_blocked: bool,
}

impl fmt::Debug for Cpu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cpu")
            .field("pc", &format_args!("{:04X}", self.pc))
            .field("acc", &format_args!("{:02X}", self.acc()))
            .field("b", &format_args!("{:02X}", self.b()))
            .field("psw", &format_args!("{:02X}", self.psw()))
            .field("sp", &format_args!("{:02X}", self.sp()))
            .field("dptr", &format_args!("{:04X}", self.dptr()))
            .field("cycles", &self.cycle_count)
            .finish_non_exhaustive()
    }
}

impl Default for Cpu {
    fn default() -> Self {
        Self::new()
    }
}

#[inline]
fn idx(addr: u8) -> usize {
    (addr - 0x80) as usize
}

impl Cpu {
    pub fn new() -> Self {
        let mut cpu = Cpu {
            iram: [0; IRAM_SIZE],
            sfr: [0; 128],
            pc: 0,
            code: Box::new([0; ROM_SIZE]),
            cycle_count: 0,
            in_service: [false; 2],
            irq_blocked: false,
        };
        cpu.reset();
        cpu
    }

    pub fn with_image(image: &ObjectImage) -> Result<Self, CpuError> {
        let mut cpu = Cpu::new();
        cpu.load_image(image)?;
        Ok(cpu)
    }

    /// Power-on reset. Code ROM is kept.
    pub fn reset(&mut self) {
        self.iram = [0; IRAM_SIZE];
        self.sfr = [0; 128];
        for p in PORTS {
            self.sfr[idx(p)] = 0xFF;
        }
        self.sfr[idx(SP)] = 0x07;
        self.pc = 0;
        self.cycle_count = 0;
        self.in_service = [false; 2];
        self.irq_blocked = false;
    }

    /// Replaces the code ROM. Bytes not present in `image` read as 0x00.
    pub fn load_image(&mut self, image: &ObjectImage) -> Result<(), CpuError> {
        if let Some((addr, _)) = image.iter().find(|&(a, _)| a as usize >= ROM_SIZE) {
            return Err(CpuError::LoadOutOfRom { addr });
        }
        self.code.fill(0);
        for (addr, byte) in image.iter() {
            self.code[addr as usize] = byte;
        }
        Ok(())
    }

    pub fn code(&self) -> &[u8; ROM_SIZE] {
        &self.code
    }

    pub fn pc(&self) -> u16 {
        self.pc
    }

    pub fn set_pc(&mut self, pc: u16) {
        self.pc = pc;
    }

    pub fn cycle_count(&self) -> u64 {
        self.cycle_count
    }

    pub fn iram(&self) -> &[u8; IRAM_SIZE] {
        &self.iram
    }

    pub fn iram_mut(&mut self) -> &mut [u8; IRAM_SIZE] {
        &mut self.iram
    }

    /// Raw SFR file indexed by `addr - 0x80`.
    pub fn sfr_file(&self) -> &[u8; 128] {
        &self.sfr
    }

    pub fn sfr(&self, addr: u8) -> u8 {
        self.sfr[idx(addr)]
    }

    pub fn set_sfr(&mut self, addr: u8, value: u8) {
        self.sfr[idx(addr)] = value;
    }

    pub fn acc(&self) -> u8 {
        self.sfr[idx(ACC)]
    }

    pub fn b(&self) -> u8 {
        self.sfr[idx(B)]
    }

    pub fn psw(&self) -> u8 {
        self.sfr[idx(PSW)]
    }

    pub fn sp(&self) -> u8 {
        self.sfr[idx(SP)]
    }

    pub fn dptr(&self) -> u16 {
        u16::from_be_bytes([self.sfr[idx(DPH)], self.sfr[idx(DPL)]])
    }

    pub fn port_latches(&self) -> [u8; 4] {
        PORTS.map(|p| self.sfr[idx(p)])
    }

    pub fn carry(&self) -> bool {
        self.psw() & PSW_CY != 0
    }

    /// Active register bank R0..R7 as IRAM offsets.
    pub fn bank_base(&self) -> u8 {
        (self.psw() >> 3) & 3
    }

    pub fn reg(&self, n: u8) -> u8 {
        self.iram[(self.bank_base() * 8 + n) as usize]
    }

    /// Quasi-bidirectional pin read: the external level when the latch is 1,
    /// otherwise the latch's own low.
    pub fn read_pin(&self, port: u8, bit: u8, pins: &Pins) -> Logic {
        let latch = self.sfr[idx(PORTS[port as usize])];
        Logic::from_bool(latch & pins.0[port as usize] & (1 << bit) != 0)
    }

    pub fn tick_timers(&mut self, cycles: u64) -> Overflows {
        timer::tick(&mut self.sfr, cycles)
    }

    /// Decodes the instruction at PC without executing it.
    pub fn peek_instruction(&self) -> Option<isa::Instruction> {
        let pc = self.pc as usize;
        let end = (pc + 3).min(ROM_SIZE);
        isa::decode(self.pc, self.code.get(pc..end)?)
    }

    /// Executes `cycles` worth of instructions (at least that many machine
    /// cycles, stopping on the first instruction boundary at or after it).
    /// Port latch changes are reported through `on_write`.
    pub fn run_for<F>(&mut self, cycles: u64, pins: &Pins, mut on_write: F) -> Result<(), CpuError>
    where
        F: FnMut(PortWrite),
    {
        let target = self.cycle_count + cycles;
        while self.cycle_count < target {
            let before = self.port_latches();
            self.step(pins)?;
            let after = self.port_latches();
            for port in 0..4 {
                if before[port] != after[port] {
                    on_write(PortWrite {
                        cycle: self.cycle_count,
                        port: port as u8,
                        old: before[port],
                        new: after[port],
                    });
                }
            }
        }
        Ok(())
    }

    /// Retires one instruction (plus interrupt entry, if one is taken) and
    /// returns the machine cycles consumed. Timers advance after the
    /// instruction retires, using the post-instruction run bits.
    pub fn step(&mut self, pins: &Pins) -> Result<u32, CpuError> {
        let pc = self.pc;
        if pc as usize >= ROM_SIZE {
            return Err(CpuError::PcOutOfRom { pc });
        }
        let opcode = self.code[pc as usize];
        let Some(info) = isa::op_info(opcode) else {
            return Err(CpuError::Unimplemented { opcode, pc });
        };
        let len = info.len as u16;
        if pc as usize + len as usize > ROM_SIZE {
            return Err(CpuError::PcOutOfRom {
                pc: (ROM_SIZE as u16).max(pc),
            });
        }
        let b1 = if len > 1 {
            self.code[pc as usize + 1]
        } else {
            0
        };
        let b2 = if len > 2 {
            self.code[pc as usize + 2]
        } else {
            0
        };
        self.pc = pc.wrapping_add(len);
        self.irq_blocked = false;
        if let Err(e) = self.exec(opcode, b1, b2, pins, pc) {
            self.pc = pc;
            return Err(e);
        }
        self.update_parity();
        let mut cycles = info.cycles as u32;
        self.cycle_count += cycles as u64;
        timer::tick(&mut self.sfr, cycles as u64);
        cycles += self.service_interrupt(pc)?;
        Ok(cycles)
    }

    fn update_parity(&mut self) {
        let p = (self.acc().count_ones() & 1) as u8;
        let psw = &mut self.sfr[idx(PSW)];
        *psw = (*psw & !PSW_P) | p;
    }

    fn service_interrupt(&mut self, pc: u16) -> Result<u32, CpuError> {
        let ie = self.sfr(IE);
        if self.irq_blocked || ie & IE_EA == 0 || self.in_service[1] {
            return Ok(0);
        }
        let tcon = self.sfr(TCON);
        let ip = self.sfr(IP);
        // (flag, enable, vector, priority bit), in polling order
        let sources = [
            (TCON_IE0, IE_EX0, 0x0003u16, 0x01u8),
            (TCON_TF0, IE_ET0, 0x000B, 0x02),
            (TCON_IE1, IE_EX1, 0x0013, 0x04),
            (TCON_TF1, IE_ET1, 0x001B, 0x08),
        ];
        let pending = sources
            .iter()
            .filter(|(flag, en, _, _)| tcon & flag != 0 && ie & en != 0);
        let chosen = pending
            .clone()
            .find(|(_, _, _, pri)| ip & pri != 0)
            .or_else(|| pending.clone().next());
        let Some(&(flag, _, vector, pri)) = chosen else {
            return Ok(0);
        };
        let level = usize::from(ip & pri != 0);
        if level == 0 && self.in_service[0] {
            return Ok(0);
        }
        let ret = self.pc;
        self.push(ret as u8, pc)?;
        self.push((ret >> 8) as u8, pc)?;
        self.pc = vector;
        self.sfr[idx(TCON)] &= !flag;
        self.in_service[level] = true;
        self.cycle_count += INTERRUPT_LATENCY as u64;
        timer::tick(&mut self.sfr, INTERRUPT_LATENCY as u64);
        Ok(INTERRUPT_LATENCY)
    }

    // ---- memory helpers ----

    fn iram_read(&self, addr: u8, pc: u16) -> Result<u8, CpuError> {
        self.iram
            .get(addr as usize)
            .copied()
            .ok_or(CpuError::IramOutOfRange { addr, pc })
    }

    fn iram_write(&mut self, addr: u8, value: u8, pc: u16) -> Result<(), CpuError> {
        let slot = self
            .iram
            .get_mut(addr as usize)
            .ok_or(CpuError::IramOutOfRange { addr, pc })?;
        *slot = value;
        Ok(())
    }

    fn reg_addr(&self, n: u8) -> usize {
        (self.bank_base() * 8 + n) as usize
    }

    fn set_reg(&mut self, n: u8, v: u8) {
        let a = self.reg_addr(n);
        self.iram[a] = v;
    }

    /// Direct-address read. Port SFRs return pin levels unless `latch` is set
    /// (read-modify-write instructions read the latch).
    fn read_direct(&self, addr: u8, pins: &Pins, latch: bool) -> u8 {
        if addr < 0x80 {
            return self.iram[addr as usize];
        }
        let v = self.sfr[idx(addr)];
        if !latch {
            if let Some(port) = PORTS.iter().position(|&p| p == addr) {
                return v & pins.0[port];
            }
        }
        v
    }

    fn write_direct(&mut self, addr: u8, value: u8) {
        if addr < 0x80 {
            self.iram[addr as usize] = value;
        } else {
            if addr == IE || addr == IP {
                self.irq_blocked = true;
            }
            self.sfr[idx(addr)] = value;
        }
    }

    fn read_bit(&self, bit: u8, pins: &Pins, latch: bool) -> bool {
        let (byte, mask) = bit_location(bit);
        self.read_direct(byte, pins, latch) & mask != 0
    }

    fn write_bit(&mut self, bit: u8, value: bool) {
        let (byte, mask) = bit_location(bit);
        let old = self.read_direct(byte, &Pins::default(), true);
        let new = if value { old | mask } else { old & !mask };
        self.write_direct(byte, new);
    }

    fn set_acc(&mut self, v: u8) {
        self.sfr[idx(ACC)] = v;
    }

    fn set_flag(&mut self, mask: u8, on: bool) {
        let psw = &mut self.sfr[idx(PSW)];
        if on {
            *psw |= mask;
        } else {
            *psw &= !mask;
        }
    }

    fn push(&mut self, v: u8, pc: u16) -> Result<(), CpuError> {
        let sp = self.sp().wrapping_add(1);
        self.iram_write(sp, v, pc)?;
        self.sfr[idx(SP)] = sp;
        Ok(())
    }

    fn pop(&mut self, pc: u16) -> Result<u8, CpuError> {
        let sp = self.sp();
        let v = self.iram_read(sp, pc)?;
        self.sfr[idx(SP)] = sp.wrapping_sub(1);
        Ok(v)
    }

    fn code_read(&self, addr: u16, pc: u16) -> Result<u8, CpuError> {
        self.code
            .get(addr as usize)
            .copied()
            .ok_or(CpuError::CodeReadOutOfRom { addr, pc })
    }

    fn jump_rel(&mut self, rel: u8) {
        self.pc = self.pc.wrapping_add(rel as i8 as i16 as u16);
    }

    // ---- ALU ----

    fn add(&mut self, v: u8, carry_in: bool) {
        let a = self.acc();
        let c = carry_in as u16;
        let sum = a as u16 + v as u16 + c;
        let res = sum as u8;
        self.set_flag(PSW_CY, sum > 0xFF);
        self.set_flag(PSW_AC, (a & 0x0F) as u16 + (v & 0x0F) as u16 + c > 0x0F);
        self.set_flag(PSW_OV, (a ^ res) & (v ^ res) & 0x80 != 0);
        self.set_acc(res);
    }

    fn subb(&mut self, v: u8) {
        let a = self.acc();
        let c = self.carry() as i16;
        let diff = a as i16 - v as i16 - c;
        let res = diff as u8;
        self.set_flag(PSW_CY, diff < 0);
        self.set_flag(PSW_AC, ((a & 0x0F) as i16) < (v & 0x0F) as i16 + c);
        self.set_flag(PSW_OV, (a ^ v) & (a ^ res) & 0x80 != 0);
        self.set_acc(res);
    }

    fn cjne(&mut self, lhs: u8, rhs: u8, rel: u8) {
        self.set_flag(PSW_CY, lhs < rhs);
        if lhs != rhs {
            self.jump_rel(rel);
        }
    }

    fn call(&mut self, target: u16, pc: u16) -> Result<(), CpuError> {
        let ret = self.pc;
        self.push(ret as u8, pc)?;
        self.push((ret >> 8) as u8, pc)?;
        self.pc = target;
        Ok(())
    }

    fn ret(&mut self, pc: u16) -> Result<(), CpuError> {
        let hi = self.pop(pc)?;
        let lo = self.pop(pc)?;
        self.pc = u16::from_be_bytes([hi, lo]);
        Ok(())
    }

    fn page_target(&self, opcode: u8, low: u8) -> u16 {
        (self.pc & 0xF800) | (((opcode as u16) >> 5) << 8) | low as u16
    }

    /// Operand value for the shared "column" sources: 6..7 = @Ri, 8..F = Rn.
    fn column_src(&self, opcode: u8, pc: u16) -> Result<u8, CpuError> {
        if opcode & 0x08 != 0 {
            Ok(self.reg(opcode & 7))
        } else {
            self.iram_read(self.reg(opcode & 1), pc)
        }
    }

    fn column_write(&mut self, opcode: u8, v: u8, pc: u16) -> Result<(), CpuError> {
        if opcode & 0x08 != 0 {
            self.set_reg(opcode & 7, v);
            Ok(())
        } else {
            let addr = self.reg(opcode & 1);
            self.iram_write(addr, v, pc)
        }
    }

    fn exec(&mut self, op: u8, b1: u8, b2: u8, pins: &Pins, pc: u16) -> Result<(), CpuError> {
        match op {
            0x00 => {}
            _ if op & 0x1F == 0x01 => self.pc = self.page_target(op, b1),
            _ if op & 0x1F == 0x11 => {
                let target = self.page_target(op, b1);
                self.call(target, pc)?;
            }
            0x02 => self.pc = u16::from_be_bytes([b1, b2]),
            0x12 => self.call(u16::from_be_bytes([b1, b2]), pc)?,
            0x22 => self.ret(pc)?,
            0x32 => {
                self.ret(pc)?;
                if self.in_service[1] {
                    self.in_service[1] = false;
                } else {
                    self.in_service[0] = false;
                }
                self.irq_blocked = true;
            }
            0x73 => self.pc = self.dptr().wrapping_add(self.acc() as u16),
            0x80 => self.jump_rel(b1),

            // rotates and accumulator ops
            0x03 => self.set_acc(self.acc().rotate_right(1)),
            0x23 => self.set_acc(self.acc().rotate_left(1)),
            0x13 => {
                let a = self.acc();
                let c = self.carry();
                self.set_flag(PSW_CY, a & 1 != 0);
                self.set_acc((a >> 1) | ((c as u8) << 7));
            }
            0x33 => {
                let a = self.acc();
                let c = self.carry();
                self.set_flag(PSW_CY, a & 0x80 != 0);
                self.set_acc((a << 1) | c as u8);
            }
            0xC4 => self.set_acc(self.acc().rotate_left(4)),
            0xE4 => self.set_acc(0),
            0xF4 => self.set_acc(!self.acc()),
            0xD4 => {
                let mut a = self.acc() as u16;
                if self.psw() & PSW_AC != 0 || a & 0x0F > 9 {
                    a += 0x06;
                }
                if self.carry() || (a & 0xF0) > 0x90 || a > 0xFF {
                    a += 0x60;
                }
                if a > 0xFF {
                    self.set_flag(PSW_CY, true);
                }
                self.set_acc(a as u8);
            }
            0xA4 => {
                let p = self.acc() as u16 * self.b() as u16;
                self.set_acc(p as u8);
                self.sfr[idx(B)] = (p >> 8) as u8;
                self.set_flag(PSW_CY, false);
                self.set_flag(PSW_OV, p > 0xFF);
            }
            0x84 => {
                let (a, b) = (self.acc(), self.b());
                self.set_flag(PSW_CY, false);
                match a.checked_div(b) {
                    None => self.set_flag(PSW_OV, true),
                    Some(q) => {
                        self.set_acc(q);
                        self.sfr[idx(B)] = a % b;
                        self.set_flag(PSW_OV, false);
                    }
                }
            }

            // INC / DEC
            0x04 => self.set_acc(self.acc().wrapping_add(1)),
            0x14 => self.set_acc(self.acc().wrapping_sub(1)),
            0x05 | 0x15 => {
                let v = self.read_direct(b1, pins, true);
                let v = if op == 0x05 {
                    v.wrapping_add(1)
                } else {
                    v.wrapping_sub(1)
                };
                self.write_direct(b1, v);
            }
            0x06..=0x0F | 0x16..=0x1F => {
                let v = self.column_src(op, pc)?;
                let v = if op < 0x10 {
                    v.wrapping_add(1)
                } else {
                    v.wrapping_sub(1)
                };
                self.column_write(op, v, pc)?;
            }
            0xA3 => {
                let d = self.dptr().wrapping_add(1).to_be_bytes();
                self.sfr[idx(DPH)] = d[0];
                self.sfr[idx(DPL)] = d[1];
            }

            // ADD / ADDC / SUBB
            0x24 => self.add(b1, false),
            0x25 => self.add(self.read_direct(b1, pins, false), false),
            0x26..=0x2F => self.add(self.column_src(op, pc)?, false),
            0x34 => self.add(b1, self.carry()),
            0x35 => self.add(self.read_direct(b1, pins, false), self.carry()),
            0x36..=0x3F => self.add(self.column_src(op, pc)?, self.carry()),
            0x94 => self.subb(b1),
            0x95 => self.subb(self.read_direct(b1, pins, false)),
            0x96..=0x9F => self.subb(self.column_src(op, pc)?),

            // ORL / ANL / XRL
            0x42..=0x4F | 0x52..=0x5F | 0x62..=0x6F => {
                let f: fn(u8, u8) -> u8 = match op >> 4 {
                    4 => |a, b| a | b,
                    5 => |a, b| a & b,
                    _ => |a, b| a ^ b,
                };
                match op & 0x0F {
                    0x2 => {
                        let v = f(self.read_direct(b1, pins, true), self.acc());
                        self.write_direct(b1, v);
                    }
                    0x3 => {
                        let v = f(self.read_direct(b1, pins, true), b2);
                        self.write_direct(b1, v);
                    }
                    0x4 => self.set_acc(f(self.acc(), b1)),
                    0x5 => self.set_acc(f(self.acc(), self.read_direct(b1, pins, false))),
                    _ => {
                        let v = self.column_src(op, pc)?;
                        self.set_acc(f(self.acc(), v));
                    }
                }
            }

            // conditional jumps
            0x40 => {
                if self.carry() {
                    self.jump_rel(b1)
                }
            }
            0x50 => {
                if !self.carry() {
                    self.jump_rel(b1)
                }
            }
            0x60 => {
                if self.acc() == 0 {
                    self.jump_rel(b1)
                }
            }
            0x70 => {
                if self.acc() != 0 {
                    self.jump_rel(b1)
                }
            }
            0x10 => {
                if self.read_bit(b1, pins, true) {
                    self.write_bit(b1, false);
                    self.jump_rel(b2);
                }
            }
            0x20 => {
                if self.read_bit(b1, pins, false) {
                    self.jump_rel(b2);
                }
            }
            0x30 => {
                if !self.read_bit(b1, pins, false) {
                    self.jump_rel(b2);
                }
            }
            0xB4 => self.cjne(self.acc(), b1, b2),
            0xB5 => self.cjne(self.acc(), self.read_direct(b1, pins, false), b2),
            0xB6..=0xBF => {
                let lhs = self.column_src(op, pc)?;
                self.cjne(lhs, b1, b2);
            }
            0xD5 => {
                let v = self.read_direct(b1, pins, true).wrapping_sub(1);
                self.write_direct(b1, v);
                if v != 0 {
                    self.jump_rel(b2);
                }
            }
            0xD8..=0xDF => {
                let v = self.reg(op & 7).wrapping_sub(1);
                self.set_reg(op & 7, v);
                if v != 0 {
                    self.jump_rel(b1);
                }
            }

            // carry / bit ops
            0x72 => {
                let v = self.carry() | self.read_bit(b1, pins, false);
                self.set_flag(PSW_CY, v);
            }
            0x82 => {
                let v = self.carry() & self.read_bit(b1, pins, false);
                self.set_flag(PSW_CY, v);
            }
            0xA0 => {
                let v = self.carry() | !self.read_bit(b1, pins, false);
                self.set_flag(PSW_CY, v);
            }
            0xB0 => {
                let v = self.carry() & !self.read_bit(b1, pins, false);
                self.set_flag(PSW_CY, v);
            }
            0x92 => self.write_bit(b1, self.carry()),
            0xA2 => {
                let v = self.read_bit(b1, pins, false);
                self.set_flag(PSW_CY, v);
            }
            0xB2 => {
                let v = self.read_bit(b1, pins, true);
                self.write_bit(b1, !v);
            }
            0xB3 => self.set_flag(PSW_CY, !self.carry()),
            0xC2 => self.write_bit(b1, false),
            0xC3 => self.set_flag(PSW_CY, false),
            0xD2 => self.write_bit(b1, true),
            0xD3 => self.set_flag(PSW_CY, true),

            // data moves
            0x74 => self.set_acc(b1),
            0x75 => self.write_direct(b1, b2),
            0x76..=0x7F => self.column_write(op, b1, pc)?,
            0x85 => {
                let v = self.read_direct(b1, pins, false);
                self.write_direct(b2, v);
            }
            0x86..=0x8F => {
                let v = self.column_src(op, pc)?;
                self.write_direct(b1, v);
            }
            0x90 => {
                self.sfr[idx(DPH)] = b1;
                self.sfr[idx(DPL)] = b2;
            }
            0xA6..=0xAF => {
                let v = self.read_direct(b1, pins, false);
                self.column_write(op, v, pc)?;
            }
            0xE5 => self.set_acc(self.read_direct(b1, pins, false)),
            0xE6..=0xEF => {
                let v = self.column_src(op, pc)?;
                self.set_acc(v);
            }
            0xF5 => self.write_direct(b1, self.acc()),
            0xF6..=0xFF => self.column_write(op, self.acc(), pc)?,
            0x83 => {
                let addr = self.pc.wrapping_add(self.acc() as u16);
                self.set_acc(self.code_read(addr, pc)?);
            }
            0x93 => {
                let addr = self.dptr().wrapping_add(self.acc() as u16);
                self.set_acc(self.code_read(addr, pc)?);
            }
            0xC0 => {
                let v = self.read_direct(b1, pins, false);
                self.push(v, pc)?;
            }
            0xD0 => {
                let v = self.pop(pc)?;
                self.write_direct(b1, v);
            }
            0xC5 => {
                let v = self.read_direct(b1, pins, false);
                let a = self.acc();
                self.write_direct(b1, a);
                self.set_acc(v);
            }
            0xC6..=0xCF => {
                let v = self.column_src(op, pc)?;
                let a = self.acc();
                self.column_write(op, a, pc)?;
                self.set_acc(v);
            }
            0xD6 | 0xD7 => {
                let addr = self.reg(op & 1);
                let v = self.iram_read(addr, pc)?;
                let a = self.acc();
                self.iram_write(addr, (v & 0xF0) | (a & 0x0F), pc)?;
                self.set_acc((a & 0xF0) | (v & 0x0F));
            }

            0xE0 | 0xE2 | 0xE3 | 0xF0 | 0xF2 | 0xF3 => {
                return Err(CpuError::ExternalMemory { pc });
            }
            _ => return Err(CpuError::Unimplemented { opcode: op, pc }),
        }
        Ok(())
    }
}
