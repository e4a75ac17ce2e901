//! Reference MCS-51 interpreter used only as a test oracle. It keeps the
//! whole 256-byte direct space in one array and has no timers, interrupts
//! or external pins (every port pin reads high).

use super::opcodes;

const ACC: usize = 0xE0;
const B: usize = 0xF0;
const PSW: usize = 0xD0;
const SP: usize = 0x81;
const DPL: usize = 0x82;
const DPH: usize = 0x83;

const CY: u8 = 0x80;
const AC: u8 = 0x40;
const OV: u8 = 0x04;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    Iram,
    Pc,
    CodeRead,
    Movx,
    Unassigned,
}

#[derive(Clone)]
pub struct Oracle {
    /// 0x00..0x80 internal RAM, 0x80..0x100 SFRs.
    pub mem: [u8; 256],
    pub pc: u16,
    pub cycles: u64,
    pub code: Vec<u8>,
}

enum Loc {
    Acc,
    Direct(u8),
    Indirect(u8),
    Imm(u8),
}

impl Oracle {
    pub fn new(code: &[u8]) -> Self {
        let mut mem = [0u8; 256];
        mem[SP] = 0x07;
        for p in [0x80, 0x90, 0xA0, 0xB0] {
            mem[p] = 0xFF;
        }
        let mut rom = vec![0u8; 4096];
        rom[..code.len()].copy_from_slice(code);
        Oracle {
            mem,
            pc: 0,
            cycles: 0,
            code: rom,
        }
    }

    pub fn iram(&self) -> &[u8] {
        &self.mem[..128]
    }

    pub fn sfr(&self) -> &[u8] {
        &self.mem[128..]
    }

    fn a(&self) -> u8 {
        self.mem[ACC]
    }

    fn flag(&self, f: u8) -> bool {
        self.mem[PSW] & f != 0
    }

    fn set(&mut self, f: u8, on: bool) {
        if on {
            self.mem[PSW] |= f
        } else {
            self.mem[PSW] &= !f
        }
    }

    fn r_addr(&self, n: u8) -> usize {
        ((self.mem[PSW] >> 3 & 3) * 8 + n) as usize
    }

    fn r(&self, n: u8) -> u8 {
        self.mem[self.r_addr(n)]
    }

    fn indirect(&self, n: u8) -> Result<u8, Fault> {
        let a = self.r(n);
        if a >= 0x80 {
            Err(Fault::Iram)
        } else {
            Ok(a)
        }
    }

    fn bit_addr(bit: u8) -> (usize, u8) {
        if bit < 0x80 {
            (0x20 + (bit >> 3) as usize, 1 << (bit & 7))
        } else {
            ((bit & 0xF8) as usize, 1 << (bit & 7))
        }
    }

    fn get_bit(&self, bit: u8) -> bool {
        let (a, m) = Self::bit_addr(bit);
        self.mem[a] & m != 0
    }

    fn put_bit(&mut self, bit: u8, v: bool) {
        let (a, m) = Self::bit_addr(bit);
        if v {
            self.mem[a] |= m
        } else {
            self.mem[a] &= !m
        }
    }

    fn load(&self, l: &Loc) -> u8 {
        match *l {
            Loc::Acc => self.a(),
            Loc::Direct(a) | Loc::Indirect(a) => self.mem[a as usize],
            Loc::Imm(v) => v,
        }
    }

    fn store(&mut self, l: &Loc, v: u8) {
        match *l {
            Loc::Acc => self.mem[ACC] = v,
            Loc::Direct(a) | Loc::Indirect(a) => self.mem[a as usize] = v,
            Loc::Imm(_) => unreachable!(),
        }
    }

    /// Operand named by the low nibble for the regular rows:
    /// 4 = #imm (or A), 5 = direct, 6/7 = @R0/@R1, 8..F = R0..R7.
    fn column(&self, op: u8, b1: u8, nibble4_is_acc: bool) -> Result<Loc, Fault> {
        Ok(match op & 0x0F {
            4 if nibble4_is_acc => Loc::Acc,
            4 => Loc::Imm(b1),
            5 => Loc::Direct(b1),
            6 | 7 => Loc::Indirect(self.indirect(op & 1)?),
            n => Loc::Direct(self.r_addr(n - 8) as u8),
        })
    }

    fn push(&mut self, v: u8) -> Result<(), Fault> {
        let sp = self.mem[SP].wrapping_add(1);
        if sp >= 0x80 {
            return Err(Fault::Iram);
        }
        self.mem[sp as usize] = v;
        self.mem[SP] = sp;
        Ok(())
    }

    fn pop(&mut self) -> Result<u8, Fault> {
        let sp = self.mem[SP];
        if sp >= 0x80 {
            return Err(Fault::Iram);
        }
        self.mem[SP] = sp.wrapping_sub(1);
        Ok(self.mem[sp as usize])
    }

    fn rel(&mut self, off: u8) {
        self.pc = (self.pc as i32 + off as i8 as i32) as u16;
    }

    fn addc(&mut self, v: u8, c: u8) {
        let a = self.a();
        let r = a as u32 + v as u32 + c as u32;
        let lo = (a & 15) + (v & 15) + c;
        let signed = a as i8 as i32 + v as i8 as i32 + c as i32;
        self.set(CY, r > 255);
        self.set(AC, lo > 15);
        self.set(OV, !(-128..=127).contains(&signed));
        self.mem[ACC] = r as u8;
    }

    fn subb(&mut self, v: u8) {
        let a = self.a();
        let c = self.flag(CY) as i32;
        let r = a as i32 - v as i32 - c;
        let signed = a as i8 as i32 - v as i8 as i32 - c;
        self.set(CY, r < 0);
        self.set(AC, ((a & 15) as i32) - ((v & 15) as i32) - c < 0);
        self.set(OV, !(-128..=127).contains(&signed));
        self.mem[ACC] = r as u8;
    }

    fn call(&mut self, target: u16) -> Result<(), Fault> {
        let [hi, lo] = self.pc.to_be_bytes();
        self.push(lo)?;
        self.push(hi)?;
        self.pc = target;
        Ok(())
    }

    pub fn step(&mut self) -> Result<(), Fault> {
        let start = self.pc;
        let r = self.exec();
        if r.is_err() {
            self.pc = start;
        }
        r
    }

    fn exec(&mut self) -> Result<(), Fault> {
        if self.pc >= 4096 {
            return Err(Fault::Pc);
        }
        let op = self.code[self.pc as usize];
        let (len, cyc) = opcodes::entry(op).ok_or(Fault::Unassigned)?;
        if self.pc as usize + len as usize > 4096 {
            return Err(Fault::Pc);
        }
        let at = self.pc as usize;
        let b1 = if len > 1 { self.code[at + 1] } else { 0 };
        let b2 = if len > 2 { self.code[at + 2] } else { 0 };
        self.pc += len as u16;
        let hi = op >> 4;
        let lo = op & 0x0F;

        if lo == 1 {
            let target = (self.pc & 0xF800) | ((op as u16 & 0xE0) << 3) | b1 as u16;
            if hi & 1 == 0 {
                self.pc = target;
            } else {
                self.call(target)?;
            }
        } else if lo >= 4 && matches!(hi, 0x0..=0x6 | 0x9) {
            self.regular(op, b1)?;
        } else {
            self.special(op, b1, b2)?;
        }

        self.cycles += cyc as u64;
        let p = self.mem[ACC].count_ones() as u8 & 1;
        self.mem[PSW] = (self.mem[PSW] & !1) | p;
        Ok(())
    }

    /// Rows 0..6 and 9 from column 4 on: INC, DEC, ADD, ADDC, ORL, ANL, XRL, SUBB.
    fn regular(&mut self, op: u8, b1: u8) -> Result<(), Fault> {
        let hi = op >> 4;
        match hi {
            0x0 | 0x1 => {
                let loc = self.column(op, b1, true)?;
                let v = self.load(&loc);
                let v = if hi == 0 {
                    v.wrapping_add(1)
                } else {
                    v.wrapping_sub(1)
                };
                self.store(&loc, v);
            }
            0x2 | 0x3 => {
                let v = self.load(&self.column(op, b1, false)?);
                let c = if hi == 3 { self.flag(CY) as u8 } else { 0 };
                self.addc(v, c);
            }
            0x9 => {
                let v = self.load(&self.column(op, b1, false)?);
                self.subb(v);
            }
            _ => {
                let v = self.load(&self.column(op, b1, false)?);
                let a = self.a();
                self.mem[ACC] = match hi {
                    4 => a | v,
                    5 => a & v,
                    _ => a ^ v,
                };
            }
        }
        Ok(())
    }

    fn special(&mut self, op: u8, b1: u8, b2: u8) -> Result<(), Fault> {
        let logic = |hi: u8, x: u8, y: u8| match hi {
            4 => x | y,
            5 => x & y,
            _ => x ^ y,
        };
        match op {
            0x00 => {}
            0x02 => self.pc = u16::from_be_bytes([b1, b2]),
            0x12 => self.call(u16::from_be_bytes([b1, b2]))?,
            0x22 | 0x32 => {
                let h = self.pop()?;
                let l = self.pop()?;
                self.pc = u16::from_be_bytes([h, l]);
            }
            0x03 => self.mem[ACC] = self.a() >> 1 | self.a() << 7,
            0x23 => self.mem[ACC] = self.a() << 1 | self.a() >> 7,
            0x13 => {
                let a = self.a();
                let c = self.flag(CY) as u8;
                self.set(CY, a & 1 == 1);
                self.mem[ACC] = a >> 1 | c << 7;
            }
            0x33 => {
                let a = self.a();
                let c = self.flag(CY) as u8;
                self.set(CY, a >> 7 == 1);
                self.mem[ACC] = a << 1 | c;
            }
            0x10 | 0x20 | 0x30 => {
                let v = self.get_bit(b1);
                if op == 0x10 && v {
                    self.put_bit(b1, false);
                }
                if v == (op != 0x30) {
                    self.rel(b2);
                }
            }
            0x40 | 0x50 => {
                if self.flag(CY) == (op == 0x40) {
                    self.rel(b1)
                }
            }
            0x60 | 0x70 => {
                if (self.a() == 0) == (op == 0x60) {
                    self.rel(b1)
                }
            }
            0x80 => self.rel(b1),
            0x42 | 0x52 | 0x62 => {
                let v = logic(op >> 4, self.mem[b1 as usize], self.a());
                self.mem[b1 as usize] = v;
            }
            0x43 | 0x53 | 0x63 => {
                let v = logic(op >> 4, self.mem[b1 as usize], b2);
                self.mem[b1 as usize] = v;
            }
            0x72 => {
                let v = self.flag(CY) || self.get_bit(b1);
                self.set(CY, v)
            }
            0xA0 => {
                let v = self.flag(CY) || !self.get_bit(b1);
                self.set(CY, v)
            }
            0x82 => {
                let v = self.flag(CY) && self.get_bit(b1);
                self.set(CY, v)
            }
            0xB0 => {
                let v = self.flag(CY) && !self.get_bit(b1);
                self.set(CY, v)
            }
            0x73 => {
                let d = u16::from_be_bytes([self.mem[DPH], self.mem[DPL]]);
                self.pc = d.wrapping_add(self.a() as u16);
            }
            0x83 | 0x93 => {
                let base = if op == 0x83 {
                    self.pc
                } else {
                    u16::from_be_bytes([self.mem[DPH], self.mem[DPL]])
                };
                let addr = base.wrapping_add(self.a() as u16);
                if addr >= 4096 {
                    return Err(Fault::CodeRead);
                }
                self.mem[ACC] = self.code[addr as usize];
            }
            0x74 => self.mem[ACC] = b1,
            0x75 => self.mem[b1 as usize] = b2,
            0x76..=0x7F => {
                let loc = self.column(op, 0, false)?;
                self.store(&loc, b1);
            }
            0x84 => {
                let (a, b) = (self.a(), self.mem[B]);
                self.set(CY, false);
                self.set(OV, b == 0);
                if let (Some(q), Some(r)) = (a.checked_div(b), a.checked_rem(b)) {
                    self.mem[ACC] = q;
                    self.mem[B] = r;
                }
            }
            0xA4 => {
                let p = self.a() as u16 * self.mem[B] as u16;
                self.mem[ACC] = p as u8;
                self.mem[B] = (p >> 8) as u8;
                self.set(CY, false);
                self.set(OV, p >> 8 != 0);
            }
            0x85 => self.mem[b2 as usize] = self.mem[b1 as usize],
            0x86..=0x8F => {
                let v = self.load(&self.column(op, 0, false)?);
                self.mem[b1 as usize] = v;
            }
            0xA6..=0xAF => {
                let loc = self.column(op, 0, false)?;
                let v = self.mem[b1 as usize];
                self.store(&loc, v);
            }
            0x90 => {
                self.mem[DPH] = b1;
                self.mem[DPL] = b2;
            }
            0xA3 => {
                let d = u16::from_be_bytes([self.mem[DPH], self.mem[DPL]]).wrapping_add(1);
                self.mem[DPH] = (d >> 8) as u8;
                self.mem[DPL] = d as u8;
            }
            0x92 => {
                let c = self.flag(CY);
                self.put_bit(b1, c)
            }
            0xA2 => {
                let v = self.get_bit(b1);
                self.set(CY, v)
            }
            0xB2 => {
                let v = self.get_bit(b1);
                self.put_bit(b1, !v)
            }
            0xC2 => self.put_bit(b1, false),
            0xD2 => self.put_bit(b1, true),
            0xB3 => {
                let c = self.flag(CY);
                self.set(CY, !c)
            }
            0xC3 => self.set(CY, false),
            0xD3 => self.set(CY, true),
            0xB4..=0xBF => {
                let (x, y) = match op {
                    0xB4 => (self.a(), b1),
                    0xB5 => (self.a(), self.mem[b1 as usize]),
                    _ => (self.load(&self.column(op, 0, false)?), b1),
                };
                self.set(CY, x < y);
                if x != y {
                    self.rel(b2);
                }
            }
            0xC0 => {
                let v = self.mem[b1 as usize];
                self.push(v)?
            }
            0xD0 => {
                let v = self.pop()?;
                self.mem[b1 as usize] = v;
            }
            0xC4 => self.mem[ACC] = self.a().rotate_right(4),
            0xC5..=0xCF => {
                let loc = self.column(op, b1, false)?;
                let v = self.load(&loc);
                let a = self.a();
                self.store(&loc, a);
                self.mem[ACC] = v;
            }
            0xD4 => {
                let mut a = self.a() as u32;
                if a & 15 > 9 || self.flag(AC) {
                    a += 6;
                }
                if a > 0x9F || self.flag(CY) || (a & 0xF0) > 0x90 {
                    a += 0x60;
                }
                if a > 0xFF {
                    self.set(CY, true);
                }
                self.mem[ACC] = a as u8;
            }
            0xD5 => {
                let v = self.mem[b1 as usize].wrapping_sub(1);
                self.mem[b1 as usize] = v;
                if v != 0 {
                    self.rel(b2);
                }
            }
            0xD6 | 0xD7 => {
                let p = self.indirect(op & 1)? as usize;
                let (a, m) = (self.a(), self.mem[p]);
                self.mem[p] = (m & 0xF0) | (a & 0x0F);
                self.mem[ACC] = (a & 0xF0) | (m & 0x0F);
            }
            0xD8..=0xDF => {
                let r = self.r_addr(op & 7);
                self.mem[r] = self.mem[r].wrapping_sub(1);
                if self.mem[r] != 0 {
                    self.rel(b1);
                }
            }
            0xE4 => self.mem[ACC] = 0,
            0xF4 => self.mem[ACC] = !self.a(),
            0xE5..=0xEF => {
                let v = self.load(&self.column(op, b1, false)?);
                self.mem[ACC] = v;
            }
            0xF5..=0xFF => {
                let loc = self.column(op, b1, false)?;
                let a = self.a();
                self.store(&loc, a);
            }
            0xE0 | 0xE2 | 0xE3 | 0xF0 | 0xF2 | 0xF3 => return Err(Fault::Movx),
            _ => return Err(Fault::Unassigned),
        }
        Ok(())
    }
}
