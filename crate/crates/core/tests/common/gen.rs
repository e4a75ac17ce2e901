//! Random programs over the emulator's instruction set.

use rand::seq::SliceRandom;
use rand::Rng;
use wiperbench::mcs51::isa::{self, Operand};

/// Direct addresses a random program may touch: all of internal RAM plus
/// the ports and the plain data SFRs. Timer, interrupt and stack-pointer
/// registers stay out so runs remain free of interrupts.
pub fn direct_addr(rng: &mut impl Rng) -> u8 {
    const SFRS: [u8; 9] = [0x80, 0x90, 0xA0, 0xB0, 0xD0, 0xE0, 0xF0, 0x82, 0x83];
    if rng.gen_bool(0.7) {
        rng.gen_range(0..0x80)
    } else {
        *SFRS.choose(rng).unwrap()
    }
}

pub fn bit_addr(rng: &mut impl Rng) -> u8 {
    const BYTES: [u8; 7] = [0x80, 0x90, 0xA0, 0xB0, 0xD0, 0xE0, 0xF0];
    if rng.gen_bool(0.6) {
        rng.gen_range(0..0x80)
    } else {
        BYTES.choose(rng).unwrap() | rng.gen_range(0..8)
    }
}

/// Opcodes eligible for random programs: everything decodable except
/// MOVX and the page-1..7 AJMP/ACALL forms.
pub fn eligible_opcodes() -> Vec<u8> {
    (0..=255u8)
        .filter(|&op| isa::op_info(op).is_some())
        .filter(|op| ![0xE0, 0xE2, 0xE3, 0xF0, 0xF2, 0xF3].contains(op))
        .filter(|&op| op & 0x1F != 0x01 && op & 0x1F != 0x11 || op < 0x20)
        .collect()
}

/// `n` random instructions followed by `SJMP $`. Returns the bytes and the
/// address of the final `SJMP`.
pub fn program(rng: &mut impl Rng, n: usize, ops: &[u8]) -> (Vec<u8>, u16) {
    let mut insns: Vec<(u8, Vec<Operand>)> = Vec::with_capacity(n);
    for _ in 0..n {
        let op = *ops.choose(rng).unwrap();
        insns.push((op, isa::op_info(op).unwrap().operands.clone()));
    }
    let size: usize = insns
        .iter()
        .map(|(op, _)| isa::op_info(*op).unwrap().len as usize)
        .sum::<usize>()
        + 2;
    let mut code = Vec::with_capacity(size);
    for (op, operands) in insns {
        let mut bytes = vec![op];
        for kind in operands {
            match kind {
                Operand::Direct => bytes.push(direct_addr(rng)),
                Operand::Bit | Operand::NotBit => bytes.push(bit_addr(rng)),
                Operand::Imm8 => bytes.push(rng.gen()),
                Operand::Imm16 => {
                    let v: u16 = if rng.gen_bool(0.5) {
                        rng.gen_range(0..size as u16)
                    } else {
                        rng.gen()
                    };
                    bytes.extend(v.to_be_bytes());
                }
                Operand::Rel => bytes.push(rng.gen_range(-12i8..=12) as u8),
                Operand::Addr11 => bytes.push(rng.gen_range(0..size.min(256)) as u8),
                Operand::Addr16 => bytes.extend((rng.gen_range(0..size) as u16).to_be_bytes()),
                _ => {}
            }
        }
        if isa::op_info(op).unwrap().swapped_operand_bytes() {
            bytes.swap(1, 2);
        }
        code.extend(bytes);
    }
    let end = code.len() as u16;
    code.extend([0x80, 0xFE]);
    (code, end)
}
