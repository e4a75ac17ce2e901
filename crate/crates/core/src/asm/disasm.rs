use std::fmt::Write as _;

use super::image::ObjectImage;
use crate::mcs51::isa::{self, Arg, Instruction, Operand};

/// Canonical text of one decoded instruction, e.g. `MOV A,#0x55`.
pub fn format_instruction(insn: &Instruction) -> String {
    let ops: Vec<String> = insn
        .args
        .iter()
        .map(|arg| match *arg {
            Arg::Implied(op) => match op {
                Operand::A => "A".into(),
                Operand::C => "C".into(),
                Operand::AB => "AB".into(),
                Operand::Dptr => "DPTR".into(),
                Operand::AtDptr => "@DPTR".into(),
                Operand::AtADptr => "@A+DPTR".into(),
                Operand::AtAPc => "@A+PC".into(),
                Operand::Reg(n) => format!("R{n}"),
                Operand::AtReg(n) => format!("@R{n}"),
                other => unreachable!("{other:?} always carries a value"),
            },
            Arg::Direct(v) | Arg::Bit(v) => format!("0x{v:02X}"),
            Arg::Imm8(v) => format!("#0x{v:02X}"),
            Arg::Imm16(v) => format!("#0x{v:04X}"),
            Arg::NotBit(v) => format!("/0x{v:02X}"),
            Arg::Target(t) => format!("0x{t:04X}"),
        })
        .collect();
    if ops.is_empty() {
        insn.info.mnemonic.to_string()
    } else {
        format!("{} {}", insn.info.mnemonic, ops.join(","))
    }
}

/// Linear-sweep disassembly. Each contiguous run starts with an `ORG`; bytes
/// that do not decode (0xA5, or an instruction cut off by the end of a run)
/// become `DB` lines. Re-assembling the output reproduces `image`.
pub fn disassemble(image: &ObjectImage) -> String {
    let mut out = String::new();
    for (start, data) in image.runs() {
        let _ = writeln!(out, "        ORG 0x{start:04X}");
        let mut i = 0;
        while i < data.len() {
            let addr = start.wrapping_add(i as u16);
            match isa::decode(addr, &data[i..]) {
                Some(insn) => {
                    let _ = writeln!(out, "        {}", format_instruction(&insn));
                    i += insn.info.len as usize;
                }
                None => {
                    let _ = writeln!(out, "        DB 0x{:02X}", data[i]);
                    i += 1;
                }
            }
        }
    }
    out
}
