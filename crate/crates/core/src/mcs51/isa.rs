//! MCS-51 opcode map: mnemonic, operand pattern, encoded length and
//! machine-cycle cost for every assigned opcode.

use std::sync::OnceLock;

/// Operand pattern of one opcode slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    A,
    C,
    AB,
    Dptr,
    /// `@DPTR`
    AtDptr,
    /// `@A+DPTR`
    AtADptr,
    /// `@A+PC`
    AtAPc,
    /// `R0`..`R7`
    Reg(u8),
    /// `@R0` / `@R1`
    AtReg(u8),
    Direct,
    Imm8,
    Imm16,
    Bit,
    /// `/bit`
    NotBit,
    Rel,
    Addr11,
    Addr16,
}

impl Operand {
    /// Bytes this operand contributes after the opcode byte.
    pub fn encoded_bytes(self) -> u8 {
        match self {
            Operand::Direct
            | Operand::Imm8
            | Operand::Bit
            | Operand::NotBit
            | Operand::Rel
            | Operand::Addr11 => 1,
            Operand::Imm16 | Operand::Addr16 => 2,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpInfo {
    pub opcode: u8,
    pub mnemonic: &'static str,
    pub operands: Vec<Operand>,
    pub len: u8,
    pub cycles: u8,
}

impl OpInfo {
    /// `MOV direct,direct` stores the source byte before the destination.
    pub fn swapped_operand_bytes(&self) -> bool {
        self.opcode == 0x85
    }
}

/// Every mnemonic the table knows, upper case.
pub const MNEMONICS: &[&str] = &[
    "ACALL", "ADD", "ADDC", "AJMP", "ANL", "CJNE", "CLR", "CPL", "DA", "DEC", "DIV", "DJNZ", "INC",
    "JB", "JBC", "JC", "JMP", "JNB", "JNC", "JNZ", "JZ", "LCALL", "LJMP", "MOV", "MOVC", "MOVX",
    "MUL", "NOP", "ORL", "POP", "PUSH", "RET", "RETI", "RL", "RLC", "RR", "RRC", "SETB", "SJMP",
    "SUBB", "SWAP", "XCH", "XCHD", "XRL",
];

pub fn is_mnemonic(word: &str) -> bool {
    MNEMONICS.iter().any(|m| m.eq_ignore_ascii_case(word))
}

fn build(opcode: u8) -> Option<OpInfo> {
    use Operand::*;
    let lo = opcode & 0x0F;
    let hi = opcode >> 4;
    let rn = Reg(opcode & 7);
    let ri = AtReg(opcode & 1);

    // The x1 column alternates AJMP/ACALL with page bits in the opcode.
    if lo == 0x1 {
        let m = if hi & 1 == 0 { "AJMP" } else { "ACALL" };
        return Some(entry(opcode, m, vec![Addr11], 2));
    }

    // Columns 6..F share an arithmetic/logic row pattern for rows 0..F.
    let row_src = |base: &'static str, a_first: bool| -> Option<OpInfo> {
        let src = if lo >= 8 { rn } else { ri };
        let ops = if a_first { vec![A, src] } else { vec![src] };
        Some(entry(opcode, base, ops, 1))
    };

    match (hi, lo) {
        (0x0, 0x0) => Some(entry(opcode, "NOP", vec![], 1)),
        (0x0, 0x2) => Some(entry(opcode, "LJMP", vec![Addr16], 2)),
        (0x0, 0x3) => Some(entry(opcode, "RR", vec![A], 1)),
        (0x0, 0x4) => Some(entry(opcode, "INC", vec![A], 1)),
        (0x0, 0x5) => Some(entry(opcode, "INC", vec![Direct], 1)),
        (0x0, _) => row_src("INC", false),

        (0x1, 0x0) => Some(entry(opcode, "JBC", vec![Bit, Rel], 2)),
        (0x1, 0x2) => Some(entry(opcode, "LCALL", vec![Addr16], 2)),
        (0x1, 0x3) => Some(entry(opcode, "RRC", vec![A], 1)),
        (0x1, 0x4) => Some(entry(opcode, "DEC", vec![A], 1)),
        (0x1, 0x5) => Some(entry(opcode, "DEC", vec![Direct], 1)),
        (0x1, _) => row_src("DEC", false),

        (0x2, 0x0) => Some(entry(opcode, "JB", vec![Bit, Rel], 2)),
        (0x2, 0x2) => Some(entry(opcode, "RET", vec![], 2)),
        (0x2, 0x3) => Some(entry(opcode, "RL", vec![A], 1)),
        (0x2, 0x4) => Some(entry(opcode, "ADD", vec![A, Imm8], 1)),
        (0x2, 0x5) => Some(entry(opcode, "ADD", vec![A, Direct], 1)),
        (0x2, _) => row_src("ADD", true),

        (0x3, 0x0) => Some(entry(opcode, "JNB", vec![Bit, Rel], 2)),
        (0x3, 0x2) => Some(entry(opcode, "RETI", vec![], 2)),
        (0x3, 0x3) => Some(entry(opcode, "RLC", vec![A], 1)),
        (0x3, 0x4) => Some(entry(opcode, "ADDC", vec![A, Imm8], 1)),
        (0x3, 0x5) => Some(entry(opcode, "ADDC", vec![A, Direct], 1)),
        (0x3, _) => row_src("ADDC", true),

        (0x4, 0x0) => Some(entry(opcode, "JC", vec![Rel], 2)),
        (0x5, 0x0) => Some(entry(opcode, "JNC", vec![Rel], 2)),
        (0x6, 0x0) => Some(entry(opcode, "JZ", vec![Rel], 2)),
        (0x7, 0x0) => Some(entry(opcode, "JNZ", vec![Rel], 2)),
        (0x4..=0x6, _) => {
            let m = ["ORL", "ANL", "XRL"][(hi - 4) as usize];
            match lo {
                0x2 => Some(entry(opcode, m, vec![Direct, A], 1)),
                0x3 => Some(entry(opcode, m, vec![Direct, Imm8], 2)),
                0x4 => Some(entry(opcode, m, vec![A, Imm8], 1)),
                0x5 => Some(entry(opcode, m, vec![A, Direct], 1)),
                _ => row_src(m, true),
            }
        }

        (0x7, 0x2) => Some(entry(opcode, "ORL", vec![C, Bit], 2)),
        (0x7, 0x3) => Some(entry(opcode, "JMP", vec![AtADptr], 2)),
        (0x7, 0x4) => Some(entry(opcode, "MOV", vec![A, Imm8], 1)),
        (0x7, 0x5) => Some(entry(opcode, "MOV", vec![Direct, Imm8], 2)),
        (0x7, 0x6..=0x7) => Some(entry(opcode, "MOV", vec![ri, Imm8], 1)),
        (0x7, _) => Some(entry(opcode, "MOV", vec![rn, Imm8], 1)),

        (0x8, 0x0) => Some(entry(opcode, "SJMP", vec![Rel], 2)),
        (0x8, 0x2) => Some(entry(opcode, "ANL", vec![C, Bit], 2)),
        (0x8, 0x3) => Some(entry(opcode, "MOVC", vec![A, AtAPc], 2)),
        (0x8, 0x4) => Some(entry(opcode, "DIV", vec![AB], 4)),
        (0x8, 0x5) => Some(entry(opcode, "MOV", vec![Direct, Direct], 2)),
        (0x8, 0x6..=0x7) => Some(entry(opcode, "MOV", vec![Direct, ri], 2)),
        (0x8, _) => Some(entry(opcode, "MOV", vec![Direct, rn], 2)),

        (0x9, 0x0) => Some(entry(opcode, "MOV", vec![Dptr, Imm16], 2)),
        (0x9, 0x2) => Some(entry(opcode, "MOV", vec![Bit, C], 2)),
        (0x9, 0x3) => Some(entry(opcode, "MOVC", vec![A, AtADptr], 2)),
        (0x9, 0x4) => Some(entry(opcode, "SUBB", vec![A, Imm8], 1)),
        (0x9, 0x5) => Some(entry(opcode, "SUBB", vec![A, Direct], 1)),
        (0x9, _) => row_src("SUBB", true),

        (0xA, 0x0) => Some(entry(opcode, "ORL", vec![C, NotBit], 2)),
        (0xA, 0x2) => Some(entry(opcode, "MOV", vec![C, Bit], 1)),
        (0xA, 0x3) => Some(entry(opcode, "INC", vec![Dptr], 2)),
        (0xA, 0x4) => Some(entry(opcode, "MUL", vec![AB], 4)),
        (0xA, 0x5) => None,
        (0xA, 0x6..=0x7) => Some(entry(opcode, "MOV", vec![ri, Direct], 2)),
        (0xA, _) => Some(entry(opcode, "MOV", vec![rn, Direct], 2)),

        (0xB, 0x0) => Some(entry(opcode, "ANL", vec![C, NotBit], 2)),
        (0xB, 0x2) => Some(entry(opcode, "CPL", vec![Bit], 1)),
        (0xB, 0x3) => Some(entry(opcode, "CPL", vec![C], 1)),
        (0xB, 0x4) => Some(entry(opcode, "CJNE", vec![A, Imm8, Rel], 2)),
        (0xB, 0x5) => Some(entry(opcode, "CJNE", vec![A, Direct, Rel], 2)),
        (0xB, 0x6..=0x7) => Some(entry(opcode, "CJNE", vec![ri, Imm8, Rel], 2)),
        (0xB, _) => Some(entry(opcode, "CJNE", vec![rn, Imm8, Rel], 2)),

        (0xC, 0x0) => Some(entry(opcode, "PUSH", vec![Direct], 2)),
        (0xC, 0x2) => Some(entry(opcode, "CLR", vec![Bit], 1)),
        (0xC, 0x3) => Some(entry(opcode, "CLR", vec![C], 1)),
        (0xC, 0x4) => Some(entry(opcode, "SWAP", vec![A], 1)),
        (0xC, 0x5) => Some(entry(opcode, "XCH", vec![A, Direct], 1)),
        (0xC, _) => row_src("XCH", true),

        (0xD, 0x0) => Some(entry(opcode, "POP", vec![Direct], 2)),
        (0xD, 0x2) => Some(entry(opcode, "SETB", vec![Bit], 1)),
        (0xD, 0x3) => Some(entry(opcode, "SETB", vec![C], 1)),
        (0xD, 0x4) => Some(entry(opcode, "DA", vec![A], 1)),
        (0xD, 0x5) => Some(entry(opcode, "DJNZ", vec![Direct, Rel], 2)),
        (0xD, 0x6..=0x7) => Some(entry(opcode, "XCHD", vec![A, ri], 1)),
        (0xD, _) => Some(entry(opcode, "DJNZ", vec![rn, Rel], 2)),

        (0xE, 0x0) => Some(entry(opcode, "MOVX", vec![A, AtDptr], 2)),
        (0xE, 0x2..=0x3) => Some(entry(opcode, "MOVX", vec![A, AtReg(opcode & 1)], 2)),
        (0xE, 0x4) => Some(entry(opcode, "CLR", vec![A], 1)),
        (0xE, 0x5) => Some(entry(opcode, "MOV", vec![A, Direct], 1)),
        (0xE, _) => row_src("MOV", true),

        (0xF, 0x0) => Some(entry(opcode, "MOVX", vec![AtDptr, A], 2)),
        (0xF, 0x2..=0x3) => Some(entry(opcode, "MOVX", vec![AtReg(opcode & 1), A], 2)),
        (0xF, 0x4) => Some(entry(opcode, "CPL", vec![A], 1)),
        (0xF, 0x5) => Some(entry(opcode, "MOV", vec![Direct, A], 1)),
        (0xF, 0x6..=0x7) => Some(entry(opcode, "MOV", vec![ri, A], 1)),
        (0xF, _) => Some(entry(opcode, "MOV", vec![rn, A], 1)),

        _ => None,
    }
}

fn entry(opcode: u8, mnemonic: &'static str, operands: Vec<Operand>, cycles: u8) -> OpInfo {
    let len = 1 + operands.iter().map(|o| o.encoded_bytes()).sum::<u8>();
    OpInfo {
        opcode,
        mnemonic,
        operands,
        len,
        cycles,
    }
}

fn table() -> &'static [Option<OpInfo>] {
    static TABLE: OnceLock<Vec<Option<OpInfo>>> = OnceLock::new();
    TABLE.get_or_init(|| (0..=255u8).map(build).collect())
}

/// Table entry for `opcode`, or `None` for the unassigned slot 0xA5.
pub fn op_info(opcode: u8) -> Option<&'static OpInfo> {
    table()[opcode as usize].as_ref()
}

/// All entries for one mnemonic, in opcode order.
pub fn by_mnemonic(mnemonic: &str) -> impl Iterator<Item = &'static OpInfo> + '_ {
    table()
        .iter()
        .flatten()
        .filter(move |i| i.mnemonic.eq_ignore_ascii_case(mnemonic))
}

/// Operand value as decoded from the instruction bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arg {
    /// Register-style operand with no encoded byte.
    Implied(Operand),
    Direct(u8),
    Imm8(u8),
    Imm16(u16),
    Bit(u8),
    NotBit(u8),
    /// Absolute branch target.
    Target(u16),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub info: &'static OpInfo,
    pub addr: u16,
    pub args: Vec<Arg>,
}

/// Decodes the instruction at `addr` from `bytes` (bytes[0] is the opcode).
/// Returns `None` for 0xA5 or when `bytes` is shorter than the encoding.
pub fn decode(addr: u16, bytes: &[u8]) -> Option<Instruction> {
    let info = op_info(*bytes.first()?)?;
    if bytes.len() < info.len as usize {
        return None;
    }
    let next = addr.wrapping_add(info.len as u16);
    let mut cursor = 1usize;
    let mut raw: Vec<(Operand, usize)> = Vec::with_capacity(3);
    for &op in &info.operands {
        raw.push((op, cursor));
        cursor += op.encoded_bytes() as usize;
    }
    if info.swapped_operand_bytes() {
        raw[0].1 = 2;
        raw[1].1 = 1;
    }
    let args = raw
        .into_iter()
        .map(|(op, at)| match op {
            Operand::Direct => Arg::Direct(bytes[at]),
            Operand::Imm8 => Arg::Imm8(bytes[at]),
            Operand::Imm16 => Arg::Imm16(u16::from_be_bytes([bytes[at], bytes[at + 1]])),
            Operand::Bit => Arg::Bit(bytes[at]),
            Operand::NotBit => Arg::NotBit(bytes[at]),
            Operand::Rel => Arg::Target(next.wrapping_add(bytes[at] as i8 as i16 as u16)),
            Operand::Addr11 => {
                let page = ((info.opcode as u16) >> 5) << 8;
                Arg::Target((next & 0xF800) | page | bytes[at] as u16)
            }
            Operand::Addr16 => Arg::Target(u16::from_be_bytes([bytes[at], bytes[at + 1]])),
            other => Arg::Implied(other),
        })
        .collect();
    Some(Instruction { info, addr, args })
}
