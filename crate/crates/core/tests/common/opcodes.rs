//! Standard MCS-51 opcode map: bytes and machine cycles per opcode,
//! transcribed row by row (high nibble) from the Intel instruction table.
//! `--` marks the single unassigned opcode.

const GRID: [&str; 16] = [
    // x0 x1 x2 x3 x4 x5 x6 x7 x8 x9 xA xB xC xD xE xF
    "11 22 32 11 11 21 11 11 11 11 11 11 11 11 11 11", // 0x NOP AJMP LJMP RR INC...
    "32 22 32 11 11 21 11 11 11 11 11 11 11 11 11 11", // 1x JBC ACALL LCALL RRC DEC...
    "32 22 12 11 21 21 11 11 11 11 11 11 11 11 11 11", // 2x JB AJMP RET RL ADD...
    "32 22 12 11 21 21 11 11 11 11 11 11 11 11 11 11", // 3x JNB ACALL RETI RLC ADDC...
    "22 22 21 32 21 21 11 11 11 11 11 11 11 11 11 11", // 4x JC AJMP ORL...
    "22 22 21 32 21 21 11 11 11 11 11 11 11 11 11 11", // 5x JNC ACALL ANL...
    "22 22 21 32 21 21 11 11 11 11 11 11 11 11 11 11", // 6x JZ AJMP XRL...
    "22 22 22 12 21 32 21 21 21 21 21 21 21 21 21 21", // 7x JNZ ACALL ORL C JMP@ MOV #...
    "22 22 22 12 14 32 22 22 22 22 22 22 22 22 22 22", // 8x SJMP AJMP ANL C MOVC DIV MOV dir...
    "32 22 22 12 21 21 11 11 11 11 11 11 11 11 11 11", // 9x MOV DPTR ACALL MOV bit MOVC SUBB...
    "22 22 21 12 14 -- 22 22 22 22 22 22 22 22 22 22", // Ax ORL C/ AJMP MOV C INC DPTR MUL ...
    "22 22 21 11 32 32 32 32 32 32 32 32 32 32 32 32", // Bx ANL C/ ACALL CPL CPL CJNE...
    "22 22 21 11 11 21 11 11 11 11 11 11 11 11 11 11", // Cx PUSH AJMP CLR CLR SWAP XCH...
    "22 22 21 11 11 32 11 11 22 22 22 22 22 22 22 22", // Dx POP ACALL SETB SETB DA DJNZ XCHD DJNZ Rn
    "12 22 12 12 11 21 11 11 11 11 11 11 11 11 11 11", // Ex MOVX AJMP MOVX MOVX CLR MOV A...
    "12 22 12 12 11 21 11 11 11 11 11 11 11 11 11 11", // Fx MOVX ACALL MOVX MOVX CPL MOV dir,A...
];

/// (length, cycles) for `opcode`, `None` for 0xA5.
pub fn entry(opcode: u8) -> Option<(u8, u8)> {
    let row = GRID[(opcode >> 4) as usize];
    let cell = row.split_whitespace().nth((opcode & 0x0F) as usize)?;
    let b = cell.as_bytes();
    if b[0] == b'-' {
        return None;
    }
    Some((b[0] - b'0', b[1] - b'0'))
}

#[allow(dead_code)]
pub fn length(opcode: u8) -> u8 {
    entry(opcode).map_or(1, |e| e.0)
}
