//! Special function register and bit addresses.

pub const P0: u8 = 0x80;
pub const SP: u8 = 0x81;
pub const DPL: u8 = 0x82;
pub const DPH: u8 = 0x83;
pub const PCON: u8 = 0x87;
pub const TCON: u8 = 0x88;
pub const TMOD: u8 = 0x89;
pub const TL0: u8 = 0x8A;
pub const TL1: u8 = 0x8B;
pub const TH0: u8 = 0x8C;
pub const TH1: u8 = 0x8D;
pub const P1: u8 = 0x90;
pub const SCON: u8 = 0x98;
pub const SBUF: u8 = 0x99;
pub const P2: u8 = 0xA0;
pub const IE: u8 = 0xA8;
pub const P3: u8 = 0xB0;
pub const IP: u8 = 0xB8;
pub const PSW: u8 = 0xD0;
pub const ACC: u8 = 0xE0;
pub const B: u8 = 0xF0;

pub const PORTS: [u8; 4] = [P0, P1, P2, P3];

// PSW bits
pub const PSW_P: u8 = 0x01;
pub const PSW_OV: u8 = 0x04;
pub const PSW_RS0: u8 = 0x08;
pub const PSW_RS1: u8 = 0x10;
pub const PSW_AC: u8 = 0x40;
pub const PSW_CY: u8 = 0x80;

// TCON bits
pub const TCON_IE0: u8 = 0x02;
pub const TCON_IE1: u8 = 0x08;
pub const TCON_TR0: u8 = 0x10;
pub const TCON_TF0: u8 = 0x20;
pub const TCON_TR1: u8 = 0x40;
pub const TCON_TF1: u8 = 0x80;

// IE bits
pub const IE_EX0: u8 = 0x01;
pub const IE_ET0: u8 = 0x02;
pub const IE_EX1: u8 = 0x04;
pub const IE_ET1: u8 = 0x08;
pub const IE_EA: u8 = 0x80;

/// Names pre-seeded into the assembler symbol table: byte registers.
pub const SFR_NAMES: &[(&str, u8)] = &[
    ("P0", P0),
    ("SP", SP),
    ("DPL", DPL),
    ("DPH", DPH),
    ("PCON", PCON),
    ("TCON", TCON),
    ("TMOD", TMOD),
    ("TL0", TL0),
    ("TL1", TL1),
    ("TH0", TH0),
    ("TH1", TH1),
    ("P1", P1),
    ("SCON", SCON),
    ("SBUF", SBUF),
    ("P2", P2),
    ("IE", IE),
    ("P3", P3),
    ("IP", IP),
    ("PSW", PSW),
    ("ACC", ACC),
    ("B", B),
];

/// Named bits (bit addresses).
pub const BIT_NAMES: &[(&str, u8)] = &[
    ("IT0", 0x88),
    ("IE0", 0x89),
    ("IT1", 0x8A),
    ("IE1", 0x8B),
    ("TR0", 0x8C),
    ("TF0", 0x8D),
    ("TR1", 0x8E),
    ("TF1", 0x8F),
    ("RI", 0x98),
    ("TI", 0x99),
    ("EX0", 0xA8),
    ("ET0", 0xA9),
    ("EX1", 0xAA),
    ("ET1", 0xAB),
    ("ES", 0xAC),
    ("EA", 0xAF),
    ("PX0", 0xB8),
    ("PT0", 0xB9),
    ("PX1", 0xBA),
    ("PT1", 0xBB),
    ("PS", 0xBC),
    ("P", 0xD0),
    ("OV", 0xD2),
    ("RS0", 0xD3),
    ("RS1", 0xD4),
    ("F0", 0xD5),
    ("AC", 0xD6),
    ("CY", 0xD7),
];

/// Byte address and mask for a bit address.
pub fn bit_location(bit: u8) -> (u8, u8) {
    if bit < 0x80 {
        (0x20 + bit / 8, 1 << (bit % 8))
    } else {
        (bit & 0xF8, 1 << (bit & 7))
    }
}
