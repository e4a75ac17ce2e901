//! MCS-51 toolchain: two-pass assembler, Intel HEX reader/writer and a
//! linear-sweep disassembler whose output re-assembles byte for byte.

mod assembler;
mod disasm;
mod hex;
mod image;
pub mod lexer;

pub use assembler::{assemble, AsmError, Assembly, Symbol, SymbolOrigin, SymbolTable};
pub use disasm::{disassemble, format_instruction};
pub use hex::{emit_hex, parse_hex, HexError, EOF_RECORD};
pub use image::{Collision, ObjectImage};
pub use lexer::{tokenize, LexError, Token, TokenKind};
