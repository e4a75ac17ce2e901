#![allow(dead_code)]

pub mod gen;
pub mod opcodes;
pub mod oracle;
