//! Two-pass assembler: pass 1 sizes every statement and binds labels, pass 2
//! resolves operands and encodes bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::image::ObjectImage;
use super::lexer::{tokenize, Directive, LexError, Register, Token, TokenKind};
use crate::mcs51::isa::{self, OpInfo, Operand};
use crate::mcs51::{sfr, ROM_SIZE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsmError {
    #[error("{0}")]
    Lex(#[from] LexError),
    #[error("line {line}: unknown mnemonic `{name}`")]
    UnknownMnemonic { line: usize, name: String },
    #[error("line {line}: duplicate label `{name}` (first defined on line {first})")]
    DuplicateLabel {
        line: usize,
        name: String,
        first: usize,
    },
    #[error("line {line}: branch target out of range ({offset:+} bytes, limit -128..127)")]
    BranchOutOfRange { line: usize, offset: i64 },
    #[error("line {line}: AJMP/ACALL target 0x{target:04X} is outside the current 2 KB page")]
    PageOutOfRange { line: usize, target: u16 },
    #[error("line {line}: operands do not match any form of {mnemonic}")]
    OperandMismatch { line: usize, mnemonic: String },
    #[error("line {line}: undefined symbol `{name}`")]
    UndefinedSymbol { line: usize, name: String },
    #[error("line {line}: value {value} does not fit {what}")]
    ValueOutOfRange {
        line: usize,
        value: i64,
        what: &'static str,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: address 0x{addr:04X} already holds code")]
    Overlap { line: usize, addr: u16 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolOrigin {
    Builtin,
    Label,
    Equ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub value: u16,
    pub origin: SymbolOrigin,
    /// Defining source line; 0 for built-in names.
    pub line: usize,
}

/// Name → value. Names are stored upper-case; lookups are case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolTable {
    symbols: BTreeMap<String, Symbol>,
}

impl SymbolTable {
    /// SFR and SFR-bit names.
    pub fn with_builtins() -> Self {
        let mut t = SymbolTable::default();
        for &(name, addr) in sfr::SFR_NAMES.iter().chain(sfr::BIT_NAMES) {
            t.symbols.insert(
                name.to_string(),
                Symbol {
                    value: addr as u16,
                    origin: SymbolOrigin::Builtin,
                    line: 0,
                },
            );
        }
        t
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(&name.to_ascii_uppercase())
    }

    pub fn value(&self, name: &str) -> Option<u16> {
        self.get(name).map(|s| s.value)
    }

    /// User-defined symbols (labels and EQUs), sorted by name.
    pub fn user_symbols(&self) -> impl Iterator<Item = (&str, &Symbol)> {
        self.symbols
            .iter()
            .filter(|(_, s)| s.origin != SymbolOrigin::Builtin)
            .map(|(n, s)| (n.as_str(), s))
    }

    fn define(&mut self, name: &str, sym: Symbol) -> Result<Option<String>, AsmError> {
        let key = name.to_ascii_uppercase();
        match self.symbols.get(&key) {
            Some(prev) if prev.origin != SymbolOrigin::Builtin => Err(AsmError::DuplicateLabel {
                line: sym.line,
                name: key,
                first: prev.line,
            }),
            Some(_) => {
                let warning = format!("line {}: `{key}` shadows a built-in SFR name", sym.line);
                self.symbols.insert(key, sym);
                Ok(Some(warning))
            }
            None => {
                self.symbols.insert(key, sym);
                Ok(None)
            }
        }
    }
}

/// Output of a successful assembly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    pub image: ObjectImage,
    pub symbols: SymbolTable,
    pub listing: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Term {
    Num(i64),
    Sym(String),
    Here,
}

/// Sum of signed terms, optionally followed by `.bit`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Expr {
    terms: Vec<(bool, Term)>,
    bit: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum OperandSyntax {
    Reg(Register),
    AtReg(u8),
    AtDptr,
    AtADptr,
    AtAPc,
    Imm(Expr),
    NotBit(Expr),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Body {
    Empty,
    Org(Expr),
    Equ(String, Expr),
    Db(Vec<DbItem>),
    End,
    Insn {
        info: &'static OpInfo,
        operands: Vec<OperandSyntax>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum DbItem {
    Expr(Expr),
    Bytes(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Statement {
    line: usize,
    label: Option<String>,
    body: Body,
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn next(&mut self) -> Option<&'a TokenKind> {
        let t = self.toks.get(self.pos).map(|t| &t.kind);
        self.pos += 1;
        t
    }

    fn syntax(&self, msg: impl Into<String>) -> AsmError {
        AsmError::Syntax {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn term(&mut self) -> Result<Term, AsmError> {
        match self.next() {
            Some(TokenKind::Number(n)) => Ok(Term::Num(*n as i64)),
            Some(TokenKind::Ident(s)) => Ok(Term::Sym(s.clone())),
            Some(TokenKind::Dollar) => Ok(Term::Here),
            other => Err(self.syntax(format!("expected a value, found {}", describe(other)))),
        }
    }

    fn expr(&mut self) -> Result<Expr, AsmError> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.peek() == Some(&TokenKind::Minus) {
            self.pos += 1;
            negative = true;
        } else if self.peek() == Some(&TokenKind::Plus) {
            self.pos += 1;
        }
        terms.push((negative, self.term()?));
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.pos += 1;
                    terms.push((false, self.term()?));
                }
                Some(TokenKind::Minus) => {
                    self.pos += 1;
                    terms.push((true, self.term()?));
                }
                _ => break,
            }
        }
        let mut bit = None;
        if self.peek() == Some(&TokenKind::Dot) {
            self.pos += 1;
            match self.next() {
                Some(TokenKind::Number(n)) => bit = Some(*n),
                other => {
                    return Err(self.syntax(format!(
                        "expected a bit number after `.`, found {}",
                        describe(other)
                    )))
                }
            }
        }
        Ok(Expr { terms, bit })
    }

    fn operand(&mut self) -> Result<OperandSyntax, AsmError> {
        match self.peek() {
            Some(TokenKind::Register(r)) => {
                self.pos += 1;
                Ok(OperandSyntax::Reg(*r))
            }
            Some(TokenKind::At) => {
                self.pos += 1;
                match self.next() {
                    Some(TokenKind::Register(Register::R(n))) if *n < 2 => {
                        Ok(OperandSyntax::AtReg(*n))
                    }
                    Some(TokenKind::Register(Register::Dptr)) => Ok(OperandSyntax::AtDptr),
                    Some(TokenKind::Register(Register::A)) => {
                        if self.next() != Some(&TokenKind::Plus) {
                            return Err(self.syntax("expected `+` after `@A`"));
                        }
                        match self.next() {
                            Some(TokenKind::Register(Register::Dptr)) => Ok(OperandSyntax::AtADptr),
                            Some(TokenKind::Register(Register::Pc)) => Ok(OperandSyntax::AtAPc),
                            _ => Err(self.syntax("expected DPTR or PC after `@A+`")),
                        }
                    }
                    _ => Err(self.syntax("invalid indirect operand")),
                }
            }
            Some(TokenKind::Hash) => {
                self.pos += 1;
                Ok(OperandSyntax::Imm(self.expr()?))
            }
            Some(TokenKind::Slash) => {
                self.pos += 1;
                Ok(OperandSyntax::NotBit(self.expr()?))
            }
            _ => Ok(OperandSyntax::Expr(self.expr()?)),
        }
    }

    fn operand_list(&mut self) -> Result<Vec<OperandSyntax>, AsmError> {
        let mut ops = Vec::new();
        if self.at_end() {
            return Ok(ops);
        }
        loop {
            ops.push(self.operand()?);
            match self.next() {
                None => return Ok(ops),
                Some(TokenKind::Comma) => continue,
                Some(other) => {
                    return Err(self.syntax(format!("unexpected {}", describe(Some(other)))))
                }
            }
        }
    }
}

fn describe(tok: Option<&TokenKind>) -> String {
    match tok {
        None => "end of line".into(),
        Some(TokenKind::Label(l)) => format!("label `{l}:`"),
        Some(TokenKind::Mnemonic(m)) => format!("mnemonic `{m}`"),
        Some(TokenKind::Directive(d)) => format!("directive {d:?}"),
        Some(TokenKind::Register(r)) => format!("register {r:?}"),
        Some(TokenKind::Ident(s)) => format!("`{s}`"),
        Some(TokenKind::Number(n)) => format!("number {n}"),
        Some(TokenKind::Str(_)) => "string".into(),
        Some(other) => format!("{other:?}"),
    }
}

fn syntax_matches(syn: &OperandSyntax, pat: Operand) -> bool {
    use OperandSyntax as S;
    match (syn, pat) {
        (S::Reg(Register::A), Operand::A) => true,
        (S::Reg(Register::C), Operand::C) => true,
        (S::Reg(Register::AB), Operand::AB) => true,
        (S::Reg(Register::Dptr), Operand::Dptr) => true,
        (S::Reg(Register::R(n)), Operand::Reg(m)) => *n == m,
        (S::AtReg(n), Operand::AtReg(m)) => *n == m,
        (S::AtDptr, Operand::AtDptr) => true,
        (S::AtADptr, Operand::AtADptr) => true,
        (S::AtAPc, Operand::AtAPc) => true,
        (S::Imm(_), Operand::Imm8 | Operand::Imm16) => true,
        (S::NotBit(_), Operand::NotBit) => true,
        (S::Expr(_), Operand::Bit) => true,
        (S::Expr(e), Operand::Direct | Operand::Rel | Operand::Addr11 | Operand::Addr16) => {
            e.bit.is_none()
        }
        _ => false,
    }
}

fn select_form(
    mnemonic: &str,
    operands: &[OperandSyntax],
    line: usize,
) -> Result<&'static OpInfo, AsmError> {
    let lookup = match (mnemonic, operands) {
        ("CALL", _) => "LCALL",
        ("JMP", [OperandSyntax::Expr(_)]) => "LJMP",
        (m, _) => m,
    };
    isa::by_mnemonic(lookup)
        .find(|info| {
            info.operands.len() == operands.len()
                && info
                    .operands
                    .iter()
                    .zip(operands)
                    .all(|(&pat, syn)| syntax_matches(syn, pat))
        })
        .ok_or_else(|| AsmError::OperandMismatch {
            line,
            mnemonic: mnemonic.to_string(),
        })
}

fn parse_line(toks: &[Token], line: usize) -> Result<Statement, AsmError> {
    let mut p = Parser { toks, pos: 0, line };
    let mut label = None;
    if let Some(TokenKind::Label(l)) = p.peek() {
        label = Some(l.clone());
        p.pos += 1;
    }
    let body = match p.next() {
        None => Body::Empty,
        Some(TokenKind::Directive(Directive::Org)) => Body::Org(p.expr()?),
        Some(TokenKind::Directive(Directive::End)) => Body::End,
        Some(TokenKind::Directive(Directive::Db)) => {
            let mut items = Vec::new();
            loop {
                match p.peek() {
                    Some(TokenKind::Str(s)) => {
                        items.push(DbItem::Bytes(s.clone()));
                        p.pos += 1;
                    }
                    _ => items.push(DbItem::Expr(p.expr()?)),
                }
                match p.next() {
                    None => break,
                    Some(TokenKind::Comma) => continue,
                    other => return Err(p.syntax(format!("unexpected {}", describe(other)))),
                }
            }
            Body::Db(items)
        }
        Some(TokenKind::Directive(Directive::Equ)) => {
            return Err(p.syntax("EQU needs a name before it"));
        }
        Some(TokenKind::Ident(name)) => {
            if p.peek() == Some(&TokenKind::Directive(Directive::Equ)) {
                if label.is_some() {
                    return Err(p.syntax("a label cannot precede an EQU"));
                }
                p.pos += 1;
                Body::Equ(name.clone(), p.expr()?)
            } else {
                return Err(AsmError::UnknownMnemonic {
                    line,
                    name: name.clone(),
                });
            }
        }
        Some(TokenKind::Mnemonic(m)) => {
            let operands = p.operand_list()?;
            let info = select_form(m, &operands, line)?;
            Body::Insn { info, operands }
        }
        other => return Err(p.syntax(format!("unexpected {}", describe(other)))),
    };
    if !p.at_end() {
        return Err(p.syntax(format!("unexpected {}", describe(p.peek()))));
    }
    Ok(Statement { line, label, body })
}

fn parse(source: &str) -> Result<Vec<Statement>, AsmError> {
    let tokens = tokenize(source)?;
    let mut stmts = Vec::new();
    let lines = source.lines().count();
    let mut start = 0;
    for line in 1..=lines {
        let mut end = start;
        while end < tokens.len() && tokens[end].kind != TokenKind::Newline {
            end += 1;
        }
        let stmt = parse_line(&tokens[start..end], line)?;
        let is_end = stmt.body == Body::End;
        stmts.push(stmt);
        if is_end {
            break;
        }
        start = end + 1;
    }
    Ok(stmts)
}

fn eval(expr: &Expr, symbols: &SymbolTable, here: u16, line: usize) -> Result<i64, AsmError> {
    let mut total = 0i64;
    for (neg, term) in &expr.terms {
        let v = match term {
            Term::Num(n) => *n,
            Term::Here => here as i64,
            Term::Sym(s) => symbols.value(s).ok_or_else(|| AsmError::UndefinedSymbol {
                line,
                name: s.clone(),
            })? as i64,
        };
        total = if *neg { total - v } else { total + v };
    }
    match expr.bit {
        None => Ok(total),
        Some(bit) => {
            if bit > 7 {
                return Err(AsmError::ValueOutOfRange {
                    line,
                    value: bit as i64,
                    what: "a bit number (0..7)",
                });
            }
            match total {
                0x20..=0x2F => Ok((total - 0x20) * 8 + bit as i64),
                0x80..=0xFF if total % 8 == 0 => Ok(total + bit as i64),
                _ => Err(AsmError::ValueOutOfRange {
                    line,
                    value: total,
                    what: "a bit-addressable byte",
                }),
            }
        }
    }
}

fn check(value: i64, lo: i64, hi: i64, what: &'static str, line: usize) -> Result<i64, AsmError> {
    if value < lo || value > hi {
        return Err(AsmError::ValueOutOfRange { line, value, what });
    }
    Ok(value)
}

fn encode(
    info: &OpInfo,
    operands: &[OperandSyntax],
    addr: u16,
    symbols: &SymbolTable,
    line: usize,
) -> Result<Vec<u8>, AsmError> {
    let next = addr.wrapping_add(info.len as u16);
    let mut opcode = info.opcode;
    let mut fields: Vec<Vec<u8>> = Vec::new();
    for (&pat, syn) in info.operands.iter().zip(operands) {
        let expr = match syn {
            OperandSyntax::Imm(e) | OperandSyntax::NotBit(e) | OperandSyntax::Expr(e) => e,
            _ => continue,
        };
        let v = eval(expr, symbols, addr, line)?;
        let bytes = match pat {
            Operand::Direct => vec![check(v, 0, 0xFF, "a direct address", line)? as u8],
            Operand::Imm8 => vec![check(v, -128, 0xFF, "8 bits", line)? as u8],
            Operand::Imm16 => (check(v, -32768, 0xFFFF, "16 bits", line)? as u16)
                .to_be_bytes()
                .to_vec(),
            Operand::Bit | Operand::NotBit => {
                vec![check(v, 0, 0xFF, "a bit address", line)? as u8]
            }
            Operand::Rel => {
                let target = check(v, 0, 0xFFFF, "a code address", line)? as u16;
                let offset = target.wrapping_sub(next) as i16 as i64;
                if !(-128..=127).contains(&offset) {
                    return Err(AsmError::BranchOutOfRange { line, offset });
                }
                vec![offset as i8 as u8]
            }
            Operand::Addr11 => {
                let target = check(v, 0, 0xFFFF, "a code address", line)? as u16;
                if target & 0xF800 != next & 0xF800 {
                    return Err(AsmError::PageOutOfRange { line, target });
                }
                opcode |= (((target >> 8) & 7) as u8) << 5;
                vec![target as u8]
            }
            Operand::Addr16 => (check(v, 0, 0xFFFF, "a code address", line)? as u16)
                .to_be_bytes()
                .to_vec(),
            _ => continue,
        };
        fields.push(bytes);
    }
    if info.swapped_operand_bytes() {
        fields.swap(0, 1);
    }
    let mut out = vec![opcode];
    out.extend(fields.into_iter().flatten());
    debug_assert_eq!(out.len(), info.len as usize);
    Ok(out)
}

fn db_size(items: &[DbItem]) -> usize {
    items
        .iter()
        .map(|i| match i {
            DbItem::Expr(_) => 1,
            DbItem::Bytes(b) => b.len(),
        })
        .sum()
}

/// Assembles `source` into a code image, symbol table and listing.
pub fn assemble(source: &str) -> Result<Assembly, AsmError> {
    let stmts = parse(source)?;
    let mut symbols = SymbolTable::with_builtins();
    let mut warnings = Vec::new();

    // Pass 1: addresses and symbols.
    let mut addr: u32 = 0;
    let mut addrs = Vec::with_capacity(stmts.len());
    let mut deferred: Vec<(&str, &Expr, usize)> = Vec::new();
    for st in &stmts {
        if let Body::Org(e) = &st.body {
            let v = eval(e, &symbols, addr as u16, st.line)?;
            addr = check(v, 0, 0xFFFF, "a code address", st.line)? as u32;
        }
        addrs.push(addr as u16);
        if let Some(label) = &st.label {
            let sym = Symbol {
                value: addr as u16,
                origin: SymbolOrigin::Label,
                line: st.line,
            };
            warnings.extend(symbols.define(label, sym)?);
        }
        match &st.body {
            Body::Equ(name, e) => match eval(e, &symbols, addr as u16, st.line) {
                Ok(v) => {
                    let v = check(v, -32768, 0xFFFF, "16 bits", st.line)?;
                    let sym = Symbol {
                        value: v as u16,
                        origin: SymbolOrigin::Equ,
                        line: st.line,
                    };
                    warnings.extend(symbols.define(name, sym)?);
                }
                Err(AsmError::UndefinedSymbol { .. }) => deferred.push((name, e, st.line)),
                Err(e) => return Err(e),
            },
            Body::Insn { info, .. } => addr += info.len as u32,
            Body::Db(items) => addr += db_size(items) as u32,
            _ => {}
        }
        if addr > 0x10000 {
            return Err(AsmError::ValueOutOfRange {
                line: st.line,
                value: addr as i64,
                what: "the 64 KB code space",
            });
        }
    }
    // EQUs that referenced later labels.
    while !deferred.is_empty() {
        let before = deferred.len();
        let mut still = Vec::new();
        for (name, e, line) in deferred {
            match eval(e, &symbols, 0, line) {
                Ok(v) => {
                    let v = check(v, -32768, 0xFFFF, "16 bits", line)?;
                    let sym = Symbol {
                        value: v as u16,
                        origin: SymbolOrigin::Equ,
                        line,
                    };
                    warnings.extend(symbols.define(name, sym)?);
                }
                Err(_) => still.push((name, e, line)),
            }
        }
        if still.len() == before {
            let (_, e, line) = still[0];
            eval(e, &symbols, 0, line)?;
        }
        deferred = still;
    }

    // Pass 2: encode.
    let mut image = ObjectImage::new();
    let mut listing = String::new();
    let source_lines: Vec<&str> = source.lines().collect();
    for (st, &at) in stmts.iter().zip(&addrs) {
        let bytes = match &st.body {
            Body::Insn { info, operands } => encode(info, operands, at, &symbols, st.line)?,
            Body::Db(items) => {
                let mut out = Vec::new();
                for item in items {
                    match item {
                        DbItem::Bytes(b) => out.extend_from_slice(b),
                        DbItem::Expr(e) => {
                            let v = eval(e, &symbols, at, st.line)?;
                            out.push(check(v, -128, 0xFF, "8 bits", st.line)? as u8);
                        }
                    }
                }
                out
            }
            _ => Vec::new(),
        };
        for (i, &b) in bytes.iter().enumerate() {
            let a = at.wrapping_add(i as u16);
            image.insert(a, b).map_err(|_| AsmError::Overlap {
                line: st.line,
                addr: a,
            })?;
        }
        let text = source_lines.get(st.line - 1).copied().unwrap_or("");
        if bytes.is_empty() {
            let _ = writeln!(listing, "{:4}  {:<20}{}", "", "", text);
        } else {
            for (i, chunk) in bytes.chunks(6).enumerate() {
                let hex: Vec<String> = chunk.iter().map(|b| format!("{b:02X}")).collect();
                let a = at.wrapping_add((i * 6) as u16);
                let src = if i == 0 { text } else { "" };
                let _ = writeln!(listing, "{a:04X}  {:<20}{src}", hex.join(" "));
            }
        }
    }
    if image.end() as usize > ROM_SIZE {
        warnings.push(format!(
            "image ends at 0x{:04X}, beyond the 4 KB on-chip ROM",
            image.end()
        ));
    }

    Ok(Assembly {
        image,
        symbols,
        listing,
        warnings,
    })
}
