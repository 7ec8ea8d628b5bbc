//! Bench-format netlist reader and writer.
//!
//! The dialect is the ISCAS-style one:
//!
//! ```text
//! # comment to end of line
//! INPUT(a)
//! OUTPUT(c)
//! c = AND(a, b)
//! ```
//!
//! Whitespace is insignificant around tokens, so statements may share a
//! line. Names match `[A-Za-z_][A-Za-z0-9_.]*`; gate kinds are AND, NAND,
//! OR, NOR, XOR, XNOR, NOT, BUF and DFF with unbounded fan-in (XOR/XNOR
//! with more than two inputs mean parity and its complement).

use crate::netlist::{GateKind, Netlist, NetlistBuilder, Violation};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown gate kind at line {line}, column {col}: {word}")]
    UnknownGateKind { line: usize, col: usize, word: String },
    #[error("duplicate net name: {name} (line {line})")]
    DuplicateName { name: String, line: usize },
    #[error("multiply-driven net: {name}")]
    MultiplyDriven { name: String },
    #[error("undriven net: {name}")]
    Undriven { name: String },
    #[error("{0}")]
    Structure(Violation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Word,
    LParen,
    RParen,
    Comma,
    Equals,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    text: String,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    for (li, raw_line) in text.lines().enumerate() {
        let line = li + 1;
        let code = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let bytes = code.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let col = i + 1;
            match c {
                ' ' | '\t' | '\r' => i += 1,
                '(' => {
                    toks.push(Token { kind: TokKind::LParen, text: "(".into(), line, col });
                    i += 1;
                }
                ')' => {
                    toks.push(Token { kind: TokKind::RParen, text: ")".into(), line, col });
                    i += 1;
                }
                ',' => {
                    toks.push(Token { kind: TokKind::Comma, text: ",".into(), line, col });
                    i += 1;
                }
                '=' => {
                    toks.push(Token { kind: TokKind::Equals, text: "=".into(), line, col });
                    i += 1;
                }
                c if c.is_ascii_alphanumeric() || c == '_' || c == '.' => {
                    let start = i;
                    while i < bytes.len() {
                        let c = bytes[i] as char;
                        if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                            i += 1;
                        } else {
                            break;
                        }
                    }
                    toks.push(Token {
                        kind: TokKind::Word,
                        text: code[start..i].to_string(),
                        line,
                        col,
                    });
                }
                other => {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character '{other}'"),
                    });
                }
            }
        }
    }
    Ok(toks)
}

fn valid_name(word: &str) -> bool {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<Token, ParseError> {
        match self.next() {
            Some(t) if t.kind == kind => Ok(t),
            Some(t) => Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("expected {what}, found '{}'", t.text),
            }),
            None => Err(ParseError::Syntax {
                line: self.toks.last().map(|t| t.line).unwrap_or(1),
                col: self.toks.last().map(|t| t.col + t.text.len()).unwrap_or(1),
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn expect_name(&mut self, what: &str) -> Result<Token, ParseError> {
        let t = self.expect(TokKind::Word, what)?;
        if !valid_name(&t.text) {
            return Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("invalid name '{}'", t.text),
            });
        }
        Ok(t)
    }
}

/// Parse bench text into a validated [`Netlist`]. INPUT/OUTPUT declaration
/// order fixes the ordered primary input/output lists.
pub fn parse_bench(text: &str) -> Result<Netlist, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut b = NetlistBuilder::new();
    let mut declared_inputs: Vec<String> = Vec::new();
    let mut declared_outputs: Vec<String> = Vec::new();

    while let Some(tok) = p.next() {
        if tok.kind != TokKind::Word {
            return Err(ParseError::Syntax {
                line: tok.line,
                col: tok.col,
                msg: format!("expected INPUT, OUTPUT or a net name, found '{}'", tok.text),
            });
        }
        let upper = tok.text.to_ascii_uppercase();
        if upper == "INPUT" || upper == "OUTPUT" {
            p.expect(TokKind::LParen, "'('")?;
            let name = p.expect_name("a net name")?;
            p.expect(TokKind::RParen, "')'")?;
            if upper == "INPUT" {
                let id = b.net(&name.text);
                if declared_inputs.contains(&name.text) || b.drives(id) {
                    return Err(ParseError::DuplicateName { name: name.text, line: name.line });
                }
                declared_inputs.push(name.text.clone());
                b.add_input(&name.text);
            } else {
                if declared_outputs.contains(&name.text) {
                    return Err(ParseError::DuplicateName { name: name.text, line: name.line });
                }
                declared_outputs.push(name.text.clone());
                b.add_output(&name.text);
            }
        } else {
            // gate definition: out = KIND(in, ...)
            if !valid_name(&tok.text) {
                return Err(ParseError::Syntax {
                    line: tok.line,
                    col: tok.col,
                    msg: format!("invalid name '{}'", tok.text),
                });
            }
            p.expect(TokKind::Equals, "'='")?;
            let kind_tok = p.expect(TokKind::Word, "a gate kind")?;
            let kind = GateKind::parse(&kind_tok.text).ok_or(ParseError::UnknownGateKind {
                line: kind_tok.line,
                col: kind_tok.col,
                word: kind_tok.text.clone(),
            })?;
            p.expect(TokKind::LParen, "'('")?;
            let mut inputs = vec![p.expect_name("a net name")?.text];
            loop {
                match p.peek().map(|t| t.kind) {
                    Some(TokKind::Comma) => {
                        p.next();
                        inputs.push(p.expect_name("a net name")?.text);
                    }
                    Some(TokKind::RParen) => {
                        p.next();
                        break;
                    }
                    _ => {
                        return Err(p
                            .expect(TokKind::RParen, "',' or ')'")
                            .expect_err("peek mismatch"));
                    }
                }
            }
            let out = b.net(&tok.text);
            if b.drives(out) {
                return Err(ParseError::MultiplyDriven { name: tok.text });
            }
            let input_refs: Vec<&str> = inputs.iter().map(|s| s.as_str()).collect();
            b.add_gate(kind, &tok.text, &input_refs);
        }
    }

    let netlist = b.build();
    if let Some(v) = netlist.validate().into_iter().next() {
        return Err(match v {
            Violation::UndrivenNet { net } => ParseError::Undriven { name: net },
            Violation::MultipleDrivers { net } => ParseError::MultiplyDriven { name: net },
            other => ParseError::Structure(other),
        });
    }
    Ok(netlist)
}

/// Render a netlist back to bench text: INPUT lines, OUTPUT lines, then gate
/// definitions in gate order. Reparsing the result reproduces the netlist
/// structurally (same nets, gates and ordered port lists).
pub fn to_bench_string(n: &Netlist) -> String {
    let mut out = String::new();
    for &id in n.primary_inputs() {
        let _ = fmt::Write::write_fmt(&mut out, format_args!("INPUT({})\n", n.net_name(id)));
    }
    for &id in n.primary_outputs() {
        let _ = fmt::Write::write_fmt(&mut out, format_args!("OUTPUT({})\n", n.net_name(id)));
    }
    for g in n.gates() {
        let inputs: Vec<&str> = g.inputs.iter().map(|&i| n.net_name(i)).collect();
        let _ = fmt::Write::write_fmt(&mut out, format_args!(
            "{} = {}({})\n",
            n.net_name(g.output),
            g.kind,
            inputs.join(",")
        ));
    }
    out
}
