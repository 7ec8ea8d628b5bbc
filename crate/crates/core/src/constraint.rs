//! Operational-constraint language and netlist augmentation.
//!
//! Constraints record which signal values the surrounding system can
//! actually produce. Two forms exist:
//!
//! - `fix net = 0|1`: the net always carries the given value;
//! - `forbid (n1,...,nk) in {cube, ...}`: the listed nets never take any
//!   of the cube values (`X` is a don't-care position).
//!
//! A `Fix` restricts the admissible pattern space directly. A `Forbid` is
//! realized structurally: detector gates are appended whose output is 1
//! exactly when a forbidden combination is present, and the analysis holds
//! every detector output at 0. The base netlist is never modified, only
//! appended to, and the added circuitry contributes no fault sites.

use crate::fault::Category;
use crate::netlist::{Gate, GateKind, NetId};
use crate::pattern::TestPattern;
use crate::scan::ScanNetlist;
use crate::sim::{eval_words, SimError};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// One position of a cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeBit {
    Zero,
    One,
    DontCare,
}

/// A pattern over {0,1,X} denoting a set of binary assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cube(pub Vec<CubeBit>);

impl Cube {
    pub fn parse(text: &str) -> Option<Cube> {
        let mut bits = Vec::with_capacity(text.len());
        for ch in text.chars() {
            bits.push(match ch {
                '0' => CubeBit::Zero,
                '1' => CubeBit::One,
                'X' | 'x' => CubeBit::DontCare,
                _ => return None,
            });
        }
        Some(Cube(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_all_dont_care(&self) -> bool {
        self.0.iter().all(|b| *b == CubeBit::DontCare)
    }

    /// Does a value vector (one bool per listed net) fall inside the cube?
    pub fn matches(&self, values: &[bool]) -> bool {
        self.0.iter().zip(values).all(|(c, &v)| match c {
            CubeBit::Zero => !v,
            CubeBit::One => v,
            CubeBit::DontCare => true,
        })
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(match b {
                CubeBit::Zero => "0",
                CubeBit::One => "1",
                CubeBit::DontCare => "X",
            })?;
        }
        Ok(())
    }
}

/// A single constraint, referencing nets by name. Names bind to net ids when
/// the constraint is applied to a netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Fix { net: String, value: bool },
    Forbid { nets: Vec<String>, cubes: Vec<Cube> },
}

/// Named, category-tagged collection of constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    pub name: String,
    pub category: Category,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstraintParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown category keyword at line {line}: {word}")]
    UnknownCategory { line: usize, word: String },
    #[error("malformed cube at line {line}: {cube} ({reason})")]
    MalformedCube { line: usize, cube: String, reason: String },
    #[error("duplicate fix for net {net} (line {line})")]
    DuplicateFix { net: String, line: usize },
    #[error("set {set} is empty (line {line})")]
    EmptySet { set: String, line: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("unknown net in constraint: {net}")]
    UnknownNet { net: String },
    #[error("conflicting constraint on {net}")]
    ConflictingTie { net: String },
    #[error("cube forbids everything (all positions are don't-care)")]
    CubeAllDontCare,
    #[error("cube width {got} does not match net list length {expected}")]
    CubeWidthMismatch { expected: usize, got: usize },
    #[error("forbid lists no cubes")]
    EmptyForbid,
    #[error(transparent)]
    Sim(#[from] SimError),
}

// ---------------------------------------------------------------------------
// constraint file parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Word,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Equals,
    Colon,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    text: String,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ConstraintParseError> {
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
            let simple = |kind| Token { kind, text: c.to_string(), line, col };
            match c {
                ' ' | '\t' | '\r' => i += 1,
                '{' => {
                    toks.push(simple(TokKind::LBrace));
                    i += 1;
                }
                '}' => {
                    toks.push(simple(TokKind::RBrace));
                    i += 1;
                }
                '(' => {
                    toks.push(simple(TokKind::LParen));
                    i += 1;
                }
                ')' => {
                    toks.push(simple(TokKind::RParen));
                    i += 1;
                }
                ',' => {
                    toks.push(simple(TokKind::Comma));
                    i += 1;
                }
                '=' => {
                    toks.push(simple(TokKind::Equals));
                    i += 1;
                }
                ':' => {
                    toks.push(simple(TokKind::Colon));
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
                    return Err(ConstraintParseError::Syntax {
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

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<Token, ConstraintParseError> {
        match self.next() {
            Some(t) if t.kind == kind => Ok(t),
            Some(t) => Err(ConstraintParseError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("expected {what}, found '{}'", t.text),
            }),
            None => Err(ConstraintParseError::Syntax {
                line: self.toks.last().map(|t| t.line).unwrap_or(1),
                col: self.toks.last().map(|t| t.col + t.text.len()).unwrap_or(1),
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }
}

/// Parse a constraint file into ordered [`ConstraintSet`]s. File order is
/// significant: category attribution walks sets in this order. A net may be
/// fixed at most once per file; net existence is checked when the sets are
/// applied to a netlist, not here.
pub fn parse_constraints(text: &str) -> Result<Vec<ConstraintSet>, ConstraintParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut sets = Vec::new();
    let mut fixed_nets: Vec<String> = Vec::new();

    while let Some(tok) = p.next() {
        if tok.kind != TokKind::Word || tok.text != "set" {
            return Err(ConstraintParseError::Syntax {
                line: tok.line,
                col: tok.col,
                msg: format!("expected 'set', found '{}'", tok.text),
            });
        }
        let cat_tok = p.expect(TokKind::Word, "a category name")?;
        let mut cat_text = cat_tok.text.clone();
        if cat_text == "user" {
            p.expect(TokKind::Colon, "':' after 'user'")?;
            let name = p.expect(TokKind::Word, "a user category name")?;
            cat_text = format!("user:{}", name.text);
        }
        let category = Category::parse(&cat_text).ok_or(ConstraintParseError::UnknownCategory {
            line: cat_tok.line,
            word: cat_text.clone(),
        })?;
        let brace = p.expect(TokKind::LBrace, "'{'")?;

        let mut constraints = Vec::new();
        loop {
            let tok = match p.next() {
                Some(t) => t,
                None => {
                    return Err(ConstraintParseError::Syntax {
                        line: brace.line,
                        col: brace.col,
                        msg: "unclosed '{'".into(),
                    });
                }
            };
            match (tok.kind, tok.text.as_str()) {
                (TokKind::RBrace, _) => break,
                (TokKind::Word, "fix") => {
                    let net = p.expect(TokKind::Word, "a net name")?;
                    p.expect(TokKind::Equals, "'='")?;
                    let val = p.expect(TokKind::Word, "'0' or '1'")?;
                    let value = match val.text.as_str() {
                        "0" => false,
                        "1" => true,
                        other => {
                            return Err(ConstraintParseError::Syntax {
                                line: val.line,
                                col: val.col,
                                msg: format!("expected '0' or '1', found '{other}'"),
                            });
                        }
                    };
                    if fixed_nets.contains(&net.text) {
                        return Err(ConstraintParseError::DuplicateFix {
                            net: net.text,
                            line: net.line,
                        });
                    }
                    fixed_nets.push(net.text.clone());
                    constraints.push(Constraint::Fix { net: net.text, value });
                }
                (TokKind::Word, "forbid") => {
                    p.expect(TokKind::LParen, "'('")?;
                    let mut nets = vec![p.expect(TokKind::Word, "a net name")?.text];
                    loop {
                        match p.peek().map(|t| t.kind) {
                            Some(TokKind::Comma) => {
                                p.next();
                                nets.push(p.expect(TokKind::Word, "a net name")?.text);
                            }
                            _ => {
                                p.expect(TokKind::RParen, "',' or ')'")?;
                                break;
                            }
                        }
                    }
                    let kw = p.expect(TokKind::Word, "'in'")?;
                    if kw.text != "in" {
                        return Err(ConstraintParseError::Syntax {
                            line: kw.line,
                            col: kw.col,
                            msg: format!("expected 'in', found '{}'", kw.text),
                        });
                    }
                    p.expect(TokKind::LBrace, "'{'")?;
                    let mut cubes = Vec::new();
                    loop {
                        let cube_tok = p.expect(TokKind::Word, "a cube")?;
                        let cube = Cube::parse(&cube_tok.text).ok_or_else(|| {
                            ConstraintParseError::MalformedCube {
                                line: cube_tok.line,
                                cube: cube_tok.text.clone(),
                                reason: "characters must be 0, 1 or X".into(),
                            }
                        })?;
                        if cube.len() != nets.len() {
                            return Err(ConstraintParseError::MalformedCube {
                                line: cube_tok.line,
                                cube: cube_tok.text.clone(),
                                reason: format!(
                                    "width {} does not match the {} listed nets",
                                    cube.len(),
                                    nets.len()
                                ),
                            });
                        }
                        cubes.push(cube);
                        match p.peek().map(|t| t.kind) {
                            Some(TokKind::Comma) => {
                                p.next();
                            }
                            _ => {
                                p.expect(TokKind::RBrace, "',' or '}'")?;
                                break;
                            }
                        }
                    }
                    constraints.push(Constraint::Forbid { nets, cubes });
                }
                _ => {
                    return Err(ConstraintParseError::Syntax {
                        line: tok.line,
                        col: tok.col,
                        msg: format!("expected 'fix', 'forbid' or '}}', found '{}'", tok.text),
                    });
                }
            }
        }
        if constraints.is_empty() {
            return Err(ConstraintParseError::EmptySet { set: cat_text, line: cat_tok.line });
        }
        sets.push(ConstraintSet { name: cat_text, category, constraints });
    }
    Ok(sets)
}

// ---------------------------------------------------------------------------
// augmentation
// ---------------------------------------------------------------------------

/// A forbid constraint with its nets resolved against a netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundForbid {
    pub nets: Vec<NetId>,
    pub cubes: Vec<Cube>,
}

/// A scan netlist together with applied constraints: tied nets, appended
/// detector circuitry, and the detector outputs that must stay at 0.
///
/// Monitor gates live in an extended net id space starting at the base net
/// count. They read base nets (and each other) but drive nothing in the
/// base netlist, and they carry no fault sites.
#[derive(Debug, Clone)]
pub struct AugmentedNetlist {
    base: ScanNetlist,
    tied: BTreeMap<NetId, bool>,
    forbids: Vec<BoundForbid>,
    monitor_gates: Vec<Gate>,
    monitor_names: Vec<String>,
    monitor_outputs: Vec<NetId>,
}

impl AugmentedNetlist {
    pub fn new(base: ScanNetlist) -> Self {
        Self {
            base,
            tied: BTreeMap::new(),
            forbids: Vec::new(),
            monitor_gates: Vec::new(),
            monitor_names: Vec::new(),
            monitor_outputs: Vec::new(),
        }
    }

    pub fn base(&self) -> &ScanNetlist {
        &self.base
    }

    pub fn tied_nets(&self) -> &BTreeMap<NetId, bool> {
        &self.tied
    }

    pub fn forbids(&self) -> &[BoundForbid] {
        &self.forbids
    }

    pub fn monitor_gates(&self) -> &[Gate] {
        &self.monitor_gates
    }

    pub fn monitor_outputs(&self) -> &[NetId] {
        &self.monitor_outputs
    }

    pub fn monitor_net_count(&self) -> usize {
        self.monitor_names.len()
    }

    pub fn has_constraints(&self) -> bool {
        !self.tied.is_empty() || !self.forbids.is_empty()
    }

    fn fresh_monitor_net(&mut self) -> NetId {
        let mut k = self.monitor_names.len();
        let name = loop {
            let candidate = format!("__mon{k}");
            if self.base.core().net_id(&candidate).is_none() {
                break candidate;
            }
            k += 1;
        };
        let id = NetId((self.base.core().net_count() + self.monitor_names.len()) as u32);
        self.monitor_names.push(name);
        id
    }

    /// Record a tie: the net always carries `value` during operation.
    /// Re-fixing to the same value is idempotent; the opposite value is a
    /// hard error. Fault sites on the tied net's pins stay in the universe.
    pub fn apply_fix(&mut self, net: &str, value: bool) -> Result<(), ConstraintError> {
        let id = self
            .base
            .core()
            .net_id(net)
            .ok_or_else(|| ConstraintError::UnknownNet { net: net.to_string() })?;
        if let Some(&prev) = self.tied.get(&id) {
            if prev != value {
                return Err(ConstraintError::ConflictingTie { net: net.to_string() });
            }
            return Ok(());
        }
        self.tied.insert(id, value);
        Ok(())
    }

    /// Append detector circuitry for a forbid constraint: one AND over the
    /// cube literals per cube (a NOT feeding it for each 0 position, don't
    /// cares skipped), multiple cubes OR-ed. The final output goes on the
    /// monitor list and is held at 0 by every downstream analysis.
    pub fn build_monitor(&mut self, nets: &[String], cubes: &[Cube]) -> Result<(), ConstraintError> {
        if cubes.is_empty() {
            return Err(ConstraintError::EmptyForbid);
        }
        let mut ids = Vec::with_capacity(nets.len());
        for name in nets {
            let id = self
                .base
                .core()
                .net_id(name)
                .ok_or_else(|| ConstraintError::UnknownNet { net: name.clone() })?;
            ids.push(id);
        }
        for cube in cubes {
            if cube.len() != ids.len() {
                return Err(ConstraintError::CubeWidthMismatch {
                    expected: ids.len(),
                    got: cube.len(),
                });
            }
            if cube.is_all_dont_care() {
                return Err(ConstraintError::CubeAllDontCare);
            }
        }

        // one inverter per negated net, shared within this forbid
        let mut inverted: BTreeMap<NetId, NetId> = BTreeMap::new();
        let mut detectors = Vec::with_capacity(cubes.len());
        for cube in cubes {
            let mut literals = Vec::new();
            for (i, bit) in cube.0.iter().enumerate() {
                match bit {
                    CubeBit::One => literals.push(ids[i]),
                    CubeBit::Zero => {
                        let lit = *inverted.entry(ids[i]).or_insert_with(|| {
                            let out = self.fresh_monitor_net();
                            self.monitor_gates.push(Gate {
                                kind: GateKind::Not,
                                inputs: vec![ids[i]],
                                output: out,
                            });
                            out
                        });
                        literals.push(lit);
                    }
                    CubeBit::DontCare => {}
                }
            }
            let detector = if literals.len() == 1 {
                literals[0]
            } else {
                let out = self.fresh_monitor_net();
                self.monitor_gates.push(Gate {
                    kind: GateKind::And,
                    inputs: literals,
                    output: out,
                });
                out
            };
            detectors.push(detector);
        }
        let output = if detectors.len() == 1 {
            detectors[0]
        } else {
            let out = self.fresh_monitor_net();
            self.monitor_gates.push(Gate { kind: GateKind::Or, inputs: detectors, output: out });
            out
        };
        self.monitor_outputs.push(output);
        self.forbids.push(BoundForbid { nets: ids, cubes: cubes.to_vec() });
        Ok(())
    }

    pub fn apply_set(&mut self, set: &ConstraintSet) -> Result<(), ConstraintError> {
        for c in &set.constraints {
            match c {
                Constraint::Fix { net, value } => self.apply_fix(net, *value)?,
                Constraint::Forbid { nets, cubes } => self.build_monitor(nets, cubes)?,
            }
        }
        Ok(())
    }

    /// Monitor net values for one block of patterns, given the base net
    /// values. Index 0 is the first monitor net.
    pub fn monitor_words(&self, base_values: &[u64]) -> Vec<u64> {
        let base_count = self.base.core().net_count();
        let mut values = vec![0u64; self.monitor_names.len()];
        let read = |values: &[u64], id: NetId| {
            if id.index() < base_count {
                base_values[id.index()]
            } else {
                values[id.index() - base_count]
            }
        };
        for g in &self.monitor_gates {
            let out = match g.kind {
                GateKind::Not => !read(&values, g.inputs[0]),
                GateKind::And => g.inputs.iter().fold(!0u64, |acc, &i| acc & read(&values, i)),
                GateKind::Or => g.inputs.iter().fold(0u64, |acc, &i| acc | read(&values, i)),
                _ => unreachable!("monitors are built from NOT, AND and OR"),
            };
            values[g.output.index() - base_count] = out;
        }
        values
    }

    /// Value of any net, base or monitor, given both value blocks. Monitor
    /// outputs may be plain base nets when a cube has a single literal.
    pub fn net_word(&self, id: NetId, base_values: &[u64], monitor_values: &[u64]) -> u64 {
        let base_count = self.base.core().net_count();
        if id.index() < base_count {
            base_values[id.index()]
        } else {
            monitor_values[id.index() - base_count]
        }
    }

    /// Lanes (of a 64-pattern block) that satisfy every tie and avoid every
    /// forbidden cube, judged on good-machine values. Cube membership is
    /// evaluated directly on the constrained nets, independent of the
    /// detector circuitry.
    pub fn admissible_mask(&self, base_values: &[u64]) -> u64 {
        let mut mask = !0u64;
        for (&net, &value) in &self.tied {
            let v = base_values[net.index()];
            mask &= if value { v } else { !v };
        }
        for forbid in &self.forbids {
            for cube in &forbid.cubes {
                let mut m = !0u64;
                for (i, bit) in cube.0.iter().enumerate() {
                    let v = base_values[forbid.nets[i].index()];
                    match bit {
                        CubeBit::One => m &= v,
                        CubeBit::Zero => m &= !v,
                        CubeBit::DontCare => {}
                    }
                }
                mask &= !m;
            }
        }
        mask
    }

    /// Is a single pattern admissible under the constraints?
    pub fn admissible(&self, p: &TestPattern) -> Result<bool, SimError> {
        if p.width() != self.base.width() {
            return Err(SimError::WidthMismatch { expected: self.base.width(), got: p.width() });
        }
        let words: Vec<u64> = p.bits().iter().map(|&b| if b { !0 } else { 0 }).collect();
        let values = eval_words(&self.base, &words, None);
        Ok(self.admissible_mask(&values) & 1 != 0)
    }
}

/// Build an augmented netlist by applying constraint sets in order.
pub fn augment(base: &ScanNetlist, sets: &[ConstraintSet]) -> Result<AugmentedNetlist, ConstraintError> {
    let mut a = AugmentedNetlist::new(base.clone());
    for set in sets {
        a.apply_set(set)?;
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::parse_bench;
    use crate::scan::scan_transform;

    fn and2() -> ScanNetlist {
        scan_transform(&parse_bench("INPUT(a) INPUT(b) OUTPUT(c) c = AND(a,b)").unwrap()).unwrap()
    }

    #[test]
    fn parse_fix_set() {
        let sets = parse_constraints("set reset_logic { fix rst = 0 }").unwrap();
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].category, Category::ResetLogic);
        assert_eq!(sets[0].constraints, vec![Constraint::Fix { net: "rst".into(), value: false }]);
    }

    #[test]
    fn parse_forbid_set() {
        let sets = parse_constraints(
            "set unused_instructions { forbid (op3,op2,op1,op0) in {1101, 1110} }",
        )
        .unwrap();
        assert_eq!(sets.len(), 1);
        match &sets[0].constraints[0] {
            Constraint::Forbid { nets, cubes } => {
                assert_eq!(nets.len(), 4);
                assert_eq!(cubes.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_two_fixes() {
        let sets = parse_constraints(
            "set spr_addressing { fix spr_addr_15 = 0 fix spr_addr_14 = 0 }",
        )
        .unwrap();
        assert_eq!(sets[0].constraints.len(), 2);
    }

    #[test]
    fn parse_user_category() {
        let sets = parse_constraints("set user:brake { fix x = 1 }").unwrap();
        assert_eq!(sets[0].category, Category::UserDefined("brake".into()));
        assert_eq!(sets[0].name, "user:brake");
    }

    #[test]
    fn duplicate_fix_in_file_is_an_error() {
        let err = parse_constraints(
            "set reset_logic { fix rst = 0 }\nset decoding_logic { fix rst = 0 }",
        )
        .unwrap_err();
        assert_eq!(err, ConstraintParseError::DuplicateFix { net: "rst".into(), line: 2 });
    }

    #[test]
    fn unknown_category_is_an_error() {
        let err = parse_constraints("set turbo { fix x = 0 }").unwrap_err();
        assert_eq!(err, ConstraintParseError::UnknownCategory { line: 1, word: "turbo".into() });
    }

    #[test]
    fn malformed_cube_is_an_error() {
        let err = parse_constraints("set decoding_logic { forbid (a,b) in {102} }").unwrap_err();
        assert!(matches!(err, ConstraintParseError::MalformedCube { .. }));
    }

    #[test]
    fn cube_width_checked_against_net_list() {
        let err = parse_constraints("set decoding_logic { forbid (a,b) in {101} }").unwrap_err();
        assert!(matches!(err, ConstraintParseError::MalformedCube { .. }));
    }

    #[test]
    fn fix_records_tie() {
        let mut a = AugmentedNetlist::new(and2());
        a.apply_fix("a", false).unwrap();
        let id = a.base().core().net_id("a").unwrap();
        assert_eq!(a.tied_nets().get(&id), Some(&false));
    }

    #[test]
    fn fix_is_idempotent() {
        let mut a = AugmentedNetlist::new(and2());
        a.apply_fix("a", false).unwrap();
        a.apply_fix("a", false).unwrap();
        assert_eq!(a.tied_nets().len(), 1);
    }

    #[test]
    fn conflicting_fix_is_an_error() {
        let mut a = AugmentedNetlist::new(and2());
        a.apply_fix("a", false).unwrap();
        let err = a.apply_fix("a", true).unwrap_err();
        assert_eq!(err.to_string(), "conflicting constraint on a");
    }

    #[test]
    fn single_cube_monitor_is_one_and_gate() {
        let mut a = AugmentedNetlist::new(and2());
        a.build_monitor(&["a".into(), "b".into()], &[Cube::parse("11").unwrap()]).unwrap();
        assert_eq!(a.monitor_gates().len(), 1);
        assert_eq!(a.monitor_gates()[0].kind, GateKind::And);
        assert_eq!(a.monitor_outputs().len(), 1);
    }

    #[test]
    fn dont_care_positions_are_skipped() {
        let s = scan_transform(
            &parse_bench("INPUT(a) INPUT(b) INPUT(c) OUTPUT(y) y = AND(a,b,c)").unwrap(),
        )
        .unwrap();
        let mut a = AugmentedNetlist::new(s);
        a.build_monitor(
            &["a".into(), "b".into(), "c".into()],
            &[Cube::parse("1X0").unwrap()],
        )
        .unwrap();
        // one NOT for the 0 position, one AND over {a, NOT(c)}
        assert_eq!(a.monitor_gates().len(), 2);
        assert_eq!(a.monitor_gates()[0].kind, GateKind::Not);
        assert_eq!(a.monitor_gates()[1].kind, GateKind::And);
    }

    #[test]
    fn multiple_cubes_are_ored() {
        let mut a = AugmentedNetlist::new(and2());
        a.build_monitor(
            &["a".into(), "b".into()],
            &[Cube::parse("11").unwrap(), Cube::parse("00").unwrap()],
        )
        .unwrap();
        let last = a.monitor_gates().last().unwrap();
        assert_eq!(last.kind, GateKind::Or);
        // monitor output must be 1 exactly on {11, 00}
        for idx in 0..4u64 {
            let p = crate::pattern::TestPattern::from_index(idx, 2);
            let words: Vec<u64> = p.bits().iter().map(|&b| if b { !0 } else { 0 }).collect();
            let base = eval_words(a.base(), &words, None);
            let monitors = a.monitor_words(&base);
            let out = a.net_word(a.monitor_outputs()[0], &base, &monitors) & 1;
            let expect = (p.bit(0) && p.bit(1)) || (!p.bit(0) && !p.bit(1));
            assert_eq!(out != 0, expect, "pattern {p}");
        }
    }

    #[test]
    fn all_dont_care_cube_is_an_error() {
        let mut a = AugmentedNetlist::new(and2());
        let err = a
            .build_monitor(&["a".into(), "b".into()], &[Cube::parse("XX").unwrap()])
            .unwrap_err();
        assert_eq!(err, ConstraintError::CubeAllDontCare);
    }

    #[test]
    fn unknown_net_is_an_error() {
        let mut a = AugmentedNetlist::new(and2());
        assert_eq!(
            a.apply_fix("zz", false).unwrap_err(),
            ConstraintError::UnknownNet { net: "zz".into() }
        );
    }

    #[test]
    fn augmentation_only_appends() {
        let base = and2();
        let gates_before = base.core().gates().to_vec();
        let sets = parse_constraints(
            "set reset_logic { fix a = 0 }\nset decoding_logic { forbid (a,b) in {11} }",
        )
        .unwrap();
        let a = augment(&base, &sets).unwrap();
        assert_eq!(a.base().core().gates(), gates_before.as_slice());
        assert_eq!(a.base().core().net_count(), 3);
    }

    #[test]
    fn admissibility_matches_tie_and_cube_predicate() {
        // ties and forbids on an internal net as well as ports
        let s = scan_transform(
            &parse_bench("INPUT(a) INPUT(b) INPUT(c) OUTPUT(y) x = AND(a,b) y = OR(x,c)").unwrap(),
        )
        .unwrap();
        let mut a = AugmentedNetlist::new(s.clone());
        a.apply_fix("x", false).unwrap();
        a.build_monitor(&["b".into(), "c".into()], &[Cube::parse("01").unwrap()]).unwrap();
        for idx in 0..8u64 {
            let p = TestPattern::from_index(idx, 3);
            let x = p.bit(0) && p.bit(1);
            let expect = !x && !(!p.bit(1) && p.bit(2));
            assert_eq!(a.admissible(&p).unwrap(), expect, "pattern {p}");
        }
    }

    #[test]
    fn adding_constraints_never_enlarges_admissible_set() {
        let s = and2();
        let mut weak = AugmentedNetlist::new(s.clone());
        weak.apply_fix("a", false).unwrap();
        let mut strong = weak.clone();
        strong.build_monitor(&["b".into()], &[Cube::parse("1").unwrap()]).unwrap();
        for idx in 0..4u64 {
            let p = TestPattern::from_index(idx, 2);
            if strong.admissible(&p).unwrap() {
                assert!(weak.admissible(&p).unwrap());
            }
        }
    }
}
