//! Gate-level netlist representation and structural validation.
//!
//! A [`Netlist`] is a directed gate graph over named nets. Every net is
//! expected to have exactly one driver: a primary input, a gate output, or
//! (after scan insertion) a pseudo primary input. The struct itself can hold
//! ill-formed graphs so that [`Netlist::validate`] can report violations;
//! the parser and the transforms only hand out validated netlists.

use std::collections::HashMap;
use std::fmt;

/// Dense handle of a net. Ids are contiguous from 0 within one netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

impl NetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Logic function of a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Dff,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Dff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
            GateKind::Dff => "DFF",
        }
    }

    pub fn parse(word: &str) -> Option<GateKind> {
        let upper = word.to_ascii_uppercase();
        Self::ALL.iter().copied().find(|k| k.name() == upper)
    }

    /// NOT, BUF and DFF take exactly one input; everything else at least two.
    pub fn is_unary(self) -> bool {
        matches!(self, GateKind::Not | GateKind::Buf | GateKind::Dff)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate instance. Gates are identified by index into [`Netlist::gates`];
/// in text formats they are named after their output net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    pub output: NetId,
}

/// What sources a net in a well-formed netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    PrimaryInput,
    Gate(u32),
    /// A flip-flop output exposed as a controllable port by the scan transform.
    PseudoInput,
    Undriven,
}

/// Invariant violation found by [`Netlist::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UndrivenNet { net: String },
    MultipleDrivers { net: String },
    CombinationalCycle { nets: Vec<String> },
    BadFanIn { gate: String, kind: GateKind, arity: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UndrivenNet { net } => write!(f, "undriven net: {net}"),
            Violation::MultipleDrivers { net } => write!(f, "multiple drivers: {net}"),
            Violation::CombinationalCycle { nets } => {
                write!(f, "combinational cycle through: {}", nets.join(","))
            }
            Violation::BadFanIn { gate, kind, arity } => {
                write!(f, "bad fan-in for {kind} gate {gate}: {arity} inputs")
            }
        }
    }
}

/// Immutable gate-level netlist. Construct through [`NetlistBuilder`] or the
/// bench parser; both leave ids dense and names interned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    names: Vec<String>,
    name_to_id: HashMap<String, NetId>,
    gates: Vec<Gate>,
    drivers: Vec<Driver>,
    primary_inputs: Vec<NetId>,
    primary_outputs: Vec<NetId>,
}

impl Netlist {
    pub fn net_count(&self) -> usize {
        self.names.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, idx: usize) -> &Gate {
        &self.gates[idx]
    }

    pub fn net_name(&self, id: NetId) -> &str {
        &self.names[id.index()]
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.name_to_id.get(name).copied()
    }

    pub fn driver(&self, id: NetId) -> Driver {
        self.drivers[id.index()]
    }

    pub fn primary_inputs(&self) -> &[NetId] {
        &self.primary_inputs
    }

    pub fn primary_outputs(&self) -> &[NetId] {
        &self.primary_outputs
    }

    pub fn dff_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::Dff).count()
    }

    /// Check all structural invariants and return every violation found.
    ///
    /// The list is empty exactly when the netlist is well-formed: one driver
    /// per net, no undriven used net, legal gate arities, and no cycle that
    /// avoids a flip-flop. Driver information is recomputed from the gate
    /// list, so this also audits netlists assembled by hand.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let n = self.net_count();

        let mut driver_claims = vec![0usize; n];
        for id in &self.primary_inputs {
            driver_claims[id.index()] += 1;
        }
        for g in &self.gates {
            driver_claims[g.output.index()] += 1;
        }

        let mut used = vec![false; n];
        for g in &self.gates {
            for i in &g.inputs {
                used[i.index()] = true;
            }
        }
        for id in &self.primary_outputs {
            used[id.index()] = true;
        }

        for i in 0..n {
            if driver_claims[i] > 1 {
                violations.push(Violation::MultipleDrivers {
                    net: self.names[i].clone(),
                });
            } else if driver_claims[i] == 0 && used[i] && self.drivers[i] != Driver::PseudoInput {
                violations.push(Violation::UndrivenNet {
                    net: self.names[i].clone(),
                });
            }
        }

        for g in &self.gates {
            let arity = g.inputs.len();
            let bad = if g.kind.is_unary() { arity != 1 } else { arity < 2 };
            if bad {
                violations.push(Violation::BadFanIn {
                    gate: self.net_name(g.output).to_string(),
                    kind: g.kind,
                    arity,
                });
            }
        }

        if let Some(cycle) = self.find_combinational_cycle() {
            let mut nets: Vec<String> =
                cycle.iter().map(|id| self.names[id.index()].clone()).collect();
            // rotate so the smallest name leads, for a stable report
            let lead = nets
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.cmp(b))
                .map(|(i, _)| i)
                .unwrap();
            nets.rotate_left(lead);
            violations.push(Violation::CombinationalCycle { nets });
        }

        violations
    }

    /// DFS over net -> driving gate edges, skipping DFFs. Returns the nets of
    /// one cycle (traversal order, starting at the smallest net id on it).
    fn find_combinational_cycle(&self) -> Option<Vec<NetId>> {
        // gate driving each net, combinational only, first claim wins
        let mut comb_driver = vec![None; self.net_count()];
        for (gi, g) in self.gates.iter().enumerate() {
            if g.kind != GateKind::Dff && comb_driver[g.output.index()].is_none() {
                comb_driver[g.output.index()] = Some(gi);
            }
        }

        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color = vec![WHITE; self.net_count()];

        fn visit(
            net: NetId,
            comb_driver: &[Option<usize>],
            gates: &[Gate],
            color: &mut [u8],
            stack: &mut Vec<NetId>,
        ) -> Option<Vec<NetId>> {
            match color[net.index()] {
                BLACK => return None,
                GRAY => {
                    let pos = stack.iter().position(|&x| x == net).unwrap();
                    return Some(stack[pos..].to_vec());
                }
                _ => {}
            }
            color[net.index()] = GRAY;
            stack.push(net);
            if let Some(gi) = comb_driver[net.index()] {
                for &input in &gates[gi].inputs {
                    if let Some(c) = visit(input, comb_driver, gates, color, stack) {
                        return Some(c);
                    }
                }
            }
            stack.pop();
            color[net.index()] = BLACK;
            None
        }

        let mut stack = Vec::new();
        for i in 0..self.net_count() {
            if let Some(c) = visit(NetId(i as u32), &comb_driver, &self.gates, &mut color, &mut stack)
            {
                return Some(c);
            }
        }
        None
    }
}

/// Mutable staging area for building a [`Netlist`]. Names are interned on
/// first mention; structural problems are left for `validate` to report.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    names: Vec<String>,
    name_to_id: HashMap<String, NetId>,
    gates: Vec<Gate>,
    primary_inputs: Vec<NetId>,
    primary_outputs: Vec<NetId>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intern a net name, creating the net on first mention.
    pub fn net(&mut self, name: &str) -> NetId {
        if let Some(&id) = self.name_to_id.get(name) {
            return id;
        }
        let id = NetId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.name_to_id.insert(name.to_string(), id);
        id
    }

    pub fn has_net(&self, name: &str) -> bool {
        self.name_to_id.contains_key(name)
    }

    pub fn add_input(&mut self, name: &str) -> NetId {
        let id = self.net(name);
        self.primary_inputs.push(id);
        id
    }

    pub fn add_output(&mut self, name: &str) -> NetId {
        let id = self.net(name);
        self.primary_outputs.push(id);
        id
    }

    pub fn add_gate(&mut self, kind: GateKind, output: &str, inputs: &[&str]) -> &Gate {
        let output = self.net(output);
        let inputs = inputs.iter().map(|n| self.net(n)).collect();
        self.gates.push(Gate { kind, inputs, output });
        self.gates.last().unwrap()
    }

    pub fn is_input(&self, id: NetId) -> bool {
        self.primary_inputs.contains(&id)
    }

    pub fn drives(&self, id: NetId) -> bool {
        self.primary_inputs.contains(&id) || self.gates.iter().any(|g| g.output == id)
    }

    /// Finish construction. Driver slots are filled first-claim-wins; call
    /// [`Netlist::validate`] on the result to detect conflicting claims.
    pub fn build(self) -> Netlist {
        let mut drivers = vec![Driver::Undriven; self.names.len()];
        for &id in &self.primary_inputs {
            if drivers[id.index()] == Driver::Undriven {
                drivers[id.index()] = Driver::PrimaryInput;
            }
        }
        for (gi, g) in self.gates.iter().enumerate() {
            if drivers[g.output.index()] == Driver::Undriven {
                drivers[g.output.index()] = Driver::Gate(gi as u32);
            }
        }
        Netlist {
            names: self.names,
            name_to_id: self.name_to_id,
            gates: self.gates,
            drivers,
            primary_inputs: self.primary_inputs,
            primary_outputs: self.primary_outputs,
        }
    }
}

/// Internal constructor used by the scan transform, which re-labels DFF
/// output nets as pseudo inputs.
pub(crate) fn netlist_with_pseudo_inputs(
    names: Vec<String>,
    name_to_id: HashMap<String, NetId>,
    gates: Vec<Gate>,
    primary_inputs: Vec<NetId>,
    primary_outputs: Vec<NetId>,
    pseudo_inputs: &[NetId],
) -> Netlist {
    let mut drivers = vec![Driver::Undriven; names.len()];
    for &id in &primary_inputs {
        drivers[id.index()] = Driver::PrimaryInput;
    }
    for &id in pseudo_inputs {
        drivers[id.index()] = Driver::PseudoInput;
    }
    for (gi, g) in gates.iter().enumerate() {
        if drivers[g.output.index()] == Driver::Undriven {
            drivers[g.output.index()] = Driver::Gate(gi as u32);
        }
    }
    Netlist {
        names,
        name_to_id,
        gates,
        drivers,
        primary_inputs,
        primary_outputs,
    }
}

pub(crate) type NetlistParts =
    (Vec<String>, HashMap<String, NetId>, Vec<Gate>, Vec<NetId>, Vec<NetId>);

pub(crate) fn netlist_parts(n: &Netlist) -> NetlistParts {
    (
        n.names.clone(),
        n.name_to_id.clone(),
        n.gates.clone(),
        n.primary_inputs.clone(),
        n.primary_outputs.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> Netlist {
        let mut b = NetlistBuilder::new();
        b.add_input("a");
        b.add_input("b");
        b.add_output("c");
        b.add_gate(GateKind::And, "c", &["a", "b"]);
        b.build()
    }

    #[test]
    fn well_formed_netlist_has_no_violations() {
        assert!(and2().validate().is_empty());
    }

    #[test]
    fn multiple_drivers_reported_by_name() {
        let mut b = NetlistBuilder::new();
        b.add_input("a");
        b.add_input("b");
        b.add_gate(GateKind::And, "x", &["a", "b"]);
        b.add_gate(GateKind::Or, "x", &["a", "b"]);
        b.add_output("x");
        let v = b.build().validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "multiple drivers: x");
    }

    #[test]
    fn combinational_cycle_reported() {
        let mut b = NetlistBuilder::new();
        b.add_gate(GateKind::Buf, "b", &["a"]);
        b.add_gate(GateKind::Buf, "a", &["b"]);
        b.add_output("a");
        let v = b.build().validate();
        assert!(v.iter().any(|x| x.to_string() == "combinational cycle through: a,b"));
    }

    #[test]
    fn cycle_through_dff_is_legal() {
        let mut b = NetlistBuilder::new();
        b.add_input("en");
        b.add_gate(GateKind::And, "d", &["q", "en"]);
        b.add_gate(GateKind::Dff, "q", &["d"]);
        b.add_output("q");
        assert!(b.build().validate().is_empty());
    }

    #[test]
    fn undriven_used_net_reported() {
        let mut b = NetlistBuilder::new();
        b.add_input("a");
        b.add_gate(GateKind::And, "c", &["a", "b"]);
        b.add_output("c");
        let v = b.build().validate();
        assert_eq!(v, vec![Violation::UndrivenNet { net: "b".into() }]);
    }

    #[test]
    fn bad_fan_in_reported() {
        let mut b = NetlistBuilder::new();
        b.add_input("a");
        b.add_gate(GateKind::And, "c", &["a"]);
        b.add_output("c");
        let v = b.build().validate();
        assert!(matches!(v[0], Violation::BadFanIn { .. }));
    }
}
