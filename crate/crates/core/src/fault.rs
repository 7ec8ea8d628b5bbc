//! Pin-level stuck-at fault model: enumeration, structural equivalence
//! collapsing, classification vocabulary, and the fault-list text format.

use crate::pattern::TestPattern;
use crate::scan::ScanNetlist;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// One physical pin: a gate input pin, a gate output, or an input port.
/// Fan-out stems and branches are distinct sites: the branch is the input
/// pin of each sink gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaultSite {
    Port { net: u32 },
    GateInput { gate: u32, pin: u32 },
    GateOutput { gate: u32 },
}

/// A stuck-at fault: a site plus the value it is stuck at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fault {
    pub site: FaultSite,
    pub stuck: bool,
}

impl Fault {
    /// Net name the site is attached to: the port net, or the gate's output
    /// net (gates are named after their outputs). Used for unit attribution.
    pub fn site_net_name<'a>(&self, s: &'a ScanNetlist) -> &'a str {
        match self.site {
            FaultSite::Port { net } => s.core().net_name(crate::netlist::NetId(net)),
            FaultSite::GateInput { gate, .. } => {
                s.core().net_name(s.core().gate(gate as usize).output)
            }
            FaultSite::GateOutput { gate } => {
                s.core().net_name(s.core().gate(gate as usize).output)
            }
        }
    }

    /// Text form `<site>/<0|1>` with site one of `port:<name>`,
    /// `gate:<name>:in<k>`, `gate:<name>:out`.
    pub fn to_line(&self, s: &ScanNetlist) -> String {
        let site = match self.site {
            FaultSite::Port { net } => {
                format!("port:{}", s.core().net_name(crate::netlist::NetId(net)))
            }
            FaultSite::GateInput { gate, pin } => format!(
                "gate:{}:in{}",
                s.core().net_name(s.core().gate(gate as usize).output),
                pin
            ),
            FaultSite::GateOutput { gate } => format!(
                "gate:{}:out",
                s.core().net_name(s.core().gate(gate as usize).output)
            ),
        };
        format!("{}/{}", site, if self.stuck { 1 } else { 0 })
    }

    pub fn parse_line(line: &str, s: &ScanNetlist) -> Result<Fault, FaultParseError> {
        let (site_text, pol) = line
            .rsplit_once('/')
            .ok_or_else(|| FaultParseError::Malformed { line: line.to_string() })?;
        let stuck = match pol.trim() {
            "0" => false,
            "1" => true,
            _ => return Err(FaultParseError::Malformed { line: line.to_string() }),
        };
        let parts: Vec<&str> = site_text.trim().split(':').collect();
        let site = match parts.as_slice() {
            ["port", name] => {
                let net = s
                    .core()
                    .net_id(name)
                    .ok_or_else(|| FaultParseError::UnknownNet { name: name.to_string() })?;
                FaultSite::Port { net: net.0 }
            }
            ["gate", name, rest] => {
                let net = s
                    .core()
                    .net_id(name)
                    .ok_or_else(|| FaultParseError::UnknownNet { name: name.to_string() })?;
                let gate = match s.core().driver(net) {
                    crate::netlist::Driver::Gate(g) => g,
                    _ => return Err(FaultParseError::NotAGate { name: name.to_string() }),
                };
                if *rest == "out" {
                    FaultSite::GateOutput { gate }
                } else if let Some(k) = rest.strip_prefix("in") {
                    let pin: u32 = k
                        .parse()
                        .map_err(|_| FaultParseError::Malformed { line: line.to_string() })?;
                    if pin as usize >= s.core().gate(gate as usize).inputs.len() {
                        return Err(FaultParseError::PinOutOfRange {
                            name: name.to_string(),
                            pin,
                        });
                    }
                    FaultSite::GateInput { gate, pin }
                } else {
                    return Err(FaultParseError::Malformed { line: line.to_string() });
                }
            }
            _ => return Err(FaultParseError::Malformed { line: line.to_string() }),
        };
        Ok(Fault { site, stuck })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FaultParseError {
    #[error("malformed fault line: {line}")]
    Malformed { line: String },
    #[error("unknown net in fault line: {name}")]
    UnknownNet { name: String },
    #[error("net {name} is not a gate output")]
    NotAGate { name: String },
    #[error("pin {pin} out of range for gate {name}")]
    PinOutOfRange { name: String, pin: u32 },
}

/// Constraint category a safe fault is attributed to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    ResetLogic,
    SprAddressing,
    MemoryAccess,
    PcUpdateLogic,
    DecodingLogic,
    UnusedInstructions,
    UserDefined(String),
}

impl Category {
    pub const STANDARD: [Category; 6] = [
        Category::ResetLogic,
        Category::SprAddressing,
        Category::MemoryAccess,
        Category::PcUpdateLogic,
        Category::DecodingLogic,
        Category::UnusedInstructions,
    ];

    pub fn keyword(&self) -> String {
        match self {
            Category::ResetLogic => "reset_logic".into(),
            Category::SprAddressing => "spr_addressing".into(),
            Category::MemoryAccess => "memory_access".into(),
            Category::PcUpdateLogic => "pc_update_logic".into(),
            Category::DecodingLogic => "decoding_logic".into(),
            Category::UnusedInstructions => "unused_instructions".into(),
            Category::UserDefined(name) => format!("user:{name}"),
        }
    }

    pub fn parse(word: &str) -> Option<Category> {
        match word {
            "reset_logic" => Some(Category::ResetLogic),
            "spr_addressing" => Some(Category::SprAddressing),
            "memory_access" => Some(Category::MemoryAccess),
            "pc_update_logic" => Some(Category::PcUpdateLogic),
            "decoding_logic" => Some(Category::DecodingLogic),
            "unused_instructions" => Some(Category::UnusedInstructions),
            other => other.strip_prefix("user:").map(|n| Category::UserDefined(n.to_string())),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.keyword())
    }
}

/// Final classification of one fault after an analysis run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaultClass {
    /// A witness pattern proves the fault detectable under the constraints.
    Testable(TestPattern),
    /// Untestable even with the block fully controllable and observable.
    StructurallyUntestable,
    /// Testable in isolation, proven untestable under the named constraint
    /// category.
    ConstraintUntestable(Category),
    /// The decision budget ran out; counted as not safe.
    Aborted,
}

impl FaultClass {
    pub fn code(&self) -> char {
        match self {
            FaultClass::Testable(_) => 'T',
            FaultClass::StructurallyUntestable => 'U',
            FaultClass::ConstraintUntestable(_) => 'S',
            FaultClass::Aborted => 'A',
        }
    }

    pub fn is_safe(&self) -> bool {
        matches!(
            self,
            FaultClass::StructurallyUntestable | FaultClass::ConstraintUntestable(_)
        )
    }
}

/// Enumerate the full uncollapsed fault universe of a scan netlist:
/// stuck-at-0 and stuck-at-1 on every input port (primary and pseudo), every
/// gate input pin, and every gate output. Order is deterministic: ports in
/// pattern order, then gates by index with input pins before the output,
/// stuck-at-0 before stuck-at-1. Monitor circuitry added later by the
/// constraint engine never appears here.
pub fn enumerate_faults(s: &ScanNetlist) -> Vec<Fault> {
    let mut faults = Vec::new();
    for &net in s.input_nets() {
        for stuck in [false, true] {
            faults.push(Fault { site: FaultSite::Port { net: net.0 }, stuck });
        }
    }
    for (gi, g) in s.core().gates().iter().enumerate() {
        for pin in 0..g.inputs.len() {
            for stuck in [false, true] {
                faults.push(Fault {
                    site: FaultSite::GateInput { gate: gi as u32, pin: pin as u32 },
                    stuck,
                });
            }
        }
        for stuck in [false, true] {
            faults.push(Fault { site: FaultSite::GateOutput { gate: gi as u32 }, stuck });
        }
    }
    faults
}

/// Partition of a fault list into structural equivalence classes.
#[derive(Debug, Clone)]
pub struct Collapse {
    /// For each fault index, the index of its class representative (the
    /// lowest fault in enumeration order within the class).
    rep_of: Vec<usize>,
}

impl Collapse {
    pub fn representative(&self, fault_idx: usize) -> usize {
        self.rep_of[fault_idx]
    }

    pub fn representatives(&self) -> Vec<usize> {
        let mut reps: Vec<usize> = (0..self.rep_of.len()).filter(|&i| self.rep_of[i] == i).collect();
        reps.sort_unstable();
        reps
    }

    pub fn class_count(&self) -> usize {
        self.rep_of.iter().enumerate().filter(|&(i, &r)| i == r).count()
    }

    /// Classes ordered by representative index, members in enumeration order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let reps = self.representatives();
        let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut classes = vec![Vec::new(); reps.len()];
        for (i, &r) in self.rep_of.iter().enumerate() {
            classes[pos[&r]].push(i);
        }
        classes
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the lowest index as the representative
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Collapse faults by local structural rules only:
///
/// - AND/NAND: any input stuck-at-0 is equivalent to the output stuck-at-0
///   (AND) or stuck-at-1 (NAND); dually for OR/NOR with stuck-at-1.
/// - NOT/BUF: input faults pair with output faults, with or without the
///   polarity flip.
/// - A net's source fault (port or driving gate output) pairs with the sole
///   sink pin fault when the net feeds exactly one pin and is not observed
///   directly.
///
/// Representative is the lowest fault in enumeration order. Fan-out stems
/// and branches are never merged.
pub fn collapse_equivalent(faults: &[Fault], s: &ScanNetlist) -> Collapse {
    use crate::netlist::GateKind;

    let index: HashMap<Fault, usize> = faults.iter().copied().enumerate().map(|(i, f)| (f, i)).collect();
    let mut uf = UnionFind::new(faults.len());
    let merge = |uf: &mut UnionFind, a: Fault, b: Fault| {
        if let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) {
            uf.union(ia, ib);
        }
    };

    for (gi, g) in s.core().gates().iter().enumerate() {
        let gate = gi as u32;
        let out = |stuck| Fault { site: FaultSite::GateOutput { gate }, stuck };
        for pin in 0..g.inputs.len() as u32 {
            let inp = |stuck| Fault { site: FaultSite::GateInput { gate, pin }, stuck };
            match g.kind {
                GateKind::And => merge(&mut uf, inp(false), out(false)),
                GateKind::Nand => merge(&mut uf, inp(false), out(true)),
                GateKind::Or => merge(&mut uf, inp(true), out(true)),
                GateKind::Nor => merge(&mut uf, inp(true), out(false)),
                GateKind::Not => {
                    merge(&mut uf, inp(false), out(true));
                    merge(&mut uf, inp(true), out(false));
                }
                GateKind::Buf => {
                    merge(&mut uf, inp(false), out(false));
                    merge(&mut uf, inp(true), out(true));
                }
                GateKind::Xor | GateKind::Xnor => {}
                GateKind::Dff => unreachable!("scan netlists hold no DFFs"),
            }
        }
    }

    // source fault <-> sole sink pin fault, same polarity, at fan-out one
    let observed: Vec<bool> = {
        let mut v = vec![false; s.core().net_count()];
        for &o in s.observables() {
            v[o.index()] = true;
        }
        v
    };
    for net in 0..s.core().net_count() as u32 {
        let id = crate::netlist::NetId(net);
        if observed[id.index()] {
            continue;
        }
        let sinks = s.sinks(id);
        if sinks.len() != 1 {
            continue;
        }
        let (gate, pin) = sinks[0];
        let source = match s.core().driver(id) {
            crate::netlist::Driver::Gate(g) => Some(FaultSite::GateOutput { gate: g }),
            crate::netlist::Driver::PrimaryInput | crate::netlist::Driver::PseudoInput => {
                Some(FaultSite::Port { net })
            }
            crate::netlist::Driver::Undriven => None,
        };
        if let Some(site) = source {
            for stuck in [false, true] {
                merge(
                    &mut uf,
                    Fault { site, stuck },
                    Fault { site: FaultSite::GateInput { gate, pin }, stuck },
                );
            }
        }
    }

    let rep_of = (0..faults.len()).map(|i| uf.find(i)).collect();
    Collapse { rep_of }
}
