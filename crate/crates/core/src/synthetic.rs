//! Deterministic random netlists and constraint sets for testing and
//! benchmarking. The generator is seeded and self-contained so frozen test
//! expectations stay valid across platforms and dependency bumps.

use crate::constraint::{Constraint, ConstraintSet, Cube, CubeBit};
use crate::fault::Category;
use crate::netlist::{GateKind, Netlist, NetlistBuilder};
use crate::scan::ScanNetlist;

/// SplitMix64; passes through all 2^64 states, good enough for test stimuli.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn flag(&mut self) -> bool {
        self.next_u64() & 1 != 0
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

/// Bounds for [`random_netlist`].
#[derive(Debug, Clone, Copy)]
pub struct NetlistShape {
    /// Total controllable inputs (primary inputs plus flip-flops).
    pub max_inputs: usize,
    pub max_gates: usize,
    pub with_dffs: bool,
}

impl Default for NetlistShape {
    fn default() -> Self {
        NetlistShape { max_inputs: 10, max_gates: 40, with_dffs: true }
    }
}

/// Generate a valid netlist: random combinational gates over the nets built
/// so far, optionally some flip-flops, and every sink-less gate output
/// promoted to a primary output.
pub fn random_netlist(seed: u64, shape: NetlistShape) -> Netlist {
    let mut rng = Rng::new(seed);
    let mut b = NetlistBuilder::new();

    let n_pis = 1 + rng.below(shape.max_inputs as u64) as usize;
    let dff_budget = if shape.with_dffs { shape.max_inputs - n_pis } else { 0 };
    let n_dffs = if dff_budget > 0 { rng.below(dff_budget as u64 + 1) as usize } else { 0 };
    let n_gates = 1 + rng.below(shape.max_gates as u64) as usize;

    let mut nets: Vec<String> = Vec::new();
    for i in 0..n_pis {
        let name = format!("i{i}");
        b.add_input(&name);
        nets.push(name);
    }
    // flip-flop outputs are sources too; their data inputs are wired last
    for k in 0..n_dffs {
        nets.push(format!("q{k}"));
    }

    const COMB: [GateKind; 8] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
    ];
    for k in 0..n_gates {
        let kind = *rng.pick(&COMB);
        let arity = if kind.is_unary() { 1 } else { 2 + rng.below(2) as usize };
        let mut ins: Vec<String> = Vec::with_capacity(arity);
        for _ in 0..arity {
            ins.push(rng.pick(&nets).clone());
        }
        let out = format!("n{k}");
        let in_refs: Vec<&str> = ins.iter().map(|s| s.as_str()).collect();
        b.add_gate(kind, &out, &in_refs);
        nets.push(out);
    }
    for k in 0..n_dffs {
        let d = rng.pick(&nets).clone();
        b.add_gate(GateKind::Dff, &format!("q{k}"), &[&d]);
    }

    // second pass: observe every net nothing reads
    let snapshot = b.build();
    let mut read: Vec<bool> = vec![false; snapshot.net_count()];
    let mut b2 = NetlistBuilder::new();
    for &pi in snapshot.primary_inputs() {
        b2.add_input(snapshot.net_name(pi));
    }
    for g in snapshot.gates() {
        for &i in &g.inputs {
            read[i.index()] = true;
        }
    }
    let mut has_output = false;
    for g in snapshot.gates() {
        let ins: Vec<&str> = g.inputs.iter().map(|&i| snapshot.net_name(i)).collect();
        b2.add_gate(g.kind, snapshot.net_name(g.output), &ins);
        if g.kind != GateKind::Dff && !read[g.output.index()] {
            b2.add_output(snapshot.net_name(g.output));
            has_output = true;
        }
    }
    if !has_output {
        // every gate feeds something else; observe the last one
        let last = snapshot
            .gates()
            .iter()
            .rev()
            .find(|g| g.kind != GateKind::Dff)
            .map(|g| snapshot.net_name(g.output).to_string());
        match last {
            Some(name) => {
                b2.add_output(&name);
            }
            None => {
                b2.add_output(snapshot.net_name(snapshot.primary_inputs()[0]));
            }
        }
    }
    let result = b2.build();
    debug_assert!(result.validate().is_empty(), "generator produced {:?}", result.validate());
    result
}

/// Bounds for [`random_constraint_sets`].
#[derive(Debug, Clone, Copy)]
pub struct ConstraintShape {
    pub max_fixes: usize,
    pub max_forbids: usize,
    pub max_forbid_nets: usize,
    pub max_cubes: usize,
}

impl Default for ConstraintShape {
    fn default() -> Self {
        ConstraintShape { max_fixes: 3, max_forbids: 2, max_forbid_nets: 4, max_cubes: 3 }
    }
}

/// Generate constraint sets against a scan netlist: up to `max_fixes` ties
/// on distinct nets (ports or internal) and up to `max_forbids` forbidden
/// combinations. Can return an empty list.
pub fn random_constraint_sets(
    seed: u64,
    scan: &ScanNetlist,
    shape: ConstraintShape,
) -> Vec<ConstraintSet> {
    let mut rng = Rng::new(seed ^ 0xc0ffee);
    let all_nets: Vec<String> =
        (0..scan.core().net_count()).map(|i| scan.core().net_name(crate::netlist::NetId(i as u32)).to_string()).collect();

    let n_fixes = rng.below(shape.max_fixes as u64 + 1) as usize;
    let n_forbids = rng.below(shape.max_forbids as u64 + 1) as usize;

    let mut sets = Vec::new();
    let mut fixed: Vec<String> = Vec::new();
    let mut cat_cycle = Category::STANDARD.iter().cycle();

    let mut fix_constraints = Vec::new();
    for _ in 0..n_fixes {
        let net = rng.pick(&all_nets).clone();
        if fixed.contains(&net) {
            continue;
        }
        fixed.push(net.clone());
        fix_constraints.push(Constraint::Fix { net, value: rng.flag() });
    }
    if !fix_constraints.is_empty() {
        let category = cat_cycle.next().unwrap().clone();
        sets.push(ConstraintSet {
            name: category.keyword(),
            category,
            constraints: fix_constraints,
        });
    }

    for _ in 0..n_forbids {
        let n_nets = 1 + rng.below(shape.max_forbid_nets.min(all_nets.len()) as u64) as usize;
        let mut nets = Vec::with_capacity(n_nets);
        for _ in 0..n_nets {
            nets.push(rng.pick(&all_nets).clone());
        }
        let n_cubes = 1 + rng.below(shape.max_cubes as u64) as usize;
        let mut cubes = Vec::with_capacity(n_cubes);
        for _ in 0..n_cubes {
            let mut bits = Vec::with_capacity(n_nets);
            loop {
                bits.clear();
                for _ in 0..n_nets {
                    bits.push(match rng.below(3) {
                        0 => CubeBit::Zero,
                        1 => CubeBit::One,
                        _ => CubeBit::DontCare,
                    });
                }
                if !bits.iter().all(|b| *b == CubeBit::DontCare) {
                    break;
                }
            }
            cubes.push(Cube(bits.clone()));
        }
        let category = cat_cycle.next().unwrap().clone();
        sets.push(ConstraintSet {
            name: category.keyword(),
            category,
            constraints: vec![Constraint::Forbid { nets, cubes }],
        });
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::augment;
    use crate::scan::scan_transform;

    #[test]
    fn generated_netlists_are_valid_and_scannable() {
        for seed in 0..200 {
            let n = random_netlist(seed, NetlistShape::default());
            assert!(n.validate().is_empty(), "seed {seed}");
            let s = scan_transform(&n).unwrap();
            assert!(s.width() <= 10, "seed {seed}");
            assert!(!s.observables().is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn generated_constraints_apply_cleanly() {
        for seed in 0..200 {
            let n = random_netlist(seed, NetlistShape::default());
            let s = scan_transform(&n).unwrap();
            let sets = random_constraint_sets(seed, &s, ConstraintShape::default());
            augment(&s, &sets).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_netlist(7, NetlistShape::default());
        let b = random_netlist(7, NetlistShape::default());
        assert_eq!(crate::bench::to_bench_string(&a), crate::bench::to_bench_string(&b));
    }
}
