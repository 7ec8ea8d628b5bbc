//! Per-fault testability decisions under operational constraints.
//!
//! [`classify_fault`] answers, for one stuck-at fault: does an admissible
//! input pattern exist on which the faulty machine disagrees with the good
//! machine at some observed output? The decision is complete: `Untestable`
//! is a proof, not a timeout. It is realized as a miter: a good circuit copy
//! carrying the tie and monitor-output facts, a faulty copy for the fault's
//! fan-out cone (everything outside the cone is shared), and a disjunction
//! of output differences, handed to the CDCL solver with a decision budget.
//! An exhausted budget is reported as `Aborted` and never as `Untestable`.
//!
//! [`brute_force_classify`] is the independent oracle: it enumerates every
//! input pattern, filters to the admissible ones, and replays good and
//! faulty machines, with no solver involved.

use crate::constraint::AugmentedNetlist;
use crate::fault::{Fault, FaultSite};
use crate::netlist::{GateKind, NetId};
use crate::pattern::TestPattern;
use crate::sim::{
    diff_words, enumeration_block, eval_words, fault_cone, simulate, simulate_fault, site_exists,
    SimError,
};
use crate::solver::{Lit, SolveOutcome, Solver, Var};
use rayon::prelude::*;
use thiserror::Error;

/// Largest input count the exhaustive oracle accepts (2^20 patterns).
pub const BRUTE_FORCE_INPUT_CAP: usize = 20;

/// Default decision budget per fault.
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// An admissible pattern on which good and faulty outputs differ.
    Testable(TestPattern),
    /// Proven: no admissible pattern detects the fault.
    Untestable,
    /// Decision budget exhausted; counts as not safe.
    Aborted { decisions: u64 },
}

impl Verdict {
    pub fn is_testable(&self) -> bool {
        matches!(self, Verdict::Testable(_))
    }

    pub fn is_untestable(&self) -> bool {
        matches!(self, Verdict::Untestable)
    }

    pub fn is_aborted(&self) -> bool {
        matches!(self, Verdict::Aborted { .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AtpgError {
    #[error("fault site not in netlist: {fault:?}")]
    FaultSiteNotInNetlist { fault: Fault },
    #[error("netlist has {inputs} inputs, over the exhaustive cap of {cap}")]
    InputCountOverCap { inputs: usize, cap: usize },
    #[error("witness replay failed for fault {fault:?}: the engine produced a non-detecting or inadmissible witness")]
    WitnessReplayFailed { fault: Fault },
    #[error(transparent)]
    Sim(#[from] SimError),
}

// ---------------------------------------------------------------------------
// CNF encoding
// ---------------------------------------------------------------------------

fn encode_xor2(s: &mut Solver, out: Lit, a: Lit, b: Lit) {
    s.add_clause(&[!out, a, b]);
    s.add_clause(&[!out, !a, !b]);
    s.add_clause(&[out, !a, b]);
    s.add_clause(&[out, a, !b]);
}

fn encode_xnor2(s: &mut Solver, out: Lit, a: Lit, b: Lit) {
    encode_xor2(s, !out, a, b);
}

/// Clauses for `out = kind(ins)`.
fn encode_gate(s: &mut Solver, kind: GateKind, out: Lit, ins: &[Lit]) {
    match kind {
        GateKind::And => {
            let mut long: Vec<Lit> = ins.iter().map(|&i| !i).collect();
            long.push(out);
            for &i in ins {
                s.add_clause(&[!out, i]);
            }
            s.add_clause(&long);
        }
        GateKind::Nand => {
            let mut long: Vec<Lit> = ins.iter().map(|&i| !i).collect();
            long.push(!out);
            for &i in ins {
                s.add_clause(&[out, i]);
            }
            s.add_clause(&long);
        }
        GateKind::Or => {
            let mut long: Vec<Lit> = ins.to_vec();
            long.push(!out);
            for &i in ins {
                s.add_clause(&[out, !i]);
            }
            s.add_clause(&long);
        }
        GateKind::Nor => {
            let mut long: Vec<Lit> = ins.to_vec();
            long.push(out);
            for &i in ins {
                s.add_clause(&[!out, !i]);
            }
            s.add_clause(&long);
        }
        GateKind::Not => {
            s.add_clause(&[!out, !ins[0]]);
            s.add_clause(&[out, ins[0]]);
        }
        GateKind::Buf => {
            s.add_clause(&[!out, ins[0]]);
            s.add_clause(&[out, !ins[0]]);
        }
        GateKind::Xor | GateKind::Xnor => {
            let mut acc = ins[0];
            for &next in &ins[1..ins.len() - 1] {
                let t = Lit::positive(s.new_var());
                encode_xor2(s, t, acc, next);
                acc = t;
            }
            let last = ins[ins.len() - 1];
            if kind == GateKind::Xor {
                encode_xor2(s, out, acc, last);
            } else {
                encode_xnor2(s, out, acc, last);
            }
        }
        GateKind::Dff => unreachable!("scan netlists hold no DFFs"),
    }
}

fn unit(s: &mut Solver, var: Var, value: bool) {
    s.add_clause(&[Lit::new(var, value)]);
}

/// Decide one fault under the constraints with a complete search.
pub fn classify_fault(a: &AugmentedNetlist, fault: Fault, budget: u64) -> Result<Verdict, AtpgError> {
    let base = a.base();
    if !site_exists(base, fault) {
        return Err(AtpgError::FaultSiteNotInNetlist { fault });
    }
    if budget == 0 {
        return Ok(Verdict::Aborted { decisions: 0 });
    }

    let (cone_gates, in_cone) = fault_cone(base, fault);
    let mut observed: Vec<NetId> = base
        .observables()
        .iter()
        .copied()
        .filter(|o| in_cone[o.index()])
        .collect();
    observed.sort_unstable();
    observed.dedup();
    if observed.is_empty() {
        return Ok(Verdict::Untestable);
    }

    let mut s = Solver::new();
    let net_count = base.core().net_count();

    // The good copy only has to cover the support of what the instance
    // actually constrains: the observed outputs in the cone, the tied nets,
    // the nets the monitors read, and every net the faulty copy shares.
    let mut needed = vec![false; net_count];
    let mut worklist: Vec<NetId> = Vec::new();
    let require = |needed: &mut Vec<bool>, worklist: &mut Vec<NetId>, n: NetId| {
        if !needed[n.index()] {
            needed[n.index()] = true;
            worklist.push(n);
        }
    };
    for &o in &observed {
        require(&mut needed, &mut worklist, o);
    }
    for &net in a.tied_nets().keys() {
        require(&mut needed, &mut worklist, net);
    }
    for forbid in a.forbids() {
        for &net in &forbid.nets {
            require(&mut needed, &mut worklist, net);
        }
    }
    for &gi in &cone_gates {
        for &i in &base.core().gate(gi as usize).inputs {
            if !in_cone[i.index()] {
                require(&mut needed, &mut worklist, i);
            }
        }
    }
    while let Some(n) = worklist.pop() {
        if let crate::netlist::Driver::Gate(gi) = base.core().driver(n) {
            for &i in &base.core().gate(gi as usize).inputs {
                require(&mut needed, &mut worklist, i);
            }
        }
    }

    // good copy: variables for the needed base nets and all monitor nets,
    // allocated in net-id order so runs stay deterministic
    let mut gvar: Vec<Option<Var>> = vec![None; net_count + a.monitor_net_count()];
    for (i, slot) in gvar.iter_mut().enumerate() {
        if i >= net_count || needed[i] {
            *slot = Some(s.new_var());
        }
    }
    let gvar = gvar;
    let gv = |n: NetId| -> Var { gvar[n.index()].expect("net outside the encoded support") };
    for &gi in base.topo_order() {
        let g = base.core().gate(gi as usize);
        if !needed[g.output.index()] {
            continue;
        }
        let ins: Vec<Lit> = g.inputs.iter().map(|&i| Lit::positive(gv(i))).collect();
        encode_gate(&mut s, g.kind, Lit::positive(gv(g.output)), &ins);
    }
    for g in a.monitor_gates() {
        let ins: Vec<Lit> = g.inputs.iter().map(|&i| Lit::positive(gv(i))).collect();
        encode_gate(&mut s, g.kind, Lit::positive(gv(g.output)), &ins);
    }
    // admissibility: ties as unit facts, monitor outputs held at 0
    for (&net, &value) in a.tied_nets() {
        unit(&mut s, gv(net), value);
    }
    for &m in a.monitor_outputs() {
        unit(&mut s, gv(m), false);
    }

    // faulty copy, only for the fan-out cone
    let mut fvar: Vec<Option<Var>> = vec![None; net_count];
    for (i, &cone) in in_cone.iter().enumerate() {
        if cone {
            fvar[i] = Some(s.new_var());
        }
    }
    let read = |net: NetId, fvar: &[Option<Var>]| -> Lit {
        match fvar[net.index()] {
            Some(v) => Lit::positive(v),
            None => Lit::positive(gv(net)),
        }
    };
    let mut skip_gate = None;
    match fault.site {
        FaultSite::Port { net } => {
            unit(&mut s, fvar[net as usize].unwrap(), fault.stuck);
        }
        FaultSite::GateOutput { gate } => {
            let out = base.core().gate(gate as usize).output;
            unit(&mut s, fvar[out.index()].unwrap(), fault.stuck);
            skip_gate = Some(gate);
        }
        FaultSite::GateInput { gate, pin } => {
            let g = base.core().gate(gate as usize);
            let pin_var = s.new_var();
            unit(&mut s, pin_var, fault.stuck);
            let ins: Vec<Lit> = g
                .inputs
                .iter()
                .enumerate()
                .map(|(j, i)| {
                    if j as u32 == pin {
                        Lit::positive(pin_var)
                    } else {
                        // inputs of the faulted gate are upstream of the
                        // divergence point, hence shared with the good copy
                        Lit::positive(gv(*i))
                    }
                })
                .collect();
            encode_gate(&mut s, g.kind, Lit::positive(fvar[g.output.index()].unwrap()), &ins);
            skip_gate = Some(gate);
        }
    }
    for &gi in &cone_gates {
        if Some(gi) == skip_gate {
            continue;
        }
        let g = base.core().gate(gi as usize);
        let ins: Vec<Lit> = g.inputs.iter().map(|&i| read(i, &fvar)).collect();
        encode_gate(&mut s, g.kind, Lit::positive(fvar[g.output.index()].unwrap()), &ins);
    }

    // miter: some observed output differs
    let mut diffs = Vec::with_capacity(observed.len());
    for &o in &observed {
        let d = Lit::positive(s.new_var());
        encode_xor2(
            &mut s,
            d,
            Lit::positive(gv(o)),
            Lit::positive(fvar[o.index()].unwrap()),
        );
        diffs.push(d);
    }
    s.add_clause(&diffs);

    match s.solve(budget) {
        SolveOutcome::Unsat => Ok(Verdict::Untestable),
        SolveOutcome::Budget { decisions } => Ok(Verdict::Aborted { decisions }),
        SolveOutcome::Sat => {
            // inputs outside the encoded support cannot influence detection
            // or admissibility; fix them low for a deterministic witness
            let bits: Vec<bool> = base
                .input_nets()
                .iter()
                .map(|n| gvar[n.index()].map(|v| s.value(v)).unwrap_or(false))
                .collect();
            let witness = TestPattern::new(bits);
            if !replay_detects(a, fault, &witness)? {
                return Err(AtpgError::WitnessReplayFailed { fault });
            }
            Ok(Verdict::Testable(witness))
        }
    }
}

/// Replay a witness: admissible, and good vs faulty outputs differ.
pub fn replay_detects(
    a: &AugmentedNetlist,
    fault: Fault,
    witness: &TestPattern,
) -> Result<bool, SimError> {
    if !a.admissible(witness)? {
        return Ok(false);
    }
    let good = simulate(a.base(), witness)?;
    let faulty = simulate_fault(a.base(), witness, fault)?;
    Ok(good != faulty)
}

/// Classify a whole fault list. Work fans out across the thread pool; the
/// verdict list is index-aligned with the input and independent of worker
/// count and evaluation order.
pub fn classify_all(
    a: &AugmentedNetlist,
    faults: &[Fault],
    budget: u64,
) -> Result<Vec<Verdict>, AtpgError> {
    faults
        .par_iter()
        .map(|&f| classify_fault(a, f, budget))
        .collect()
}

/// Exhaustive oracle: enumerate all input patterns in lexicographic order,
/// keep the admissible ones, and return the first detecting pattern as the
/// witness. Never aborts. Capped at [`BRUTE_FORCE_INPUT_CAP`] inputs.
pub fn brute_force_classify(a: &AugmentedNetlist, fault: Fault) -> Result<Verdict, AtpgError> {
    let base = a.base();
    if !site_exists(base, fault) {
        return Err(AtpgError::FaultSiteNotInNetlist { fault });
    }
    let width = base.width();
    if width > BRUTE_FORCE_INPUT_CAP {
        return Err(AtpgError::InputCountOverCap { inputs: width, cap: BRUTE_FORCE_INPUT_CAP });
    }
    let (cone_gates, in_cone) = fault_cone(base, fault);
    let total: u64 = 1u64 << width;
    let mut start = 0u64;
    while start < total {
        let lanes = (total - start).min(64);
        let lane_mask = if lanes == 64 { !0u64 } else { (1u64 << lanes) - 1 };
        let inputs = enumeration_block(width, start, total);
        let good = eval_words(base, &inputs, None);
        let admissible = a.admissible_mask(&good) & lane_mask;
        if admissible != 0 {
            let diff = diff_words(base, &good, fault, &cone_gates, &in_cone);
            let detecting = diff & admissible;
            if detecting != 0 {
                let idx = start + detecting.trailing_zeros() as u64;
                return Ok(Verdict::Testable(TestPattern::from_index(idx, width)));
            }
        }
        start += 64;
    }
    Ok(Verdict::Untestable)
}

/// Oracle over a fault list.
pub fn brute_force_classify_all(
    a: &AugmentedNetlist,
    faults: &[Fault],
) -> Result<Vec<Verdict>, AtpgError> {
    faults.iter().map(|&f| brute_force_classify(a, f)).collect()
}

/// How a fault list is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Miter plus CDCL search with a per-fault decision budget.
    Sat { budget: u64 },
    /// Exhaustive enumeration; input-count capped.
    BruteForce,
}

impl Engine {
    pub fn classify_all(
        self,
        a: &AugmentedNetlist,
        faults: &[Fault],
    ) -> Result<Vec<Verdict>, AtpgError> {
        match self {
            Engine::Sat { budget } => classify_all(a, faults, budget),
            Engine::BruteForce => brute_force_classify_all(a, faults),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::parse_bench;
    use crate::constraint::{augment, parse_constraints};
    use crate::fault::enumerate_faults;
    use crate::scan::{scan_transform, ScanNetlist};

    fn and2() -> ScanNetlist {
        scan_transform(&parse_bench("INPUT(a) INPUT(b) OUTPUT(c) c = AND(a,b)").unwrap()).unwrap()
    }

    fn aug(s: &ScanNetlist, cons: &str) -> AugmentedNetlist {
        augment(s, &parse_constraints(cons).unwrap()).unwrap()
    }

    fn fault_named(s: &ScanNetlist, line: &str) -> Fault {
        Fault::parse_line(line, s).unwrap()
    }

    #[test]
    fn unconstrained_and2_output_stuck_low_needs_both_high() {
        let s = and2();
        let a = augment(&s, &[]).unwrap();
        let f = fault_named(&s, "gate:c:out/0");
        match classify_fault(&a, f, DEFAULT_BUDGET).unwrap() {
            Verdict::Testable(w) => assert_eq!(w.to_string(), "11"),
            other => panic!("expected testable, got {other:?}"),
        }
    }

    #[test]
    fn tie_makes_activation_impossible() {
        let s = and2();
        let a = aug(&s, "set reset_logic { fix a = 0 }");
        let f = fault_named(&s, "gate:c:in0/0");
        assert_eq!(classify_fault(&a, f, DEFAULT_BUDGET).unwrap(), Verdict::Untestable);
    }

    #[test]
    fn and2_with_a_tied_low_splits_four_untestable_two_testable() {
        let s = and2();
        let a = aug(&s, "set reset_logic { fix a = 0 }");
        let untestable = ["gate:c:in0/0", "gate:c:in1/0", "gate:c:in1/1", "gate:c:out/0"];
        for line in untestable {
            let f = fault_named(&s, line);
            assert_eq!(
                classify_fault(&a, f, DEFAULT_BUDGET).unwrap(),
                Verdict::Untestable,
                "{line}"
            );
        }
        let f = fault_named(&s, "gate:c:in0/1");
        match classify_fault(&a, f, DEFAULT_BUDGET).unwrap() {
            Verdict::Testable(w) => assert_eq!(w.to_string(), "01"),
            other => panic!("expected testable, got {other:?}"),
        }
        let f = fault_named(&s, "gate:c:out/1");
        assert!(classify_fault(&a, f, DEFAULT_BUDGET).unwrap().is_testable());
    }

    #[test]
    fn and2_with_forbidden_combination_splits_three_three() {
        let s = and2();
        let a = aug(&s, "set unused_instructions { forbid (a,b) in {11} }");
        for line in ["gate:c:in0/0", "gate:c:in1/0", "gate:c:out/0"] {
            let f = fault_named(&s, line);
            assert_eq!(
                classify_fault(&a, f, DEFAULT_BUDGET).unwrap(),
                Verdict::Untestable,
                "{line}"
            );
        }
        for line in ["gate:c:in0/1", "gate:c:in1/1", "gate:c:out/1"] {
            let f = fault_named(&s, line);
            assert!(classify_fault(&a, f, DEFAULT_BUDGET).unwrap().is_testable(), "{line}");
        }
    }

    #[test]
    fn unconstrained_and2_is_fully_testable() {
        let s = and2();
        let a = augment(&s, &[]).unwrap();
        let faults = enumerate_faults(&s);
        let verdicts = classify_all(&a, &faults, DEFAULT_BUDGET).unwrap();
        assert_eq!(verdicts.len(), 10);
        assert!(verdicts.iter().all(|v| v.is_testable()));
    }

    #[test]
    fn zero_budget_aborts_every_fault() {
        let s = and2();
        let a = augment(&s, &[]).unwrap();
        let faults = enumerate_faults(&s);
        let verdicts = classify_all(&a, &faults, 0).unwrap();
        assert!(verdicts.iter().all(|v| v.is_aborted()));
    }

    #[test]
    fn oracle_witness_is_lexicographically_first() {
        let s = and2();
        let a = aug(&s, "set reset_logic { fix a = 0 }");
        let f = fault_named(&s, "gate:c:out/1");
        match brute_force_classify(&a, f).unwrap() {
            Verdict::Testable(w) => assert_eq!(w.to_string(), "00"),
            other => panic!("expected testable, got {other:?}"),
        }
    }

    #[test]
    fn oracle_proves_forbidden_output_unreachable() {
        let s = and2();
        let a = aug(&s, "set unused_instructions { forbid (a,b) in {11} }");
        let f = fault_named(&s, "gate:c:out/0");
        assert_eq!(brute_force_classify(&a, f).unwrap(), Verdict::Untestable);
    }

    #[test]
    fn buffer_output_fault_has_obvious_witness() {
        let s = scan_transform(&parse_bench("INPUT(x) OUTPUT(y) y = BUF(x)").unwrap()).unwrap();
        let a = augment(&s, &[]).unwrap();
        let f = fault_named(&s, "gate:y:out/0");
        match brute_force_classify(&a, f).unwrap() {
            Verdict::Testable(w) => assert_eq!(w.to_string(), "1"),
            other => panic!("expected testable, got {other:?}"),
        }
    }

    #[test]
    fn dangling_input_port_fault_is_untestable() {
        let s = scan_transform(&parse_bench("INPUT(a) INPUT(b) OUTPUT(b)").unwrap()).unwrap();
        let a = augment(&s, &[]).unwrap();
        let net = s.core().net_id("a").unwrap().0;
        let f = Fault { site: FaultSite::Port { net }, stuck: true };
        assert_eq!(classify_fault(&a, f, DEFAULT_BUDGET).unwrap(), Verdict::Untestable);
        assert_eq!(brute_force_classify(&a, f).unwrap(), Verdict::Untestable);
    }

    #[test]
    fn structural_redundancy_is_untestable_without_constraints() {
        // y = OR(a, NOT(a)) is constantly 1
        let s = scan_transform(
            &parse_bench("INPUT(a) OUTPUT(y) na = NOT(a) y = OR(a,na)").unwrap(),
        )
        .unwrap();
        let a = augment(&s, &[]).unwrap();
        let f = fault_named(&s, "gate:y:out/1");
        assert_eq!(classify_fault(&a, f, DEFAULT_BUDGET).unwrap(), Verdict::Untestable);
        let f = fault_named(&s, "gate:y:out/0");
        assert!(classify_fault(&a, f, DEFAULT_BUDGET).unwrap().is_testable());
    }

    #[test]
    fn unknown_site_is_an_error() {
        let s = and2();
        let a = augment(&s, &[]).unwrap();
        let f = Fault { site: FaultSite::GateOutput { gate: 7 }, stuck: false };
        assert_eq!(
            classify_fault(&a, f, DEFAULT_BUDGET).unwrap_err(),
            AtpgError::FaultSiteNotInNetlist { fault: f }
        );
    }

    #[test]
    fn sat_and_oracle_agree_on_xor_tree_with_constraints() {
        let s = scan_transform(
            &parse_bench(
                "INPUT(a) INPUT(b) INPUT(c) INPUT(d) OUTPUT(y) t0 = XOR(a,b) t1 = NAND(c,d) y = NOR(t0,t1)",
            )
            .unwrap(),
        )
        .unwrap();
        let a = aug(&s, "set memory_access { fix d = 1 forbid (a,b) in {10} }");
        let faults = enumerate_faults(&s);
        let sat = classify_all(&a, &faults, 1_000_000).unwrap();
        let oracle = brute_force_classify_all(&a, &faults).unwrap();
        for (i, (sv, ov)) in sat.iter().zip(&oracle).enumerate() {
            assert_eq!(
                sv.is_testable(),
                ov.is_testable(),
                "fault {} disagrees: sat {:?} oracle {:?}",
                faults[i].to_line(&s),
                sv,
                ov
            );
        }
    }
}
