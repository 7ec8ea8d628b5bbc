//! Full-scan abstraction: every flip-flop becomes a directly controllable
//! and observable point, reducing the analysis to pure combinational logic.

use crate::netlist::{netlist_parts, netlist_with_pseudo_inputs, GateKind, NetId, Netlist, Violation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("netlist is not well-formed: {0}")]
    InvalidNetlist(Violation),
}

/// A combinational netlist with scan points. `core` holds zero DFFs; each
/// removed DFF contributes its output net to `pseudo_inputs` (now a
/// controllable port) and its input net to `pseudo_outputs` (now observed).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanNetlist {
    core: Netlist,
    pseudo_inputs: Vec<NetId>,
    pseudo_outputs: Vec<NetId>,
    /// Gate indices in evaluation order.
    topo: Vec<u32>,
    /// For each net, the gate input pins it feeds: (gate index, pin index).
    sinks: Vec<Vec<(u32, u32)>>,
    /// Primary outputs followed by pseudo outputs; the observation points.
    observables: Vec<NetId>,
    /// Primary inputs followed by pseudo inputs; pattern bit order.
    input_nets: Vec<NetId>,
}

impl ScanNetlist {
    pub fn core(&self) -> &Netlist {
        &self.core
    }

    pub fn pseudo_inputs(&self) -> &[NetId] {
        &self.pseudo_inputs
    }

    pub fn pseudo_outputs(&self) -> &[NetId] {
        &self.pseudo_outputs
    }

    /// Pattern width: primary inputs plus pseudo inputs.
    pub fn width(&self) -> usize {
        self.input_nets.len()
    }

    pub fn input_nets(&self) -> &[NetId] {
        &self.input_nets
    }

    pub fn observables(&self) -> &[NetId] {
        &self.observables
    }

    pub fn topo_order(&self) -> &[u32] {
        &self.topo
    }

    pub fn sinks(&self, net: NetId) -> &[(u32, u32)] {
        &self.sinks[net.index()]
    }

    /// Position of a net in the pattern bit order, if it is an input.
    pub fn input_position(&self, net: NetId) -> Option<usize> {
        self.input_nets.iter().position(|&n| n == net)
    }
}

/// Remove every DFF, exposing its output net as a pseudo primary input and
/// its input net as a pseudo primary output. All other structure is kept.
pub fn scan_transform(n: &Netlist) -> Result<ScanNetlist, ScanError> {
    if let Some(v) = n.validate().into_iter().next() {
        return Err(ScanError::InvalidNetlist(v));
    }

    let (names, name_to_id, gates, primary_inputs, primary_outputs) = netlist_parts(n);

    let mut pseudo_inputs = Vec::new();
    let mut pseudo_outputs = Vec::new();
    let mut comb_gates = Vec::new();
    for g in gates {
        if g.kind == GateKind::Dff {
            pseudo_inputs.push(g.output);
            pseudo_outputs.push(g.inputs[0]);
        } else {
            comb_gates.push(g);
        }
    }

    let core = netlist_with_pseudo_inputs(
        names,
        name_to_id,
        comb_gates,
        primary_inputs,
        primary_outputs,
        &pseudo_inputs,
    );

    let topo = topo_sort(&core).expect("valid netlist cannot have a combinational cycle");

    let mut sinks = vec![Vec::new(); core.net_count()];
    for (gi, g) in core.gates().iter().enumerate() {
        for (pin, &input) in g.inputs.iter().enumerate() {
            sinks[input.index()].push((gi as u32, pin as u32));
        }
    }

    let mut observables: Vec<NetId> = core.primary_outputs().to_vec();
    observables.extend_from_slice(&pseudo_outputs);
    let mut input_nets: Vec<NetId> = core.primary_inputs().to_vec();
    input_nets.extend_from_slice(&pseudo_inputs);

    Ok(ScanNetlist {
        core,
        pseudo_inputs,
        pseudo_outputs,
        topo,
        sinks,
        observables,
        input_nets,
    })
}

/// Kahn topological sort over the combinational gates; `None` on a cycle.
fn topo_sort(core: &Netlist) -> Option<Vec<u32>> {
    let gate_of_net: Vec<Option<usize>> = {
        let mut v = vec![None; core.net_count()];
        for (gi, g) in core.gates().iter().enumerate() {
            v[g.output.index()] = Some(gi);
        }
        v
    };
    let mut indegree: Vec<usize> = core
        .gates()
        .iter()
        .map(|g| g.inputs.iter().filter(|i| gate_of_net[i.index()].is_some()).count())
        .collect();
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); core.gate_count()];
    for (gi, g) in core.gates().iter().enumerate() {
        for i in &g.inputs {
            if let Some(src) = gate_of_net[i.index()] {
                users[src].push(gi);
            }
        }
    }
    let mut ready: Vec<usize> = (0..core.gate_count()).filter(|&g| indegree[g] == 0).collect();
    ready.reverse();
    let mut order = Vec::with_capacity(core.gate_count());
    while let Some(g) = ready.pop() {
        order.push(g as u32);
        for &u in &users[g] {
            indegree[u] -= 1;
            if indegree[u] == 0 {
                ready.push(u);
            }
        }
    }
    if order.len() == core.gate_count() {
        Some(order)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::parse_bench;

    #[test]
    fn single_dff_becomes_scan_points() {
        let n = parse_bench("INPUT(d) OUTPUT(q) q = DFF(d)").unwrap();
        let s = scan_transform(&n).unwrap();
        assert_eq!(s.pseudo_inputs().len(), 1);
        assert_eq!(s.pseudo_outputs().len(), 1);
        assert_eq!(s.core().net_name(s.pseudo_inputs()[0]), "q");
        assert_eq!(s.core().net_name(s.pseudo_outputs()[0]), "d");
        assert_eq!(s.core().gate_count(), 0);
    }

    #[test]
    fn combinational_netlist_is_unchanged() {
        let n = parse_bench("INPUT(a) INPUT(b) OUTPUT(c) c = AND(a,b)").unwrap();
        let s = scan_transform(&n).unwrap();
        assert!(s.pseudo_inputs().is_empty());
        assert!(s.pseudo_outputs().is_empty());
        assert_eq!(s.core().gates(), n.gates());
        assert_eq!(s.width(), 2);
    }

    #[test]
    fn shift_register_exposes_both_stages() {
        let n = parse_bench("INPUT(d) OUTPUT(q1) q0 = DFF(d) q1 = DFF(q0)").unwrap();
        let s = scan_transform(&n).unwrap();
        assert_eq!(s.pseudo_inputs().len(), 2);
        assert_eq!(s.pseudo_outputs().len(), 2);
        assert_eq!(s.core().gate_count(), 0);
        // q0 shows up on both sides: driven as a scan input, observed as a
        // scan output of the first stage.
        assert!(s.pseudo_inputs().contains(&n.net_id("q0").unwrap()));
        assert!(s.pseudo_outputs().contains(&n.net_id("q0").unwrap()));
    }

    #[test]
    fn gate_count_preserved_minus_dffs() {
        let n = parse_bench(
            "INPUT(a) INPUT(b) OUTPUT(y) x = XOR(a,b) q = DFF(x) y = AND(q,a)",
        )
        .unwrap();
        let s = scan_transform(&n).unwrap();
        assert_eq!(s.core().gate_count(), n.gate_count() - n.dff_count());
        for g in s.core().gates() {
            assert_ne!(g.kind, GateKind::Dff);
        }
    }

    #[test]
    fn pattern_order_is_pis_then_pseudo_inputs() {
        let n = parse_bench("INPUT(a) INPUT(b) OUTPUT(y) q = DFF(a) y = AND(q,b)").unwrap();
        let s = scan_transform(&n).unwrap();
        let order: Vec<&str> = s.input_nets().iter().map(|&i| s.core().net_name(i)).collect();
        assert_eq!(order, ["a", "b", "q"]);
    }
}
