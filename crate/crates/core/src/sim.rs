//! Good-machine and faulty-machine logic simulation.
//!
//! The evaluator is word-parallel: each net carries a 64-bit word, one
//! pattern per bit lane. The single-pattern [`simulate`] entry point is the
//! one-lane case. A stuck pin overrides its driver at that pin only; other
//! branches of the same stem see the true value.

use crate::fault::{Fault, FaultSite};
use crate::netlist::{Driver, GateKind, NetId};
use crate::pattern::TestPattern;
use crate::scan::ScanNetlist;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("pattern width {got} does not match netlist width {expected}")]
    WidthMismatch { expected: usize, got: usize },
}

#[inline]
fn broadcast(b: bool) -> u64 {
    if b {
        !0
    } else {
        0
    }
}

fn eval_gate(kind: GateKind, inputs: &[u64]) -> u64 {
    match kind {
        GateKind::And => inputs.iter().fold(!0u64, |acc, &v| acc & v),
        GateKind::Nand => !inputs.iter().fold(!0u64, |acc, &v| acc & v),
        GateKind::Or => inputs.iter().fold(0u64, |acc, &v| acc | v),
        GateKind::Nor => !inputs.iter().fold(0u64, |acc, &v| acc | v),
        GateKind::Xor => inputs.iter().fold(0u64, |acc, &v| acc ^ v),
        GateKind::Xnor => !inputs.iter().fold(0u64, |acc, &v| acc ^ v),
        GateKind::Not => !inputs[0],
        GateKind::Buf => inputs[0],
        GateKind::Dff => unreachable!("scan netlists hold no DFFs"),
    }
}

/// Evaluate every net of the scan netlist for a block of up to 64 patterns.
/// `input_words` holds one word per input net, in pattern bit order. With a
/// fault, the faulty machine is evaluated instead.
pub fn eval_words(s: &ScanNetlist, input_words: &[u64], fault: Option<Fault>) -> Vec<u64> {
    assert_eq!(input_words.len(), s.width());
    let mut values = vec![0u64; s.core().net_count()];
    for (pos, &net) in s.input_nets().iter().enumerate() {
        values[net.index()] = input_words[pos];
    }
    if let Some(Fault { site: FaultSite::Port { net }, stuck }) = fault {
        values[net as usize] = broadcast(stuck);
    }

    let mut pins = Vec::new();
    for &gi in s.topo_order() {
        let g = s.core().gate(gi as usize);
        pins.clear();
        pins.extend(g.inputs.iter().map(|i| values[i.index()]));
        if let Some(Fault { site: FaultSite::GateInput { gate, pin }, stuck }) = fault {
            if gate == gi {
                pins[pin as usize] = broadcast(stuck);
            }
        }
        let mut out = eval_gate(g.kind, &pins);
        if let Some(Fault { site: FaultSite::GateOutput { gate }, stuck }) = fault {
            if gate == gi {
                out = broadcast(stuck);
            }
        }
        values[g.output.index()] = out;
    }
    values
}

/// Gate indices whose outputs can change when the fault is present, in
/// evaluation order, together with the set of affected nets.
pub fn fault_cone(s: &ScanNetlist, fault: Fault) -> (Vec<u32>, Vec<bool>) {
    let mut in_cone = vec![false; s.core().net_count()];
    match fault.site {
        FaultSite::Port { net } => in_cone[net as usize] = true,
        FaultSite::GateInput { gate, .. } | FaultSite::GateOutput { gate } => {
            in_cone[s.core().gate(gate as usize).output.index()] = true;
        }
    }
    let mut gates = Vec::new();
    for &gi in s.topo_order() {
        let g = s.core().gate(gi as usize);
        let touches = matches!(
            fault.site,
            FaultSite::GateInput { gate, .. } | FaultSite::GateOutput { gate } if gate == gi
        );
        if touches || g.inputs.iter().any(|i| in_cone[i.index()]) {
            in_cone[g.output.index()] = true;
            gates.push(gi);
        }
    }
    (gates, in_cone)
}

/// Re-simulate only the fault cone on top of good values and return, for
/// each observable, the lanes where the faulty machine differs.
pub fn diff_words(
    s: &ScanNetlist,
    good: &[u64],
    fault: Fault,
    cone_gates: &[u32],
    in_cone: &[bool],
) -> u64 {
    let mut faulty = good.to_vec();
    if let FaultSite::Port { net } = fault.site {
        faulty[net as usize] = broadcast(fault.stuck);
    }
    let mut pins = Vec::new();
    for &gi in cone_gates {
        let g = s.core().gate(gi as usize);
        if let FaultSite::GateOutput { gate } = fault.site {
            if gate == gi {
                faulty[g.output.index()] = broadcast(fault.stuck);
                continue;
            }
        }
        pins.clear();
        pins.extend(g.inputs.iter().map(|i| faulty[i.index()]));
        if let FaultSite::GateInput { gate, pin } = fault.site {
            if gate == gi {
                pins[pin as usize] = broadcast(fault.stuck);
            }
        }
        faulty[g.output.index()] = eval_gate(g.kind, &pins);
    }
    let mut diff = 0u64;
    for &o in s.observables() {
        if in_cone[o.index()] {
            diff |= good[o.index()] ^ faulty[o.index()];
        }
    }
    diff
}

fn pattern_words(s: &ScanNetlist, p: &TestPattern) -> Result<Vec<u64>, SimError> {
    if p.width() != s.width() {
        return Err(SimError::WidthMismatch { expected: s.width(), got: p.width() });
    }
    Ok(p.bits().iter().map(|&b| broadcast(b)).collect())
}

/// Evaluate one pattern on the good machine and return the values observed
/// on primary outputs followed by pseudo outputs.
pub fn simulate(s: &ScanNetlist, p: &TestPattern) -> Result<Vec<bool>, SimError> {
    let values = eval_words(s, &pattern_words(s, p)?, None);
    Ok(s.observables().iter().map(|o| values[o.index()] & 1 != 0).collect())
}

/// Evaluate one pattern with a fault injected.
pub fn simulate_fault(s: &ScanNetlist, p: &TestPattern, fault: Fault) -> Result<Vec<bool>, SimError> {
    let values = eval_words(s, &pattern_words(s, p)?, Some(fault));
    Ok(s.observables().iter().map(|o| values[o.index()] & 1 != 0).collect())
}

/// Value of an arbitrary net under one pattern on the good machine.
pub fn net_value(s: &ScanNetlist, p: &TestPattern, net: NetId) -> Result<bool, SimError> {
    let values = eval_words(s, &pattern_words(s, p)?, None);
    Ok(values[net.index()] & 1 != 0)
}

/// Input words for the 64 consecutive enumeration indices starting at
/// `base`, in pattern bit order. Lane j holds pattern index `base + j`;
/// lanes at or past `total` are zero-filled.
pub fn enumeration_block(width: usize, base: u64, total: u64) -> Vec<u64> {
    let lanes = (total - base).min(64);
    let mut words = vec![0u64; width];
    for lane in 0..lanes {
        let idx = base + lane;
        for (i, w) in words.iter_mut().enumerate() {
            if (idx >> (width - 1 - i)) & 1 != 0 {
                *w |= 1u64 << lane;
            }
        }
    }
    words
}

/// Check that the fault's site exists in the netlist.
pub fn site_exists(s: &ScanNetlist, fault: Fault) -> bool {
    match fault.site {
        FaultSite::Port { net } => {
            (net as usize) < s.core().net_count()
                && matches!(
                    s.core().driver(NetId(net)),
                    Driver::PrimaryInput | Driver::PseudoInput
                )
        }
        FaultSite::GateInput { gate, pin } => {
            (gate as usize) < s.core().gate_count()
                && (pin as usize) < s.core().gate(gate as usize).inputs.len()
        }
        FaultSite::GateOutput { gate } => (gate as usize) < s.core().gate_count(),
    }
}
