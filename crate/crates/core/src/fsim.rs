//! Grading of external test pattern sets against the fault universe.
//!
//! Patterns are packed 64 to a machine word and each fault re-simulates
//! only its fan-out cone. The contract is the detected set alone; fault
//! dropping is a speed knob that cannot change the result.

use crate::constraint::AugmentedNetlist;
use crate::fault::Fault;
use crate::pattern::{PatternSet, TestPattern};
use crate::scan::ScanNetlist;
use crate::sim::{diff_words, eval_words, fault_cone, SimError};

/// Which faults the pattern set detects: one flag per fault, index-aligned
/// with the input list. A fault is detected when some pattern makes the
/// faulty machine disagree with the good machine on an observed output.
/// With `drop` set, faults stop being simulated after their first
/// detection; the returned set is identical either way.
pub fn detect(
    s: &ScanNetlist,
    faults: &[Fault],
    ps: &PatternSet,
    drop: bool,
) -> Result<Vec<bool>, SimError> {
    if let Some(w) = ps.width() {
        if w != s.width() {
            return Err(SimError::WidthMismatch { expected: s.width(), got: w });
        }
    }
    let cones: Vec<(Vec<u32>, Vec<bool>)> =
        faults.iter().map(|&f| fault_cone(s, f)).collect();
    let mut detected = vec![false; faults.len()];

    let mut block_start = 0;
    while block_start < ps.len() {
        let lanes = (ps.len() - block_start).min(64);
        let mut inputs = vec![0u64; s.width()];
        for lane in 0..lanes {
            let p = &ps.patterns()[block_start + lane];
            for (i, w) in inputs.iter_mut().enumerate() {
                if p.bit(i) {
                    *w |= 1u64 << lane;
                }
            }
        }
        let lane_mask = if lanes == 64 { !0u64 } else { (1u64 << lanes) - 1 };
        let good = eval_words(s, &inputs, None);
        for (fi, &fault) in faults.iter().enumerate() {
            if drop && detected[fi] {
                continue;
            }
            let (cone_gates, in_cone) = &cones[fi];
            if diff_words(s, &good, fault, cone_gates, in_cone) & lane_mask != 0 {
                detected[fi] = true;
            }
        }
        block_start += 64;
    }
    Ok(detected)
}

/// Keep only the patterns that satisfy every tie and match no forbidden
/// cube, preserving order. Grading against constrained logic must use the
/// same admissible stimulus space the untestability proofs assumed.
pub fn admissible_filter(ps: &PatternSet, a: &AugmentedNetlist) -> Result<PatternSet, SimError> {
    Ok(PatternSet::new(
        partition_admissible(ps, a)?.0,
        ps.source().to_string(),
    ))
}

/// Admissible patterns plus the indices of the rejected ones, for
/// diagnostics.
pub fn partition_admissible(
    ps: &PatternSet,
    a: &AugmentedNetlist,
) -> Result<(Vec<TestPattern>, Vec<usize>), SimError> {
    let mut kept = Vec::with_capacity(ps.len());
    let mut rejected = Vec::new();
    for (i, p) in ps.patterns().iter().enumerate() {
        if a.admissible(p)? {
            kept.push(p.clone());
        } else {
            rejected.push(i);
        }
    }
    Ok((kept, rejected))
}
