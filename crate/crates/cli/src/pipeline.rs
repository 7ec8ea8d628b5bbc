//! Orchestration shared by `classify` and `oracle`: a baseline run with no
//! constraints, one cumulative run per constraint set, optional per-set
//! individual runs for the overlap diagnostic, and category attribution.

use anyhow::Result;
use safefault::atpg::Engine;
use safefault::constraint::{augment, ConstraintSet};
use safefault::fault::Fault;
use safefault::report::{attribute_categories, Attribution, SetRun};
use safefault::scan::ScanNetlist;

pub struct Analysis {
    pub attribution: Attribution,
    pub aborted: u64,
}

pub fn analyze(
    scan: &ScanNetlist,
    faults: &[Fault],
    sets: &[ConstraintSet],
    engine: Engine,
    with_overlap: bool,
) -> Result<Analysis> {
    let baseline_aug = augment(scan, &[])?;
    let baseline = engine.classify_all(&baseline_aug, faults)?;

    let mut runs: Vec<SetRun> = Vec::with_capacity(sets.len());
    for k in 0..sets.len() {
        let cumulative_aug = augment(scan, &sets[..=k])?;
        let cumulative = engine.classify_all(&cumulative_aug, faults)?;
        let individual = if with_overlap && sets.len() >= 2 {
            let alone = augment(scan, &sets[k..=k])?;
            Some(engine.classify_all(&alone, faults)?)
        } else if with_overlap {
            Some(cumulative.clone())
        } else {
            None
        };
        runs.push(SetRun { set: &sets[k], cumulative, individual });
    }

    let attribution = attribute_categories(&baseline, &runs)?;
    let aborted = attribution
        .classes
        .iter()
        .filter(|c| matches!(c, safefault::fault::FaultClass::Aborted))
        .count() as u64;
    Ok(Analysis { attribution, aborted })
}
