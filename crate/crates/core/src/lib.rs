//! Safe-fault identification for gate-level netlists.
//!
//! The pipeline: parse a bench-format netlist ([`mod@bench`]), abstract the
//! flip-flops away ([`scan`]), enumerate the stuck-at fault universe
//! ([`fault`]), record the system's operational constraints ([`constraint`]),
//! then decide per fault whether any admissible pattern exposes it
//! ([`atpg`]), completely and with witnesses. [`fsim`] grades external pattern
//! sets over the same admissible space and [`report`] turns verdicts and
//! detections into per-unit coverage tables with the safe faults removed
//! from the denominator.

pub mod atpg;
pub mod bench;
pub mod constraint;
pub mod fault;
pub mod fsim;
pub mod netlist;
pub mod pattern;
pub mod report;
pub mod scan;
pub mod sim;
pub mod solver;
pub mod synthetic;

pub use atpg::{brute_force_classify, classify_all, classify_fault, AtpgError, Engine, Verdict, BRUTE_FORCE_INPUT_CAP, DEFAULT_BUDGET};
pub use bench::{parse_bench, to_bench_string, ParseError};
pub use constraint::{augment, parse_constraints, AugmentedNetlist, Constraint, ConstraintError, ConstraintParseError, ConstraintSet, Cube, CubeBit};
pub use fsim::{admissible_filter, detect, partition_admissible};
pub use fault::{collapse_equivalent, enumerate_faults, Category, Collapse, Fault, FaultClass, FaultSite};
pub use netlist::{Driver, Gate, GateKind, NetId, Netlist, NetlistBuilder, Violation};
pub use report::{attribute_categories, build_report, emit_report, fc, fc_safe, parse_counts_csv, parse_verdict_file, percent_2dp, report_from_counts, report_from_verdicts, write_verdicts, Attribution, ClassificationReport, CountsRow, Provenance, ReportError, ReportFormat, SetRun, UnitMap, UnitStats, VerdictRecord};
pub use pattern::{parse_pattern_file, PatternError, PatternSet, TestPattern};
pub use scan::{scan_transform, ScanError, ScanNetlist};
pub use sim::{simulate, simulate_fault, SimError};
