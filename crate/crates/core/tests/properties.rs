//! Randomized cross-module properties on generator-produced netlists.
//! Seeds are fixed; every run checks the same instances.

use safefault::atpg::{brute_force_classify, classify_all, classify_fault};
use safefault::constraint::augment;
use safefault::fault::{collapse_equivalent, enumerate_faults};
use safefault::fsim::{admissible_filter, detect};
use safefault::pattern::PatternSet;
use safefault::scan::scan_transform;
use safefault::sim::{simulate, simulate_fault};
use safefault::synthetic::{random_constraint_sets, random_netlist, ConstraintShape, NetlistShape};

const BUDGET: u64 = 1_000_000;

#[test]
fn sat_engine_agrees_with_exhaustive_oracle() {
    for seed in 0..60 {
        let netlist = random_netlist(seed, NetlistShape::default());
        let scan = scan_transform(&netlist).unwrap();
        let sets = random_constraint_sets(seed, &scan, ConstraintShape::default());
        let aug = augment(&scan, &sets).unwrap();
        let faults = enumerate_faults(&scan);
        let verdicts = classify_all(&aug, &faults, BUDGET).unwrap();
        for (i, v) in verdicts.iter().enumerate() {
            let oracle = brute_force_classify(&aug, faults[i]).unwrap();
            assert_eq!(
                v.is_testable(),
                oracle.is_testable(),
                "seed {seed} fault {}: engine {v:?} oracle {oracle:?}",
                faults[i].to_line(&scan)
            );
            assert!(!v.is_aborted(), "seed {seed}: budget unexpectedly exhausted");
        }
    }
}

#[test]
fn every_witness_replays_with_an_output_difference() {
    for seed in 100..140 {
        let netlist = random_netlist(seed, NetlistShape::default());
        let scan = scan_transform(&netlist).unwrap();
        let sets = random_constraint_sets(seed, &scan, ConstraintShape::default());
        let aug = augment(&scan, &sets).unwrap();
        let faults = enumerate_faults(&scan);
        let verdicts = classify_all(&aug, &faults, BUDGET).unwrap();
        for (fault, verdict) in faults.iter().zip(&verdicts) {
            if let safefault::atpg::Verdict::Testable(w) = verdict {
                assert!(aug.admissible(w).unwrap(), "seed {seed}: witness violates constraints");
                let good = simulate(&scan, w).unwrap();
                let bad = simulate_fault(&scan, w, *fault).unwrap();
                assert_ne!(good, bad, "seed {seed}: witness does not detect");
            }
        }
    }
}

#[test]
fn growing_the_constraint_set_only_grows_the_untestable_set() {
    for seed in 200..240 {
        let netlist = random_netlist(seed, NetlistShape::default());
        let scan = scan_transform(&netlist).unwrap();
        let sets = random_constraint_sets(seed, &scan, ConstraintShape::default());
        if sets.is_empty() {
            continue;
        }
        let faults = enumerate_faults(&scan);
        let weak = augment(&scan, &sets[..sets.len() / 2]).unwrap();
        let strong = augment(&scan, &sets).unwrap();
        let weak_verdicts = classify_all(&weak, &faults, BUDGET).unwrap();
        let strong_verdicts = classify_all(&strong, &faults, BUDGET).unwrap();
        for (i, (w, s)) in weak_verdicts.iter().zip(&strong_verdicts).enumerate() {
            if w.is_untestable() {
                assert!(
                    s.is_untestable(),
                    "seed {seed} fault {}: untestable under fewer constraints only",
                    faults[i].to_line(&scan)
                );
            }
        }
    }
}

#[test]
fn exhaustive_admissible_grading_matches_classification() {
    for seed in 300..330 {
        let netlist = random_netlist(seed, NetlistShape { max_inputs: 8, max_gates: 25, with_dffs: true });
        let scan = scan_transform(&netlist).unwrap();
        let sets = random_constraint_sets(seed, &scan, ConstraintShape::default());
        let aug = augment(&scan, &sets).unwrap();
        let faults = enumerate_faults(&scan);
        let verdicts = classify_all(&aug, &faults, BUDGET).unwrap();
        let patterns = admissible_filter(&PatternSet::exhaustive(scan.width()), &aug).unwrap();
        let detected = detect(&scan, &faults, &patterns, true).unwrap();
        for (i, v) in verdicts.iter().enumerate() {
            assert_eq!(
                detected[i],
                v.is_testable(),
                "seed {seed} fault {}: detected={} verdict={v:?}",
                faults[i].to_line(&scan),
                detected[i]
            );
        }
    }
}

#[test]
fn collapsed_classes_share_detection_signatures() {
    use safefault::sim::{diff_words, enumeration_block, eval_words, fault_cone};
    for seed in 400..440 {
        let netlist =
            random_netlist(seed, NetlistShape { max_inputs: 10, max_gates: 40, with_dffs: true });
        let scan = scan_transform(&netlist).unwrap();
        let faults = enumerate_faults(&scan);
        let collapse = collapse_equivalent(&faults, &scan);
        // signature = the set of patterns detecting the fault, as word masks
        let cones: Vec<_> = faults.iter().map(|&f| fault_cone(&scan, f)).collect();
        let total = 1u64 << scan.width();
        let mut signatures: Vec<Vec<u64>> = vec![Vec::new(); faults.len()];
        let mut start = 0u64;
        while start < total {
            let lanes = (total - start).min(64);
            let lane_mask = if lanes == 64 { !0u64 } else { (1u64 << lanes) - 1 };
            let inputs = enumeration_block(scan.width(), start, total);
            let good = eval_words(&scan, &inputs, None);
            for (fi, &fault) in faults.iter().enumerate() {
                let (cone, in_cone) = &cones[fi];
                signatures[fi].push(diff_words(&scan, &good, fault, cone, in_cone) & lane_mask);
            }
            start += 64;
        }
        for class in collapse.classes() {
            let lead = class[0];
            for &member in &class[1..] {
                assert_eq!(
                    signatures[lead],
                    signatures[member],
                    "seed {seed}: faults {} and {} collapsed but differ",
                    faults[lead].to_line(&scan),
                    faults[member].to_line(&scan)
                );
            }
        }
    }
}

#[test]
fn monitors_flag_exactly_the_forbidden_patterns() {
    use safefault::constraint::Constraint;
    for seed in 500..560 {
        let netlist = random_netlist(seed, NetlistShape { max_inputs: 8, max_gates: 20, with_dffs: false });
        let scan = scan_transform(&netlist).unwrap();
        let sets = random_constraint_sets(seed, &scan, ConstraintShape::default());
        let forbid_sets: Vec<_> = sets
            .iter()
            .filter(|s| s.constraints.iter().any(|c| matches!(c, Constraint::Forbid { .. })))
            .cloned()
            .collect();
        if forbid_sets.is_empty() {
            continue;
        }
        let aug = augment(&scan, &forbid_sets).unwrap();
        for p in PatternSet::exhaustive(scan.width()).patterns() {
            let words: Vec<u64> = p.bits().iter().map(|&b| if b { !0 } else { 0 }).collect();
            let values = safefault::sim::eval_words(&scan, &words, None);
            let monitors = aug.monitor_words(&values);
            let any_monitor_high = aug
                .monitor_outputs()
                .iter()
                .any(|&m| aug.net_word(m, &values, &monitors) & 1 != 0);
            // direct cube membership, bypassing the detector gates
            let mut hits_cube = false;
            for forbid in aug.forbids() {
                for cube in &forbid.cubes {
                    let vals: Vec<bool> =
                        forbid.nets.iter().map(|n| values[n.index()] & 1 != 0).collect();
                    if cube.matches(&vals) {
                        hits_cube = true;
                    }
                }
            }
            assert_eq!(any_monitor_high, hits_cube, "seed {seed} pattern {p}");
        }
    }
}

#[test]
fn classification_is_deterministic_across_runs_and_pools() {
    let netlist = random_netlist(42, NetlistShape::default());
    let scan = scan_transform(&netlist).unwrap();
    let sets = random_constraint_sets(42, &scan, ConstraintShape::default());
    let aug = augment(&scan, &sets).unwrap();
    let faults = enumerate_faults(&scan);

    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| classify_all(&aug, &faults, BUDGET).unwrap())
    };
    let one = run(1);
    let four = run(4);
    let again = run(4);
    assert_eq!(one, four);
    assert_eq!(four, again);
}

#[test]
fn single_fault_and_batch_classification_agree() {
    let netlist = random_netlist(77, NetlistShape::default());
    let scan = scan_transform(&netlist).unwrap();
    let sets = random_constraint_sets(77, &scan, ConstraintShape::default());
    let aug = augment(&scan, &sets).unwrap();
    let faults = enumerate_faults(&scan);
    let batch = classify_all(&aug, &faults, BUDGET).unwrap();
    for (i, &f) in faults.iter().enumerate() {
        assert_eq!(classify_fault(&aug, f, BUDGET).unwrap(), batch[i]);
    }
}

#[test]
fn bench_text_round_trips_on_random_netlists() {
    for seed in 600..680 {
        let netlist = random_netlist(seed, NetlistShape::default());
        let printed = safefault::bench::to_bench_string(&netlist);
        let reparsed = safefault::bench::parse_bench(&printed)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}\n{printed}"));
        assert_eq!(safefault::bench::to_bench_string(&reparsed), printed, "seed {seed}");
    }
}

#[test]
fn overlapping_sets_attribute_to_the_first_and_count_the_overlap() {
    use safefault::report::{attribute_categories, SetRun};

    let netlist =
        safefault::bench::parse_bench("INPUT(a) INPUT(b) OUTPUT(c) c = AND(a,b)").unwrap();
    let scan = scan_transform(&netlist).unwrap();
    let sets = safefault::constraint::parse_constraints(
        "set reset_logic { fix a = 0 }\nset unused_instructions { forbid (a,b) in {11} }",
    )
    .unwrap();
    let faults = enumerate_faults(&scan);

    let baseline = classify_all(&augment(&scan, &[]).unwrap(), &faults, BUDGET).unwrap();
    let mut runs = Vec::new();
    for k in 0..sets.len() {
        let cumulative =
            classify_all(&augment(&scan, &sets[..=k]).unwrap(), &faults, BUDGET).unwrap();
        let individual =
            classify_all(&augment(&scan, &sets[k..=k]).unwrap(), &faults, BUDGET).unwrap();
        runs.push(SetRun { set: &sets[k], cumulative, individual: Some(individual) });
    }
    let attribution = attribute_categories(&baseline, &runs).unwrap();

    // c stuck-at-0 is safe under either set alone: unreachable activation
    // (a=1,b=1) in both cases. First set in file order wins the attribution.
    let c_out_0 = faults
        .iter()
        .position(|f| f.to_line(&scan) == "gate:c:out/0")
        .unwrap();
    assert_eq!(
        attribution.classes[c_out_0],
        safefault::fault::FaultClass::ConstraintUntestable(safefault::fault::Category::ResetLogic)
    );
    assert!(attribution.overlap.unwrap() >= 1);
    // faults untestable under either individual set, baseline-testable
    let overlap_by_hand = faults
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            baseline[*i].is_testable()
                && runs
                    .iter()
                    .filter(|r| r.individual.as_ref().unwrap()[*i].is_untestable())
                    .count()
                    >= 2
        })
        .count() as u64;
    assert_eq!(attribution.overlap.unwrap(), overlap_by_hand);
}

#[test]
fn classes_partition_the_fault_universe_per_unit() {
    use safefault::fault::FaultClass;
    use safefault::report::{build_report, Provenance, UnitMap};

    let netlist = random_netlist(9001, NetlistShape::default());
    let scan = scan_transform(&netlist).unwrap();
    let sets = random_constraint_sets(9001, &scan, ConstraintShape::default());
    let faults = enumerate_faults(&scan);

    let baseline = classify_all(&augment(&scan, &[]).unwrap(), &faults, BUDGET).unwrap();
    let mut runs = Vec::new();
    for k in 0..sets.len() {
        let cumulative =
            classify_all(&augment(&scan, &sets[..=k]).unwrap(), &faults, BUDGET).unwrap();
        runs.push(safefault::report::SetRun { set: &sets[k], cumulative, individual: None });
    }
    let attribution = safefault::report::attribute_categories(&baseline, &runs).unwrap();

    let units = UnitMap::new(vec!["n".into(), "i".into(), "q".into()]);
    let report = build_report(
        &scan,
        &faults,
        &attribution.classes,
        None,
        &units,
        Provenance::default(),
    )
    .unwrap();

    for unit in report.units.iter().chain(report.total.as_ref()) {
        let testable = faults
            .iter()
            .zip(&attribution.classes)
            .filter(|(f, c)| {
                matches!(c, FaultClass::Testable(_))
                    && (unit.unit == "total" || units.unit_of(f.site_net_name(&scan)) == unit.unit)
            })
            .count() as u64;
        assert_eq!(
            unit.safe_total() + unit.structural + unit.aborted + testable,
            unit.faults,
            "unit {}: classes must partition the fault universe",
            unit.unit
        );
    }
}

#[test]
fn parsers_reject_garbage_without_panicking() {
    let bench_garbage = [
        "",
        "(((((",
        "INPUT",
        "INPUT()",
        "OUTPUT(a) a = ",
        "a == AND(b,c)",
        "x = AND(,)",
        "INPUT(a) INPUT(b) OUTPUT(c) c = AND(a b)",
        "1abc = AND(a,b)",
        "INPUT(a) OUTPUT(a) \u{7f}",
        "x = DFF(x) OUTPUT(x) y = BUF(y) OUTPUT(y)",
    ];
    for text in bench_garbage {
        let _ = safefault::bench::parse_bench(text);
    }

    let cons_garbage = [
        "",
        "set",
        "set reset_logic",
        "set reset_logic {",
        "set reset_logic { fix }",
        "set reset_logic { fix a = 2 }",
        "set reset_logic { forbid () in {} }",
        "set reset_logic { forbid (a) in {01} }",
        "fix a = 0",
        "set user: { fix a = 0 }",
        "set reset_logic { } set reset_logic { }",
    ];
    for text in cons_garbage {
        let _ = safefault::constraint::parse_constraints(text);
    }

    let verdict_garbage = ["x", "gate:c:out/0", "gate:c:out/0 Z", "gate:c:out/0 T", "port:/0 U", "gate:c:out/0 S nope"];
    for text in verdict_garbage {
        let _ = safefault::report::parse_verdict_file(text);
    }

    let counts_garbage = [
        "",
        "unit\nx",
        "faults,unit\n1,x",
        "unit,faults\nx",
        "unit,faults\nx,-3",
        "unit,faults,bogus\nx,1,2",
        "unit,faults\nx,99999999999999999999999999",
    ];
    for text in counts_garbage {
        let _ = safefault::report::parse_counts_csv(text);
    }
}

#[test]
fn hostile_counts_cannot_overflow_the_report() {
    use safefault::report::{parse_counts_csv, report_from_counts, Provenance};
    let text = format!(
        "unit,faults,detected,reset_logic,spr_addressing\nx,{},{},{},{}\n",
        u64::MAX,
        u64::MAX,
        u64::MAX,
        u64::MAX
    );
    let rows = parse_counts_csv(&text).unwrap();
    assert!(report_from_counts(&rows, Provenance::default()).is_err());
}
