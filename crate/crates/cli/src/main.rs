//! Command-line front end: classify faults under operational constraints,
//! grade external pattern sets, and emit coverage reports.
//!
//! Exit codes: 0 on success, 1 on any input error, 2 on an internal
//! inconsistency such as a pattern detecting a fault that was proven safe.

mod pipeline;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use safefault::atpg::{Engine, BRUTE_FORCE_INPUT_CAP, DEFAULT_BUDGET};
use safefault::bench::parse_bench;
use safefault::constraint::{parse_constraints, ConstraintSet};
use safefault::fault::{collapse_equivalent, enumerate_faults};
use safefault::fsim::{detect, partition_admissible};
use safefault::pattern::parse_pattern_file;
use safefault::report::{
    build_report, content_hash, emit_report, parse_counts_csv, parse_verdict_file,
    report_from_counts, report_from_verdicts, write_verdicts, Provenance, ReportError,
    ReportFormat, UnitMap,
};
use safefault::scan::scan_transform;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "safefault", version, about = "Safe-fault identification and coverage reporting for gate-level netlists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every stuck-at fault under a constraint file
    Classify {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        /// Decision budget per fault
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// File of unit name prefixes, one per line
        #[arg(long)]
        units: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// csv or text
        #[arg(long, default_value = "csv")]
        format: String,
        /// Also write a per-fault verdict file
        #[arg(long)]
        verdicts: Option<PathBuf>,
        /// Worker threads (0 = all cores)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Grade an external pattern set: which faults does it detect
    Grade {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        patterns: PathBuf,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a coverage table from verdicts, detected lists or count files
    Report {
        /// Per-unit counts CSV (columns: unit,faults[,detected,safe,...])
        #[arg(long)]
        faults: Option<PathBuf>,
        /// Detected fault list, one site/polarity per line
        #[arg(long)]
        detected: Option<PathBuf>,
        /// Verdict file from classify or oracle
        #[arg(long)]
        verdicts: Option<PathBuf>,
        #[arg(long)]
        units: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Classify by exhaustive enumeration (input-count capped)
    Oracle {
        #[arg(long)]
        netlist: PathBuf,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Input problems exit 1; a proof and a measurement disagreeing exits 2.
enum Failure {
    Input(anyhow::Error),
    Inconsistency(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let inconsistent = e
            .chain()
            .any(|cause| matches!(
                cause.downcast_ref::<ReportError>(),
                Some(ReportError::DetectedSafeFault { .. })
            ) || matches!(
                cause.downcast_ref::<safefault::atpg::AtpgError>(),
                Some(safefault::atpg::AtpgError::WitnessReplayFailed { .. })
            ));
        if inconsistent {
            Failure::Inconsistency(e)
        } else {
            Failure::Input(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Inconsistency(e)) => {
            eprintln!("internal inconsistency: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { netlist, constraints, budget, units, out, format, verdicts, jobs } => {
            classify(&netlist, &constraints, budget, units.as_deref(), &out, &format, verdicts.as_deref(), jobs)
                .map_err(Failure::from)
        }
        Command::Grade { netlist, patterns, constraints, out } => {
            grade(&netlist, &patterns, constraints.as_deref(), &out).map_err(Failure::from)
        }
        Command::Report { faults, detected, verdicts, units, out, format } => report(
            faults.as_deref(),
            detected.as_deref(),
            verdicts.as_deref(),
            units.as_deref(),
            &out,
            &format,
        )
        .map_err(Failure::from),
        Command::Oracle { netlist, constraints, out } => {
            oracle(&netlist, constraints.as_deref(), &out).map_err(Failure::from)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn parse_format(word: &str) -> Result<ReportFormat> {
    ReportFormat::parse(word).ok_or_else(|| anyhow!("unknown format '{word}' (expected csv or text)"))
}

fn load_constraint_sets(path: &Path) -> Result<(Vec<ConstraintSet>, String)> {
    let text = read(path)?;
    let sets = parse_constraints(&text)
        .with_context(|| format!("parsing constraints {}", path.display()))?;
    Ok((sets, content_hash(text.as_bytes())))
}

fn load_units(path: Option<&Path>) -> Result<UnitMap> {
    Ok(match path {
        Some(p) => UnitMap::parse(&read(p)?),
        None => UnitMap::default(),
    })
}

fn tool_version() -> String {
    format!("safefault {}", env!("CARGO_PKG_VERSION"))
}

#[allow(clippy::too_many_arguments)]
fn classify(
    netlist_path: &Path,
    constraints_path: &Path,
    budget: u64,
    units_path: Option<&Path>,
    out: &Path,
    format: &str,
    verdicts_path: Option<&Path>,
    jobs: usize,
) -> Result<()> {
    let format = parse_format(format)?;
    let netlist_text = read(netlist_path)?;
    let netlist = parse_bench(&netlist_text)
        .with_context(|| format!("parsing netlist {}", netlist_path.display()))?;
    let scan = scan_transform(&netlist)?;
    let (sets, constraints_hash) = load_constraint_sets(constraints_path)?;
    let units = load_units(units_path)?;
    let faults = enumerate_faults(&scan);

    let analysis = {
        let engine = Engine::Sat { budget };
        let work = || pipeline::analyze(&scan, &faults, &sets, engine, true);
        if jobs > 0 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .context("building worker pool")?;
            pool.install(work)?
        } else {
            work()?
        }
    };

    let provenance = Provenance {
        netlist_hash: Some(content_hash(netlist_text.as_bytes())),
        constraints_hash: Some(constraints_hash),
        tool: tool_version(),
    };
    let report = build_report(&scan, &faults, &analysis.attribution.classes, None, &units, provenance.clone())?;
    write(out, &emit_report(&report, format))?;
    if let Some(vd) = verdicts_path {
        write(vd, write_verdicts(&scan, &faults, &analysis.attribution.classes, &provenance).as_bytes())?;
    }

    let collapse = collapse_equivalent(&faults, &scan);
    eprintln!(
        "classified {} faults ({} collapsed classes), {} aborted",
        faults.len(),
        collapse.class_count(),
        analysis.aborted
    );
    if let Some(overlap) = analysis.attribution.overlap {
        eprintln!("overlap: {overlap} faults safe under two or more sets applied individually");
    }
    for d in &report.diagnostics {
        eprintln!("note: {d}");
    }
    Ok(())
}

fn grade(
    netlist_path: &Path,
    patterns_path: &Path,
    constraints_path: Option<&Path>,
    out: &Path,
) -> Result<()> {
    let netlist_text = read(netlist_path)?;
    let netlist = parse_bench(&netlist_text)?;
    let scan = scan_transform(&netlist)?;
    let pattern_text = read(patterns_path)?;
    let patterns = parse_pattern_file(
        &pattern_text,
        &patterns_path.display().to_string(),
    )?;
    if let Some(w) = patterns.width() {
        if w != scan.width() {
            bail!(
                "pattern width {} does not match netlist width {} (primary inputs then scan points)",
                w,
                scan.width()
            );
        }
    }

    let sets = match constraints_path {
        Some(p) => load_constraint_sets(p)?.0,
        None => Vec::new(),
    };
    let aug = safefault::constraint::augment(&scan, &sets)?;
    let (kept, rejected) = partition_admissible(&patterns, &aug)?;
    for idx in &rejected {
        eprintln!(
            "warning: pattern {} ({}) violates the constraints; excluded from grading",
            idx + 1,
            patterns.patterns()[*idx]
        );
    }
    let kept_set = safefault::pattern::PatternSet::new(kept, patterns.source());

    let faults = enumerate_faults(&scan);
    let detected = detect(&scan, &faults, &kept_set, true)?;

    let mut text = String::new();
    text.push_str(&format!("# netlist {}\n", content_hash(netlist_text.as_bytes())));
    text.push_str(&format!("# patterns {} admissible of {}\n", kept_set.len(), patterns.len()));
    for (fault, &hit) in faults.iter().zip(&detected) {
        if hit {
            text.push_str(&fault.to_line(&scan));
            text.push('\n');
        }
    }
    write(out, text.as_bytes())?;
    eprintln!(
        "detected {} of {} faults with {} admissible patterns",
        detected.iter().filter(|&&d| d).count(),
        faults.len(),
        kept_set.len()
    );
    Ok(())
}

fn parse_detected_list(text: &str) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for raw in text.lines() {
        let code = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let code = code.trim();
        if code.is_empty() {
            continue;
        }
        lines.push(code.to_string());
    }
    Ok(lines)
}

fn report(
    counts_path: Option<&Path>,
    detected_path: Option<&Path>,
    verdicts_path: Option<&Path>,
    units_path: Option<&Path>,
    out: &Path,
    format: &str,
) -> Result<()> {
    let format = parse_format(format)?;
    let units = load_units(units_path)?;

    let report = match (verdicts_path, counts_path) {
        (Some(vd), counts) => {
            let vd_text = read(vd)?;
            let records = parse_verdict_file(&vd_text)?;
            let detected_lines = match detected_path {
                Some(p) => Some(parse_detected_list(&read(p)?)?),
                None => None,
            };
            let provenance = Provenance {
                netlist_hash: None,
                constraints_hash: Some(content_hash(vd_text.as_bytes())),
                tool: tool_version(),
            };
            let report =
                report_from_verdicts(&records, detected_lines.as_deref(), &units, provenance)?;
            if let Some(cp) = counts {
                let rows = parse_counts_csv(&read(cp)?)?;
                for row in &rows {
                    if let Some(unit) = report.units.iter().find(|u| u.unit == row.unit) {
                        if unit.faults != row.faults {
                            bail!(
                                "unit {}: verdict file holds {} faults but counts file says {}",
                                row.unit,
                                unit.faults,
                                row.faults
                            );
                        }
                    }
                }
            }
            report
        }
        (None, Some(cp)) => {
            if detected_path.is_some() {
                bail!("--detected lists individual faults; use it together with --verdicts");
            }
            let text = read(cp)?;
            let rows = parse_counts_csv(&text)?;
            let provenance = Provenance {
                netlist_hash: None,
                constraints_hash: Some(content_hash(text.as_bytes())),
                tool: tool_version(),
            };
            report_from_counts(&rows, provenance)?
        }
        (None, None) => bail!("nothing to report: pass --verdicts and/or --faults"),
    };

    write(out, &emit_report(&report, format))?;
    for d in &report.diagnostics {
        eprintln!("note: {d}");
    }
    Ok(())
}

fn oracle(netlist_path: &Path, constraints_path: Option<&Path>, out: &Path) -> Result<()> {
    let netlist_text = read(netlist_path)?;
    let netlist = parse_bench(&netlist_text)?;
    let scan = scan_transform(&netlist)?;
    if scan.width() > BRUTE_FORCE_INPUT_CAP {
        bail!(
            "netlist has {} inputs; the exhaustive oracle is capped at {}",
            scan.width(),
            BRUTE_FORCE_INPUT_CAP
        );
    }
    let (sets, constraints_hash) = match constraints_path {
        Some(p) => {
            let (sets, hash) = load_constraint_sets(p)?;
            (sets, Some(hash))
        }
        None => (Vec::new(), None),
    };
    let faults = enumerate_faults(&scan);
    let analysis = pipeline::analyze(&scan, &faults, &sets, Engine::BruteForce, false)?;
    let provenance = Provenance {
        netlist_hash: Some(content_hash(netlist_text.as_bytes())),
        constraints_hash,
        tool: tool_version(),
    };
    write(
        out,
        write_verdicts(&scan, &faults, &analysis.attribution.classes, &provenance).as_bytes(),
    )?;
    eprintln!("oracle classified {} faults", faults.len());
    Ok(())
}
