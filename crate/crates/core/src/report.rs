//! Coverage metrics, category attribution, and report emission.
//!
//! `fc` is plain fault coverage, detected/total. `fc_safe` removes proven
//! safe faults from the denominator: detected/(total - safe). Reports carry
//! one row per unit (fault-site name prefix) with per-category safe counts,
//! and print byte-identically for identical inputs.

use crate::constraint::ConstraintSet;
use crate::atpg::Verdict;
use crate::fault::{Category, Fault, FaultClass};
use crate::pattern::TestPattern;
use crate::scan::ScanNetlist;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("total fault count is zero")]
    ZeroTotal,
    #[error("safe count {safe} is not below total {total}")]
    SafeExceedsTotal { safe: u64, total: u64 },
    #[error("detected {detected} exceeds total minus safe ({allowed}); inputs are inconsistent")]
    DetectedOverflow { detected: u64, allowed: u64 },
    #[error("verdict lists are misaligned: expected {expected} entries, got {got}")]
    MisalignedVerdicts { expected: usize, got: usize },
    #[error("detected fault is classified safe: {site}")]
    DetectedSafeFault { site: String },
    #[error("counts file line {line}: {msg}")]
    CountsParse { line: usize, msg: String },
    #[error("verdict file line {line}: {msg}")]
    VerdictParse { line: usize, msg: String },
    #[error("unit {unit}: {msg}")]
    InconsistentUnit { unit: String, msg: String },
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

/// Fault coverage: detected / total.
pub fn fc(detected: u64, total: u64) -> Result<f64, ReportError> {
    if total == 0 {
        return Err(ReportError::ZeroTotal);
    }
    Ok(detected as f64 / total as f64)
}

/// Fault coverage without safe faults: detected / (total - safe).
pub fn fc_safe(detected: u64, total: u64, safe: u64) -> Result<f64, ReportError> {
    if safe >= total {
        return Err(ReportError::SafeExceedsTotal { safe, total });
    }
    let denom = total - safe;
    if detected > denom {
        return Err(ReportError::DetectedOverflow { detected, allowed: denom });
    }
    Ok(detected as f64 / denom as f64)
}

/// Percentage of `numer/denom` with two decimals, computed on the exact
/// rational: the value is truncated at the third decimal and that digit is
/// rounded half-to-even. `denom` must be nonzero.
pub fn percent_2dp(numer: u64, denom: u64) -> String {
    assert!(denom > 0, "percentage of an empty universe");
    // thousandths of a percent, truncated
    let milli = (numer as u128 * 100_000) / denom as u128;
    let (q, r) = (milli / 10, milli % 10);
    let rounded = match r {
        0..=4 => q,
        6..=9 => q + 1,
        _ => {
            if q % 2 == 0 {
                q
            } else {
                q + 1
            }
        }
    };
    format!("{}.{:02}", rounded / 100, rounded % 100)
}

// ---------------------------------------------------------------------------
// category attribution
// ---------------------------------------------------------------------------

/// One constraint set's classification runs: verdicts under the cumulative
/// application of all sets up to and including this one, and optionally
/// under this set alone (used for the overlap diagnostic).
#[derive(Debug, Clone)]
pub struct SetRun<'a> {
    pub set: &'a ConstraintSet,
    pub cumulative: Vec<Verdict>,
    pub individual: Option<Vec<Verdict>>,
}

/// Outcome of category attribution.
#[derive(Debug, Clone)]
pub struct Attribution {
    /// Final class per fault, aligned with the fault list.
    pub classes: Vec<FaultClass>,
    /// Faults testable in the baseline yet untestable under at least two
    /// sets applied individually. Present when individual runs were given.
    pub overlap: Option<u64>,
}

/// Fold a baseline run and per-set runs into final fault classes.
///
/// A fault untestable with no constraints is structurally untestable. An
/// otherwise testable fault takes the category of the first set whose
/// cumulative application proves it untestable. Faults never proven
/// untestable keep their final verdict: testable with the last run's
/// witness, or aborted.
pub fn attribute_categories(
    baseline: &[Verdict],
    runs: &[SetRun],
) -> Result<Attribution, ReportError> {
    for run in runs {
        if run.cumulative.len() != baseline.len() {
            return Err(ReportError::MisalignedVerdicts {
                expected: baseline.len(),
                got: run.cumulative.len(),
            });
        }
        if let Some(ind) = &run.individual {
            if ind.len() != baseline.len() {
                return Err(ReportError::MisalignedVerdicts {
                    expected: baseline.len(),
                    got: ind.len(),
                });
            }
        }
    }

    let mut classes = Vec::with_capacity(baseline.len());
    for (i, base_verdict) in baseline.iter().enumerate() {
        let class = if base_verdict.is_untestable() {
            FaultClass::StructurallyUntestable
        } else if let Some(run) =
            runs.iter().find(|run| run.cumulative[i].is_untestable())
        {
            FaultClass::ConstraintUntestable(run.set.category.clone())
        } else {
            let final_verdict = runs.last().map(|r| &r.cumulative[i]).unwrap_or(base_verdict);
            match final_verdict {
                Verdict::Testable(w) => FaultClass::Testable(w.clone()),
                Verdict::Aborted { .. } => FaultClass::Aborted,
                Verdict::Untestable => unreachable!("covered by the scan above"),
            }
        };
        classes.push(class);
    }

    let overlap = if runs.iter().all(|r| r.individual.is_some()) {
        let mut count = 0u64;
        for (i, base_verdict) in baseline.iter().enumerate() {
            if !base_verdict.is_testable() {
                continue;
            }
            let hits = runs
                .iter()
                .filter(|r| r.individual.as_ref().unwrap()[i].is_untestable())
                .count();
            if hits >= 2 {
                count += 1;
            }
        }
        Some(count)
    } else {
        None
    };

    Ok(Attribution { classes, overlap })
}

// ---------------------------------------------------------------------------
// units and report structure
// ---------------------------------------------------------------------------

/// Longest-prefix mapping from fault-site names to unit names. Flattened
/// netlists keep hierarchical prefixes in net names, so `alu_` style
/// prefixes recover the unit structure. Unprefixed sites land in `top`.
#[derive(Debug, Clone, Default)]
pub struct UnitMap {
    prefixes: Vec<String>,
}

impl UnitMap {
    pub fn new(mut prefixes: Vec<String>) -> Self {
        prefixes.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        UnitMap { prefixes }
    }

    /// One prefix per line, `#` comments.
    pub fn parse(text: &str) -> Self {
        let prefixes = text
            .lines()
            .map(|l| match l.find('#') {
                Some(p) => l[..p].trim(),
                None => l.trim(),
            })
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        Self::new(prefixes)
    }

    pub fn unit_of(&self, site_name: &str) -> String {
        for p in &self.prefixes {
            if site_name.starts_with(p.as_str()) {
                return p.trim_end_matches(['_', '.']).to_string();
            }
        }
        "top".to_string()
    }
}

/// Per-unit aggregate counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnitStats {
    pub unit: String,
    pub faults: u64,
    pub detected: u64,
    /// Constraint-safe counts keyed by category keyword.
    pub safe_by_category: BTreeMap<String, u64>,
    pub structural: u64,
    pub aborted: u64,
}

impl UnitStats {
    pub fn safe_total(&self) -> u64 {
        self.safe_by_category.values().sum()
    }

    /// All faults removed from the safe-aware denominator.
    pub fn safe_all(&self) -> u64 {
        self.safe_total() + self.structural
    }

    fn check(&self) -> Result<(), ReportError> {
        let bad = |msg: String| ReportError::InconsistentUnit { unit: self.unit.clone(), msg };
        if self.faults == 0 {
            return Err(bad("zero faults".into()));
        }
        let safe_all = self
            .safe_by_category
            .values()
            .try_fold(self.structural, |acc, &v| acc.checked_add(v))
            .ok_or_else(|| bad("safe counts overflow".into()))?;
        let committed = safe_all
            .checked_add(self.aborted)
            .ok_or_else(|| bad("counts overflow".into()))?;
        if committed > self.faults {
            return Err(bad(format!(
                "safe {} + aborted {} exceed faults {}",
                safe_all, self.aborted, self.faults
            )));
        }
        if self.detected > self.faults - safe_all {
            return Err(bad(format!(
                "detected {} exceeds faults {} minus safe {}",
                self.detected, self.faults, safe_all
            )));
        }
        Ok(())
    }
}

/// Where the report came from; folded into emitted headers so identical
/// inputs yield identical bytes and different inputs are distinguishable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub netlist_hash: Option<String>,
    pub constraints_hash: Option<String>,
    pub tool: String,
}

/// 64-bit FNV-1a content hash, hex-encoded. Provenance only.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Full classification report: per-unit rows, optional global totals row,
/// the category column order, and diagnostics.
#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub units: Vec<UnitStats>,
    pub total: Option<UnitStats>,
    /// Category column keywords: the six standard ones, then user-defined
    /// categories in first-seen order.
    pub categories: Vec<String>,
    pub provenance: Provenance,
    pub diagnostics: Vec<String>,
}

fn standard_category_columns() -> Vec<String> {
    Category::STANDARD.iter().map(|c| c.keyword()).collect()
}

/// Aggregate per-fault classes (and optional detection flags) into a report.
pub fn build_report(
    scan: &ScanNetlist,
    faults: &[Fault],
    classes: &[FaultClass],
    detected: Option<&[bool]>,
    units: &UnitMap,
    provenance: Provenance,
) -> Result<ClassificationReport, ReportError> {
    if classes.len() != faults.len() {
        return Err(ReportError::MisalignedVerdicts { expected: faults.len(), got: classes.len() });
    }
    if let Some(d) = detected {
        if d.len() != faults.len() {
            return Err(ReportError::MisalignedVerdicts { expected: faults.len(), got: d.len() });
        }
    }

    let mut categories = standard_category_columns();
    let mut stats: BTreeMap<String, UnitStats> = BTreeMap::new();
    for (i, fault) in faults.iter().enumerate() {
        let unit = units.unit_of(fault.site_net_name(scan));
        let entry = stats.entry(unit.clone()).or_insert_with(|| UnitStats {
            unit,
            ..UnitStats::default()
        });
        entry.faults += 1;
        match &classes[i] {
            FaultClass::Testable(_) => {}
            FaultClass::StructurallyUntestable => entry.structural += 1,
            FaultClass::ConstraintUntestable(cat) => {
                let key = cat.keyword();
                if !categories.contains(&key) {
                    categories.push(key.clone());
                }
                *entry.safe_by_category.entry(key).or_insert(0) += 1;
            }
            FaultClass::Aborted => entry.aborted += 1,
        }
        if let Some(d) = detected {
            if d[i] {
                if classes[i].is_safe() {
                    return Err(ReportError::DetectedSafeFault {
                        site: faults[i].to_line(scan),
                    });
                }
                entry.detected += 1;
            }
        }
    }

    let mut diagnostics = Vec::new();
    if faults.is_empty() {
        diagnostics.push("empty fault universe: nothing to classify".to_string());
    }

    let units_vec: Vec<UnitStats> = stats.into_values().collect();
    for u in &units_vec {
        u.check()?;
    }
    let total = if units_vec.is_empty() {
        None
    } else {
        let mut t = UnitStats { unit: "total".into(), ..UnitStats::default() };
        for u in &units_vec {
            t.faults += u.faults;
            t.detected += u.detected;
            t.structural += u.structural;
            t.aborted += u.aborted;
            for (k, v) in &u.safe_by_category {
                *t.safe_by_category.entry(k.clone()).or_insert(0) += v;
            }
        }
        Some(t)
    };

    Ok(ClassificationReport { units: units_vec, total, categories, provenance, diagnostics })
}

// ---------------------------------------------------------------------------
// external counts input
// ---------------------------------------------------------------------------

/// One row of an external counts file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountsRow {
    pub unit: String,
    pub faults: u64,
    pub detected: u64,
    pub safe: Option<u64>,
    pub categories: BTreeMap<String, u64>,
    pub structural: u64,
    pub aborted: u64,
}

/// Parse a counts CSV. The header names the columns: `unit` and `faults`
/// are required; `detected`, `safe`, `structural`, `aborted` and any
/// category keyword (`reset_logic`, ..., `user:<name>`) are optional.
pub fn parse_counts_csv(text: &str) -> Result<Vec<CountsRow>, ReportError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or(ReportError::CountsParse { line: 1, msg: "empty file".into() })?;
    let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    if columns.first().map(String::as_str) != Some("unit") {
        return Err(ReportError::CountsParse {
            line: hline,
            msg: "first column must be 'unit'".into(),
        });
    }
    for c in &columns[1..] {
        let known = matches!(c.as_str(), "faults" | "detected" | "safe" | "structural" | "aborted")
            || Category::parse(c).is_some();
        if !known {
            return Err(ReportError::CountsParse {
                line: hline,
                msg: format!("unknown column '{c}'"),
            });
        }
    }
    if !columns.iter().any(|c| c == "faults") {
        return Err(ReportError::CountsParse { line: hline, msg: "missing 'faults' column".into() });
    }

    let mut rows = Vec::new();
    for (ln, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(ReportError::CountsParse {
                line: ln,
                msg: format!("expected {} fields, got {}", columns.len(), fields.len()),
            });
        }
        let mut row = CountsRow { unit: fields[0].to_string(), ..CountsRow::default() };
        for (col, field) in columns.iter().zip(&fields).skip(1) {
            let value: u64 = field.parse().map_err(|_| ReportError::CountsParse {
                line: ln,
                msg: format!("'{field}' is not a count"),
            })?;
            match col.as_str() {
                "faults" => row.faults = value,
                "detected" => row.detected = value,
                "safe" => row.safe = Some(value),
                "structural" => row.structural = value,
                "aborted" => row.aborted = value,
                cat => {
                    row.categories.insert(cat.to_string(), value);
                }
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Build a report from external per-unit counts, the path used to reproduce
/// published coverage tables without re-running any analysis. When both a
/// `safe` column and category columns are present they must agree; with
/// categories only, `safe` is their sum; with `safe` only, the categories
/// stay empty and the total is carried in a synthetic `uncategorized`
/// bucket.
pub fn report_from_counts(
    rows: &[CountsRow],
    provenance: Provenance,
) -> Result<ClassificationReport, ReportError> {
    let mut categories = standard_category_columns();
    let mut units = Vec::with_capacity(rows.len());
    let mut diagnostics = Vec::new();
    for row in rows {
        let cat_sum = row
            .categories
            .values()
            .try_fold(0u64, |acc, &v| acc.checked_add(v))
            .ok_or_else(|| ReportError::InconsistentUnit {
                unit: row.unit.clone(),
                msg: "category counts overflow".into(),
            })?;
        let mut safe_by_category = row.categories.clone();
        match row.safe {
            Some(safe) if !row.categories.is_empty() => {
                if safe != cat_sum {
                    return Err(ReportError::InconsistentUnit {
                        unit: row.unit.clone(),
                        msg: format!("safe {} does not equal category sum {}", safe, cat_sum),
                    });
                }
            }
            Some(safe) if safe > 0 => {
                safe_by_category.insert("uncategorized".to_string(), safe);
                if !categories.iter().any(|c| c == "uncategorized") {
                    categories.push("uncategorized".to_string());
                }
            }
            _ => {}
        }
        for key in safe_by_category.keys() {
            if !categories.contains(key) {
                categories.push(key.clone());
            }
        }
        let stats = UnitStats {
            unit: row.unit.clone(),
            faults: row.faults,
            detected: row.detected,
            safe_by_category,
            structural: row.structural,
            aborted: row.aborted,
        };
        stats.check()?;
        units.push(stats);
    }
    if units.is_empty() {
        diagnostics.push("empty fault universe: counts file has no rows".to_string());
    }
    Ok(ClassificationReport { units, total: None, categories, provenance, diagnostics })
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Text,
}

impl ReportFormat {
    pub fn parse(word: &str) -> Option<ReportFormat> {
        match word {
            "csv" => Some(ReportFormat::Csv),
            "text" => Some(ReportFormat::Text),
            _ => None,
        }
    }
}

fn row_cells(u: &UnitStats, categories: &[String]) -> Vec<String> {
    let mut cells = vec![u.unit.clone(), u.faults.to_string()];
    for c in categories {
        cells.push(u.safe_by_category.get(c).copied().unwrap_or(0).to_string());
    }
    cells.push(u.structural.to_string());
    cells.push(u.aborted.to_string());
    cells.push(u.safe_total().to_string());
    cells.push(percent_2dp(u.safe_total(), u.faults));
    cells.push(u.detected.to_string());
    cells.push(percent_2dp(u.detected, u.faults));
    let denom = u.faults - u.safe_all();
    cells.push(if denom == 0 {
        "n/a".to_string()
    } else {
        percent_2dp(u.detected, denom)
    });
    cells
}

fn header_cells(categories: &[String]) -> Vec<String> {
    let mut cells = vec!["unit".to_string(), "faults".to_string()];
    cells.extend(categories.iter().cloned());
    for c in ["structural", "aborted", "safe", "safe_pct", "detected", "fc_pct", "fc_safe_pct"] {
        cells.push(c.to_string());
    }
    cells
}

/// Render the report. Output is deterministic: identical reports produce
/// identical bytes.
pub fn emit_report(r: &ClassificationReport, format: ReportFormat) -> Vec<u8> {
    let mut rows: Vec<Vec<String>> = vec![header_cells(&r.categories)];
    for u in &r.units {
        rows.push(row_cells(u, &r.categories));
    }
    if let Some(t) = &r.total {
        rows.push(row_cells(t, &r.categories));
    }

    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            for row in &rows {
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        ReportFormat::Text => {
            if let Some(h) = &r.provenance.netlist_hash {
                let _ = writeln!(out, "# netlist {h}");
            }
            if let Some(h) = &r.provenance.constraints_hash {
                let _ = writeln!(out, "# constraints {h}");
            }
            if !r.provenance.tool.is_empty() {
                let _ = writeln!(out, "# produced by {}", r.provenance.tool);
            }
            let widths: Vec<usize> = (0..rows[0].len())
                .map(|c| rows.iter().map(|row| row[c].len()).max().unwrap_or(0))
                .collect();
            for row in &rows {
                let mut line = String::new();
                for (c, cell) in row.iter().enumerate() {
                    if c == 0 {
                        line.push_str(&format!("{:<width$}", cell, width = widths[c]));
                    } else {
                        line.push_str(&format!("  {:>width$}", cell, width = widths[c]));
                    }
                }
                let _ = writeln!(out, "{}", line.trim_end());
            }
        }
    }
    out.into_bytes()
}

// ---------------------------------------------------------------------------
// verdict file format
// ---------------------------------------------------------------------------

/// One line per fault: `<site>/<polarity> <T|U|S|A> [witness-bits] [category]`.
pub fn write_verdicts(
    scan: &ScanNetlist,
    faults: &[Fault],
    classes: &[FaultClass],
    provenance: &Provenance,
) -> String {
    let mut out = String::new();
    if let Some(h) = &provenance.netlist_hash {
        let _ = writeln!(out, "# netlist {h}");
    }
    if let Some(h) = &provenance.constraints_hash {
        let _ = writeln!(out, "# constraints {h}");
    }
    if !provenance.tool.is_empty() {
        let _ = writeln!(out, "# produced by {}", provenance.tool);
    }
    for (fault, class) in faults.iter().zip(classes) {
        let line = fault.to_line(scan);
        match class {
            FaultClass::Testable(w) => {
                let _ = writeln!(out, "{line} T {w}");
            }
            FaultClass::StructurallyUntestable => {
                let _ = writeln!(out, "{line} U");
            }
            FaultClass::ConstraintUntestable(cat) => {
                let _ = writeln!(out, "{line} S {}", cat.keyword());
            }
            FaultClass::Aborted => {
                let _ = writeln!(out, "{line} A");
            }
        }
    }
    out
}

/// A parsed verdict-file line, with the site kept textual so reports can be
/// joined without the originating netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictRecord {
    /// e.g. `gate:alu_x:out/0`
    pub fault_line: String,
    pub class: FaultClass,
}

impl VerdictRecord {
    /// Net name inside the site, for unit attribution.
    pub fn site_name(&self) -> &str {
        site_name_of_fault_line(&self.fault_line).unwrap_or(&self.fault_line)
    }
}

/// Extract the net name out of `port:<name>/p` or `gate:<name>:...` lines.
pub fn site_name_of_fault_line(line: &str) -> Option<&str> {
    let site = line.rsplit_once('/').map(|(s, _)| s).unwrap_or(line);
    let mut parts = site.split(':');
    match (parts.next()?, parts.next()) {
        ("port", Some(name)) => Some(name),
        ("gate", Some(name)) => Some(name),
        _ => None,
    }
}

pub fn parse_verdict_file(text: &str) -> Result<Vec<VerdictRecord>, ReportError> {
    let mut records = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line_no = li + 1;
        let code = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let code = code.trim();
        if code.is_empty() {
            continue;
        }
        let mut fields = code.split_whitespace();
        let fault_line = fields
            .next()
            .ok_or(ReportError::VerdictParse { line: line_no, msg: "missing fault".into() })?
            .to_string();
        if site_name_of_fault_line(&fault_line).is_none() {
            return Err(ReportError::VerdictParse {
                line: line_no,
                msg: format!("malformed site '{fault_line}'"),
            });
        }
        let code_field = fields
            .next()
            .ok_or(ReportError::VerdictParse { line: line_no, msg: "missing verdict".into() })?;
        let class = match code_field {
            "T" => {
                let bits = fields.next().ok_or(ReportError::VerdictParse {
                    line: line_no,
                    msg: "testable verdict without witness".into(),
                })?;
                let mut pattern = Vec::with_capacity(bits.len());
                for ch in bits.chars() {
                    match ch {
                        '0' => pattern.push(false),
                        '1' => pattern.push(true),
                        _ => {
                            return Err(ReportError::VerdictParse {
                                line: line_no,
                                msg: format!("bad witness character '{ch}'"),
                            });
                        }
                    }
                }
                FaultClass::Testable(TestPattern::new(pattern))
            }
            "U" => FaultClass::StructurallyUntestable,
            "S" => {
                let cat = fields.next().ok_or(ReportError::VerdictParse {
                    line: line_no,
                    msg: "safe verdict without category".into(),
                })?;
                let category = Category::parse(cat).ok_or(ReportError::VerdictParse {
                    line: line_no,
                    msg: format!("unknown category '{cat}'"),
                })?;
                FaultClass::ConstraintUntestable(category)
            }
            "A" => FaultClass::Aborted,
            other => {
                return Err(ReportError::VerdictParse {
                    line: line_no,
                    msg: format!("unknown verdict code '{other}'"),
                });
            }
        };
        records.push(VerdictRecord { fault_line, class });
    }
    Ok(records)
}

/// Build a report from verdict records, an optional detected fault-line
/// set, and a unit map. Detected faults must exist in the verdict universe
/// and must not be classified safe.
pub fn report_from_verdicts(
    records: &[VerdictRecord],
    detected: Option<&[String]>,
    units: &UnitMap,
    provenance: Provenance,
) -> Result<ClassificationReport, ReportError> {
    let mut categories = standard_category_columns();
    let mut stats: BTreeMap<String, UnitStats> = BTreeMap::new();
    let mut by_line: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, rec) in records.iter().enumerate() {
        by_line.insert(rec.fault_line.as_str(), i);
        let unit = units.unit_of(rec.site_name());
        let entry = stats.entry(unit.clone()).or_insert_with(|| UnitStats {
            unit,
            ..UnitStats::default()
        });
        entry.faults += 1;
        match &rec.class {
            FaultClass::Testable(_) => {}
            FaultClass::StructurallyUntestable => entry.structural += 1,
            FaultClass::ConstraintUntestable(cat) => {
                let key = cat.keyword();
                if !categories.contains(&key) {
                    categories.push(key.clone());
                }
                *entry.safe_by_category.entry(key).or_insert(0) += 1;
            }
            FaultClass::Aborted => entry.aborted += 1,
        }
    }
    if let Some(detected) = detected {
        let mut unique: Vec<&String> = detected.iter().collect();
        unique.sort_unstable();
        unique.dedup();
        for line in unique {
            let idx = by_line.get(line.as_str()).copied().ok_or_else(|| {
                ReportError::VerdictParse {
                    line: 0,
                    msg: format!("detected fault '{line}' not in the verdict universe"),
                }
            })?;
            let rec = &records[idx];
            if rec.class.is_safe() {
                return Err(ReportError::DetectedSafeFault { site: line.clone() });
            }
            let unit = units.unit_of(rec.site_name());
            stats.get_mut(&unit).unwrap().detected += 1;
        }
    }

    let units_vec: Vec<UnitStats> = stats.into_values().collect();
    for u in &units_vec {
        u.check()?;
    }
    let mut diagnostics = Vec::new();
    if units_vec.is_empty() {
        diagnostics.push("empty fault universe: verdict file has no records".to_string());
    }
    let total = if units_vec.is_empty() {
        None
    } else {
        let mut t = UnitStats { unit: "total".into(), ..UnitStats::default() };
        for u in &units_vec {
            t.faults += u.faults;
            t.detected += u.detected;
            t.structural += u.structural;
            t.aborted += u.aborted;
            for (k, v) in &u.safe_by_category {
                *t.safe_by_category.entry(k.clone()).or_insert(0) += v;
            }
        }
        Some(t)
    };
    Ok(ClassificationReport { units: units_vec, total, categories, provenance, diagnostics })
}
