use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Suite};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Structural,
    Skipped,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Structural => "structural",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check_id: String,
    /// Name of the property being checked; shared by all sectors.
    pub claim: String,
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<String>,
    /// Residual, angle or measured quantity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Smallest and largest eigenvalue of a compressed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrema: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub structural: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub tool_version: String,
    pub os: String,
    pub arch: String,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub environment: Environment,
    pub config: RunConfig,
    pub summary: Summary,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(config: RunConfig, records: Vec<Record>) -> Self {
        let mut summary = Summary { total: records.len(), ..Default::default() };
        for r in &records {
            match r.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::Structural => summary.structural += 1,
                Verdict::Skipped => summary.skipped += 1,
            }
        }
        Self { schema_version: SCHEMA_VERSION, environment: Environment::current(), config, summary, records }
    }

    pub fn any_fail(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["check_id", "claim", "suite", "sector", "value", "min", "max", "threshold", "verdict", "note", "runtime_ms"])?;
        let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for r in &self.records {
            out.write_record([
                r.check_id.clone(),
                r.claim.clone(),
                r.suite.name().to_string(),
                r.sector.clone().unwrap_or_default(),
                num(r.value),
                num(r.extrema.map(|e| e[0])),
                num(r.extrema.map(|e| e[1])),
                num(r.threshold),
                r.verdict.name().to_string(),
                r.note.clone().unwrap_or_default(),
                num(r.runtime_ms),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DiffError {
    #[error("schema version {old} vs {new}")]
    Schema { old: u32, new: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictChange {
    pub check_id: String,
    pub old: Verdict,
    pub new: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Drift {
    pub check_id: String,
    pub old: f64,
    pub new: f64,
    pub factor: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportDiff {
    pub verdict_changes: Vec<VerdictChange>,
    pub drift: Vec<Drift>,
    pub new_checks: Vec<String>,
    pub removed_checks: Vec<String>,
}

/// Residuals below this are treated as equal to it when measuring drift.
const DRIFT_FLOOR: f64 = 1e-16;
const DRIFT_FACTOR: f64 = 10.0;

impl ReportDiff {
    pub fn is_empty(&self) -> bool {
        self.verdict_changes.is_empty() && self.drift.is_empty() && self.new_checks.is_empty() && self.removed_checks.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut section = |title: &str, lines: Vec<String>| {
            if !lines.is_empty() {
                s.push_str(&format!("{title} ({})\n", lines.len()));
                for l in lines {
                    s.push_str(&format!("  {l}\n"));
                }
            }
        };
        section(
            "verdict changes",
            self.verdict_changes.iter().map(|c| format!("{}: {} -> {}", c.check_id, c.old.name(), c.new.name())).collect(),
        );
        section(
            "residual drift",
            self.drift.iter().map(|d| format!("{}: {:e} -> {:e} (x{:.1})", d.check_id, d.old, d.new, d.factor)).collect(),
        );
        section("new checks", self.new_checks.clone());
        section("removed checks", self.removed_checks.clone());
        s
    }
}

pub fn diff_reports(old: &Report, new: &Report) -> Result<ReportDiff, DiffError> {
    if old.schema_version != new.schema_version {
        return Err(DiffError::Schema { old: old.schema_version, new: new.schema_version });
    }
    let index = |r: &Report| r.records.iter().map(|x| (x.check_id.clone(), x.clone())).collect::<BTreeMap<_, _>>();
    let (a, b) = (index(old), index(new));
    let mut d = ReportDiff::default();
    for (id, rb) in &b {
        let Some(ra) = a.get(id) else {
            d.new_checks.push(id.clone());
            continue;
        };
        if ra.verdict != rb.verdict {
            d.verdict_changes.push(VerdictChange { check_id: id.clone(), old: ra.verdict, new: rb.verdict });
        }
        if let (Some(x), Some(y)) = (ra.value, rb.value) {
            let (xa, ya) = (x.abs().max(DRIFT_FLOOR), y.abs().max(DRIFT_FLOOR));
            let factor = (ya / xa).max(xa / ya);
            if factor > DRIFT_FACTOR {
                d.drift.push(Drift { check_id: id.clone(), old: x, new: y, factor });
            }
        }
    }
    d.removed_checks = a.keys().filter(|k| !b.contains_key(*k)).cloned().collect();
    Ok(d)
}
