//! Run reports and their CSV / JSON forms.
//!
//! The CSV holds the metrics table only, so it is a pure function of the
//! config and seed. Timing lives in the JSON.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

/// Float format for every CSV cell: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

/// One labelled metrics row; `None` cells are written empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub values: Vec<Option<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, values: Vec<Option<f64>>) {
        assert_eq!(
            values.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(Row {
            label: label.into(),
            values,
        });
    }

    /// Shorthand for a row with every cell present.
    pub fn push_all(&mut self, label: impl Into<String>, values: &[f64]) {
        self.push(label, values.iter().map(|&v| Some(v)).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.label);
            for v in &row.values {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&fmt_float(*v));
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// A recorded comparison `value ≤ bound` or `value ≥ bound`.
/// JSON has no NaN or infinity; serde_json writes them as `null`.
fn null_as_nan<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    #[serde(deserialize_with = "null_as_nan")]
    pub value: f64,
    pub relation: Relation,
    #[serde(deserialize_with = "null_as_nan")]
    pub bound: f64,
    pub passed: bool,
}

impl Verdict {
    pub fn at_most(check: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(check.into(), value, Relation::AtMost, bound)
    }

    pub fn at_least(check: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(check.into(), value, Relation::AtLeast, bound)
    }

    /// A yes/no fact, recorded as `1 ≥ 1` or `0 ≥ 1`.
    pub fn flag(check: impl Into<String>, ok: bool) -> Self {
        Self::at_least(check, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    fn new(check: String, value: f64, relation: Relation, bound: f64) -> Self {
        let mut v = Self {
            check,
            value,
            relation,
            bound,
            passed: false,
        };
        v.passed = v.recheck();
        v
    }

    /// Recomputes the outcome from the stored numbers.
    pub fn recheck(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.bound,
            Relation::AtLeast => self.value >= self.bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    pub metrics: Table,
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<Witness>,
    /// The time budget ran out before all work was done.
    pub partial: bool,
    pub wall_time_secs: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        !self.partial && self.verdicts.iter().all(|v| v.passed)
    }

    /// Every stored verdict agrees with its own numbers.
    pub fn verdicts_consistent(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed == v.recheck())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    pub fn to_csv(&self) -> String {
        self.metrics.to_csv()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// A human-readable verdict summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let rel = match v.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
            };
            let tag = if v.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "{tag} {}: {} {rel} {}", v.check, v.value, v.bound);
        }
        if self.partial {
            out.push_str("FAIL time budget exhausted; report is partial\n");
        }
        out
    }

    /// Writes `<dir>/<scenario>.csv` and `<dir>/<scenario>.json`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let io = |path: &Path| {
            let path = path.to_owned();
            move |source| ExpError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let csv = dir.join(format!("{}.csv", self.scenario));
        let json = dir.join(format!("{}.json", self.scenario));
        std::fs::write(&csv, self.to_csv()).map_err(io(&csv))?;
        std::fs::write(&json, self.to_json()?).map_err(io(&json))?;
        Ok((csv, json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut t = Table::new(&["x", "y"]);
        t.push_all("first", &[0.1, 1.0 / 3.0]);
        t.push("second", vec![Some(-2.5e-300), None]);
        RunReport {
            scenario: "demo".into(),
            seed: 3,
            config: vec![("n".into(), "2".into())],
            metrics: t,
            verdicts: vec![
                Verdict::at_most("x small", 0.1, 0.2),
                Verdict::flag("fine", false),
            ],
            witnesses: vec![Witness {
                label: "w".into(),
                f: vec![0.1, 0.7],
                g: vec![1e-17, -3.0],
            }],
            partial: false,
            wall_time_secs: 0.123456789,
        }
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "label,x,y");
        assert_eq!(
            lines[1],
            "first,1.0000000000000001e-1,3.3333333333333331e-1"
        );
        assert_eq!(lines[2], "second,-2.5000000000000000e-300,");
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(Table::new(&["a"]).to_csv(), "label,a\n");
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(RunReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }

    #[test]
    fn non_finite_verdicts_survive_json() {
        let mut r = sample();
        r.verdicts = vec![Verdict::at_most("nan", f64::NAN, 1.0)];
        let back = RunReport::from_json(&r.to_json().unwrap()).unwrap();
        assert!(back.verdicts[0].value.is_nan() && !back.verdicts[0].passed);
    }

    #[test]
    fn verdicts_recheck() {
        let r = sample();
        assert!(r.verdicts_consistent());
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn writes_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let (csv, json) = sample().write(dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(csv).unwrap(), sample().to_csv());
        assert!(std::fs::read_to_string(json)
            .unwrap()
            .contains("\"wall_time_secs\""));
    }
}
