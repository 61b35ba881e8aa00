//! Flat `key = value` scenario configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' anything
//! entry   := key '=' value [comment]
//! value   := scalar | scalar (',' scalar)*
//! ```
//!
//! Keys may appear at most once. Unknown keys are an error, and every key
//! has a per-scenario default (see [`ScenarioConfig::defaults`]).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spr_core::bounds::BoundsConfig;
use spr_core::DistributionSpec;

use crate::error::{ExpError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    StabilitySweep,
    FrameBounds,
    SmallBall,
    JsetTails,
    NetTransfer,
    InstabilityDemo,
    PrFailureDemo,
    PeakyDemo,
    LemmaSuite,
    BoundsTable,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::StabilitySweep,
        Scenario::FrameBounds,
        Scenario::SmallBall,
        Scenario::JsetTails,
        Scenario::NetTransfer,
        Scenario::InstabilityDemo,
        Scenario::PrFailureDemo,
        Scenario::PeakyDemo,
        Scenario::LemmaSuite,
        Scenario::BoundsTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::StabilitySweep => "stability-sweep",
            Scenario::FrameBounds => "frame-bounds",
            Scenario::SmallBall => "small-ball",
            Scenario::JsetTails => "jset-tails",
            Scenario::NetTransfer => "net-transfer",
            Scenario::InstabilityDemo => "instability-demo",
            Scenario::PrFailureDemo => "pr-failure-demo",
            Scenario::PeakyDemo => "peaky-demo",
            Scenario::LemmaSuite => "lemma-suite",
            Scenario::BoundsTable => "bounds-table",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| ExpError::config("scenario", format!("unknown scenario `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub distribution: DistributionSpec,
    pub seed: u64,
    /// Signal dimension.
    pub n: usize,
    /// Random frame vectors.
    pub m: usize,
    /// Sample points of the empirical measure.
    pub points: usize,
    pub dims: Vec<usize>,
    pub m_per_n: usize,
    pub budget: u64,
    pub trials: usize,
    pub seeds: usize,
    pub pairs: usize,
    pub directions: usize,
    pub resolution_deg: f64,
    pub a: f64,
    pub p: f64,
    pub eps: Vec<f64>,
    pub peaky_l1: f64,
    pub gap_tol: Option<f64>,
    pub bounds: BoundsConfig,
    pub out_dir: Option<PathBuf>,
    pub max_seconds: Option<f64>,
}

const KEYS: [&str; 27] = [
    "scenario",
    "family",
    "alpha",
    "theta",
    "seed",
    "n",
    "m",
    "points",
    "dims",
    "m_per_n",
    "budget",
    "trials",
    "seeds",
    "pairs",
    "directions",
    "resolution_deg",
    "a",
    "p",
    "eps",
    "peaky_l1",
    "gap_tol",
    "a1",
    "c",
    "c_illustrative",
    "out_dir",
    "max_seconds",
    "threads",
];

impl ScenarioConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let mut cfg = Self {
            scenario,
            distribution: DistributionSpec::gaussian(),
            seed: 0,
            n: 16,
            m: 320,
            points: 100_000,
            dims: vec![4, 8, 16, 32],
            m_per_n: 8,
            budget: 10_000,
            trials: 1000,
            seeds: 100,
            pairs: 10_000,
            directions: 20,
            resolution_deg: 1.0,
            a: 1.0,
            p: 4.0,
            eps: vec![0.1, 0.01, 0.001],
            peaky_l1: 0.005,
            gap_tol: None,
            bounds: BoundsConfig::default(),
            out_dir: None,
            max_seconds: None,
        };
        match scenario {
            Scenario::StabilitySweep => cfg.points = 20_000,
            Scenario::SmallBall => cfg.n = 6,
            Scenario::JsetTails => {
                cfg.n = 4;
                cfg.m = 10_000;
            }
            Scenario::NetTransfer => {
                cfg.n = 2;
                cfg.m = 10_000;
                cfg.a = 0.5;
            }
            Scenario::PrFailureDemo => {
                cfg.distribution = DistributionSpec::rademacher();
                cfg.n = 2;
                cfg.points = 20_000;
            }
            Scenario::PeakyDemo => {
                cfg.n = 2;
                cfg.eps = vec![0.1];
            }
            Scenario::LemmaSuite => cfg.points = 20_000,
            Scenario::FrameBounds | Scenario::InstabilityDemo | Scenario::BoundsTable => {}
        }
        cfg
    }

    /// Defaults for `scenario` overlaid with the entries of `text`.
    pub fn parse(scenario: Scenario, text: &str) -> Result<Self> {
        let entries = parse_entries(text)?;
        let mut cfg = Self::defaults(scenario);
        if let Some(name) = entries.get("scenario") {
            if name.parse::<Scenario>()? != scenario {
                return Err(ExpError::config(
                    "scenario",
                    format!("file is for `{name}`, not `{scenario}`"),
                ));
            }
        }
        if let Some(family) = entries.get("family") {
            cfg.distribution = DistributionSpec::from_parts(
                family,
                entries.get("alpha").map(String::as_str),
                entries.get("theta").map(String::as_str),
            )
            .map_err(|e| ExpError::config("family", e.to_string()))?;
        } else if let Some(key) = ["alpha", "theta"]
            .into_iter()
            .find(|k| entries.contains_key(*k))
        {
            return Err(ExpError::config(key, "needs `family`".into()));
        }
        for (key, value) in &entries {
            match key.as_str() {
                "seed" => cfg.seed = scalar(key, value)?,
                "n" => cfg.n = positive(key, value)?,
                "m" => cfg.m = positive(key, value)?,
                "points" => cfg.points = positive(key, value)?,
                "dims" => cfg.dims = list(key, value)?,
                "m_per_n" => cfg.m_per_n = positive(key, value)?,
                "budget" => cfg.budget = scalar(key, value)?,
                "trials" => cfg.trials = positive(key, value)?,
                "seeds" => cfg.seeds = positive(key, value)?,
                "pairs" => cfg.pairs = positive(key, value)?,
                "directions" => cfg.directions = positive(key, value)?,
                "resolution_deg" => cfg.resolution_deg = finite(key, value)?,
                "a" => cfg.a = finite(key, value)?,
                "p" => cfg.p = finite(key, value)?,
                "eps" => cfg.eps = finite_list(key, value)?,
                "peaky_l1" => cfg.peaky_l1 = finite(key, value)?,
                "gap_tol" => cfg.gap_tol = Some(finite(key, value)?),
                "a1" => cfg.bounds.a1 = finite(key, value)?,
                "c" => cfg.bounds.c = finite(key, value)?,
                "c_illustrative" => cfg.bounds.illustrative = scalar(key, value)?,
                "out_dir" => cfg.out_dir = Some(PathBuf::from(value)),
                "max_seconds" => cfg.max_seconds = Some(finite(key, value)?),
                _ => {}
            }
        }
        if cfg.dims.is_empty() || cfg.dims.contains(&0) {
            return Err(ExpError::config("dims", "needs positive dimensions".into()));
        }
        cfg.bounds
            .validate()
            .map_err(|e| ExpError::config("c", e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(scenario: Scenario, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ExpError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(scenario, &text)
    }

    /// `threads` from the file, which [`Self::parse`] accepts but leaves to the caller.
    pub fn threads_entry(text: &str) -> Result<Option<usize>> {
        parse_entries(text)?
            .get("threads")
            .map(|v| positive("threads", v))
            .transpose()
    }

    /// Canonical `key = value` text; parses back to an equal config.
    pub fn to_text(&self) -> String {
        self.echo()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// The effective settings as ordered key/value pairs.
    pub fn echo(&self) -> Vec<(String, String)> {
        let join = |xs: Vec<String>| xs.join(",");
        let mut out = vec![("scenario".to_string(), self.scenario.name().to_string())];
        for line in self.distribution.to_kv(self.seed).lines() {
            if let Some((k, v)) = line.split_once(" = ") {
                out.push((k.to_string(), v.to_string()));
            }
        }
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        push("n", self.n.to_string());
        push("m", self.m.to_string());
        push("points", self.points.to_string());
        push(
            "dims",
            join(self.dims.iter().map(|d| d.to_string()).collect()),
        );
        push("m_per_n", self.m_per_n.to_string());
        push("budget", self.budget.to_string());
        push("trials", self.trials.to_string());
        push("seeds", self.seeds.to_string());
        push("pairs", self.pairs.to_string());
        push("directions", self.directions.to_string());
        push("resolution_deg", format!("{:?}", self.resolution_deg));
        push("a", format!("{:?}", self.a));
        push("p", format!("{:?}", self.p));
        push(
            "eps",
            join(self.eps.iter().map(|e| format!("{e:?}")).collect()),
        );
        push("peaky_l1", format!("{:?}", self.peaky_l1));
        if let Some(t) = self.gap_tol {
            push("gap_tol", format!("{t:?}"));
        }
        push("a1", format!("{:?}", self.bounds.a1));
        push("c", format!("{:?}", self.bounds.c));
        push("c_illustrative", self.bounds.illustrative.to_string());
        if let Some(dir) = &self.out_dir {
            push("out_dir", dir.display().to_string());
        }
        if let Some(s) = self.max_seconds {
            push("max_seconds", format!("{s:?}"));
        }
        out
    }
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ExpError::config(
                "<syntax>",
                format!("line {}: expected `key = value`", lineno + 1),
            )
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(ExpError::config(
                k,
                format!("line {}: unknown key", lineno + 1),
            ));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ExpError::config(
                k,
                format!("line {}: duplicate key", lineno + 1),
            ));
        }
    }
    Ok(map)
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| ExpError::config(key, format!("`{value}`: {e}")))
}

fn positive(key: &str, value: &str) -> Result<usize> {
    match scalar::<usize>(key, value)? {
        0 => Err(ExpError::config(key, "must be positive".into())),
        v => Ok(v),
    }
}

fn finite(key: &str, value: &str) -> Result<f64> {
    let v: f64 = scalar(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExpError::config(key, format!("`{value}` is not finite")))
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value.split(',').map(|s| scalar(key, s.trim())).collect()
}

fn finite_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|s| finite(key, s.trim())).collect()
}
