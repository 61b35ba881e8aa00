//! Mean-zero, variance-one random-variable families, seeded sample
//! matrices, and the moment and small-ball estimators built on them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::check_dim;
use crate::linalg::{dot, norm2};
use crate::rng::{self, tag};
use crate::{Error, Real, Result};

/// Default p-grid for [`estimate_subgaussian_k`]; contains p = 4.
pub const DEFAULT_P_GRID: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Gaussian,
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    UniformSymmetric,
    /// Random sign times a Pareto(`alpha`) magnitude, rescaled to unit
    /// variance. Requires `alpha > 2`; the p-th moment exists iff `p < alpha`.
    HeavyTailParetoSymmetric {
        alpha: f64,
    },
    /// `±c·θ^{-1/2}` with probability θ, `±θ` otherwise, with
    /// `c² = 1 − (1 − θ)θ²`. The L₁ norm is `c√θ + (1 − θ)θ → 0`.
    Peaky {
        theta: f64,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Rademacher => "rademacher",
            Family::UniformSymmetric => "uniform-symmetric",
            Family::HeavyTailParetoSymmetric { .. } => "heavy-tail-pareto-symmetric",
            Family::Peaky { .. } => "peaky",
        }
    }
}

/// A named mean-zero, variance-one law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub family: Family,
}

impl DistributionSpec {
    pub fn new(family: Family) -> Result<Self> {
        let spec = Self { family };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gaussian() -> Self {
        Self {
            family: Family::Gaussian,
        }
    }

    pub fn rademacher() -> Self {
        Self {
            family: Family::Rademacher,
        }
    }

    pub fn uniform() -> Self {
        Self {
            family: Family::UniformSymmetric,
        }
    }

    pub fn pareto(alpha: f64) -> Result<Self> {
        Self::new(Family::HeavyTailParetoSymmetric { alpha })
    }

    pub fn peaky(theta: f64) -> Result<Self> {
        Self::new(Family::Peaky { theta })
    }

    /// The peaky law whose L₁ norm equals `target` (solved by bisection).
    pub fn peaky_with_l1(target: f64) -> Result<Self> {
        if !(target > 0.0 && target < 1.0) {
            return Err(Error::Parameter(format!(
                "target L1 norm {target} not in (0, 1)"
            )));
        }
        let (mut lo, mut hi) = (1e-300f64, 1.0 - 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if peaky_l1(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::peaky(0.5 * (lo + hi))
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::HeavyTailParetoSymmetric { alpha } if !(alpha > 2.0 && alpha.is_finite()) => {
                Err(Error::Parameter(format!(
                    "pareto tail exponent must exceed 2, got {alpha}"
                )))
            }
            Family::Peaky { theta } if !(theta > 0.0 && theta < 1.0) => Err(Error::Parameter(
                format!("peaky theta must lie in (0, 1), got {theta}"),
            )),
            _ => Ok(()),
        }
    }

    /// Whether `E|X|^p` is finite.
    pub fn moment_exists(&self, p: f64) -> bool {
        match self.family {
            Family::HeavyTailParetoSymmetric { alpha } => p < alpha,
            _ => true,
        }
    }

    /// One draw. Parameters must already be validated.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Gaussian => StandardNormal.sample(rng),
            Family::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Family::UniformSymmetric => {
                let s = 3f64.sqrt();
                rng.random_range(-s..s)
            }
            Family::HeavyTailParetoSymmetric { alpha } => {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                // 1 - U lies in (0, 1], so the magnitude is finite and ≥ 1.
                let u: f64 = 1.0 - rng.random::<f64>();
                let norm = (alpha / (alpha - 2.0)).sqrt();
                sign * u.powf(-1.0 / alpha) / norm
            }
            Family::Peaky { theta } => {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let u: f64 = rng.random();
                if u < theta {
                    sign * peaky_big(theta) / theta.sqrt()
                } else {
                    sign * theta
                }
            }
        }
    }

    /// Key/value fragment: `family`, family parameters and `seed`.
    pub fn to_kv(&self, seed: u64) -> String {
        let mut out = format!("family = {}\n", self.family.name());
        match self.family {
            Family::HeavyTailParetoSymmetric { alpha } => {
                out.push_str(&format!("alpha = {alpha:?}\n"))
            }
            Family::Peaky { theta } => out.push_str(&format!("theta = {theta:?}\n")),
            _ => {}
        }
        out.push_str(&format!("seed = {seed}\n"));
        out
    }

    /// Parses a fragment produced by [`Self::to_kv`]. Returns the spec and
    /// the seed (if present). Unknown keys are rejected.
    pub fn from_kv(text: &str) -> Result<(Self, Option<u64>)> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        for key in map.keys() {
            if !matches!(key.as_str(), "family" | "alpha" | "theta" | "seed") {
                return Err(Error::Parse(format!("unknown key `{key}`")));
            }
        }
        let family = map
            .get("family")
            .ok_or_else(|| Error::Parse("missing key `family`".into()))?;
        let spec = Self::from_parts(
            family,
            map.get("alpha").map(String::as_str),
            map.get("theta").map(String::as_str),
        )?;
        let seed = map
            .get("seed")
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("seed: {e}")))
            })
            .transpose()?;
        Ok((spec, seed))
    }

    /// Builds a spec from a family name and optional raw parameters.
    pub fn from_parts(family: &str, alpha: Option<&str>, theta: Option<&str>) -> Result<Self> {
        let num = |key: &str, v: Option<&str>| -> Result<f64> {
            v.ok_or_else(|| Error::Parse(format!("family `{family}` needs `{key}`")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{key}: {e}")))
        };
        let fam = match family {
            "gaussian" => Family::Gaussian,
            "rademacher" => Family::Rademacher,
            "uniform-symmetric" | "uniform" => Family::UniformSymmetric,
            "heavy-tail-pareto-symmetric" | "pareto" => Family::HeavyTailParetoSymmetric {
                alpha: num("alpha", alpha)?,
            },
            "peaky" => Family::Peaky {
                theta: num("theta", theta)?,
            },
            other => return Err(Error::Parse(format!("unknown family `{other}`"))),
        };
        Self::new(fam)
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::HeavyTailParetoSymmetric { alpha } => {
                write!(f, "{}(alpha={alpha})", self.family.name())
            }
            Family::Peaky { theta } => write!(f, "{}(theta={theta})", self.family.name()),
            _ => f.write_str(self.family.name()),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self::from_kv(s)?.0)
    }
}

fn peaky_big(theta: f64) -> f64 {
    (1.0 - (1.0 - theta) * theta * theta).sqrt()
}

fn peaky_l1(theta: f64) -> f64 {
    peaky_big(theta) * theta.sqrt() + (1.0 - theta) * theta
}

/// `m × n` matrix of draws; row `j` is the random vector `v_j`.
///
/// Row `j` is drawn from ChaCha stream `streams[j]` keyed on the master
/// seed, columns left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    seed: u64,
    streams: Vec<u64>,
    /// Law of each column; empty when loaded from raw data.
    specs: Vec<DistributionSpec>,
}

/// `m × n` iid draws from `spec`.
pub fn sample_matrix<T: Real>(
    spec: &DistributionSpec,
    m: usize,
    n: usize,
    seed: u64,
) -> Result<SampleMatrix<T>> {
    sample_matrix_columns(&vec![*spec; n], m, seed)
}

/// Like [`sample_matrix`] with one law per column.
pub fn sample_matrix_columns<T: Real>(
    specs: &[DistributionSpec],
    m: usize,
    seed: u64,
) -> Result<SampleMatrix<T>> {
    if m == 0 || specs.is_empty() {
        return Err(Error::Domain(format!(
            "sample matrix needs m ≥ 1 and n ≥ 1, got {m}×{}",
            specs.len()
        )));
    }
    for s in specs {
        s.validate()?;
    }
    let n = specs.len();
    let key = rng::derive_seed(seed, tag::SAMPLES);
    let mut data = vec![T::zero(); m * n];
    data.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
        let mut r = rng::stream_rng(key, row as u64);
        for (slot, spec) in out.iter_mut().zip(specs) {
            *slot = T::of(spec.draw(&mut r));
        }
    });
    Ok(SampleMatrix {
        rows: m,
        cols: n,
        data,
        seed,
        streams: (0..m as u64).collect(),
        specs: specs.to_vec(),
    })
}

impl<T: Real> SampleMatrix<T> {
    /// Wraps raw row-major data (e.g. loaded from disk).
    pub fn from_raw(rows: usize, cols: usize, data: Vec<T>, seed: u64) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        Ok(Self {
            rows,
            cols,
            data,
            seed,
            streams: (0..rows as u64).collect(),
            specs: Vec::new(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn streams(&self) -> &[u64] {
        &self.streams
    }

    pub fn specs(&self) -> &[DistributionSpec] {
        &self.specs
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[T] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn column(&self, k: usize) -> Vec<T> {
        self.iter_rows().map(|r| r[k]).collect()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.cols + col]
    }

    /// `(⟨x, v_j⟩)_j`.
    pub fn project(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.cols, x.len())?;
        Ok(self.iter_rows().map(|r| dot(r, x)).collect())
    }

    pub fn row_norms(&self) -> Vec<T> {
        self.iter_rows().map(norm2).collect()
    }

    /// Keeps the first `m` rows.
    pub fn truncate_rows(&self, m: usize) -> Self {
        let m = m.min(self.rows);
        Self {
            rows: m,
            cols: self.cols,
            data: self.data[..m * self.cols].to_vec(),
            seed: self.seed,
            streams: self.streams[..m].to_vec(),
            specs: self.specs.clone(),
        }
    }
}

/// Result of [`estimate_subgaussian_k`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgaussianEstimate<T> {
    /// `max_p ‖X‖_p / √p` over the grid.
    pub k: T,
    pub argmax_p: f64,
    /// `(p, ‖X‖_p / √p)` per grid point.
    pub profile: Vec<(f64, T)>,
    /// Set when some grid moment does not exist; the estimate then grows
    /// with the sample size instead of converging.
    pub divergent: bool,
    pub divergent_ps: Vec<f64>,
}

/// Empirical smallest sub-Gaussian constant `K` restricted to `p_grid`.
pub fn estimate_subgaussian_k<T: Real>(
    spec: &DistributionSpec,
    p_grid: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<SubgaussianEstimate<T>> {
    if p_grid.is_empty() {
        return Err(Error::Domain("p grid is empty".into()));
    }
    if let Some(p) = p_grid.iter().find(|&&p| !(p >= 1.0)) {
        return Err(Error::Domain(format!("grid value p = {p} is below 1")));
    }
    if n_samples < 1000 {
        return Err(Error::Domain(format!(
            "need at least 1000 samples, got {n_samples}"
        )));
    }
    let v = sample_matrix::<T>(spec, n_samples, 1, seed)?;
    let abs: Vec<T> = v.data().iter().map(|x| x.abs()).collect();
    let mut profile = Vec::with_capacity(p_grid.len());
    let (mut k, mut argmax_p) = (T::neg_infinity(), p_grid[0]);
    for &p in p_grid {
        let pt = T::of(p);
        // Scale by the max before powering so large p does not overflow.
        let top = abs.iter().copied().fold(T::zero(), T::max);
        let norm = if top == T::zero() {
            T::zero()
        } else {
            let mean = abs.iter().map(|&x| (x / top).powf(pt)).sum::<T>() / T::of_usize(abs.len());
            top * mean.powf(T::one() / pt)
        };
        let ratio = norm / pt.sqrt();
        if ratio > k {
            k = ratio;
            argmax_p = p;
        }
        profile.push((p, ratio));
    }
    let divergent_ps: Vec<f64> = p_grid
        .iter()
        .copied()
        .filter(|&p| !spec.moment_exists(p))
        .collect();
    Ok(SubgaussianEstimate {
        k,
        argmax_p,
        profile,
        divergent: !divergent_ps.is_empty(),
        divergent_ps,
    })
}

/// Empirical `‖X‖₁ / ‖X‖₂`.
pub fn estimate_l1_l2<T: Real>(spec: &DistributionSpec, n_samples: usize, seed: u64) -> Result<T> {
    if n_samples < 1000 {
        return Err(Error::Domain(format!(
            "need at least 1000 samples, got {n_samples}"
        )));
    }
    let v = sample_matrix::<T>(spec, n_samples, 1, seed)?;
    let n = T::of_usize(n_samples);
    let l1 = v.data().iter().map(|x| x.abs()).sum::<T>() / n;
    let l2 = (v.data().iter().map(|&x| x * x).sum::<T>() / n).sqrt();
    Ok(l1 / l2)
}

/// Fraction of rows with `|⟨x, v_j⟩| ≥ a‖x‖`.
pub fn estimate_small_ball<T: Real>(v: &SampleMatrix<T>, x: &[T], a: T) -> Result<T> {
    check_dim(v.cols(), x.len())?;
    let nx = norm2(x);
    if nx == T::zero() {
        return Err(Error::Domain("small-ball probability needs x ≠ 0".into()));
    }
    if a < T::zero() {
        return Err(Error::Domain("small-ball level a must be ≥ 0".into()));
    }
    let threshold = a * nx;
    let hits = v
        .iter_rows()
        .filter(|r| dot(r, x).abs() >= threshold)
        .count();
    Ok(T::of_usize(hits) / T::of_usize(v.rows()))
}

/// `min_{x ∈ net}` of [`estimate_small_ball`]: the empirical γ̂(a).
pub fn estimate_gamma_profile<T: Real>(v: &SampleMatrix<T>, a: T, net: &[Vec<T>]) -> Result<T> {
    if net.is_empty() {
        return Err(Error::Domain("gamma profile needs a non-empty net".into()));
    }
    let tol = T::of(1e-6);
    let mut best = T::infinity();
    for x in net {
        if (norm2(x) - T::one()).abs() > tol {
            return Err(Error::Domain("net vectors must be unit vectors".into()));
        }
        best = best.min(estimate_small_ball(v, x, a)?);
    }
    Ok(best)
}

/// `count` iid uniform unit vectors in ℝⁿ (normalized Gaussians).
pub fn random_unit_vectors<T: Real>(n: usize, count: usize, seed: u64) -> Vec<Vec<T>> {
    (0..count)
        .map(|i| {
            let mut r = rng::tagged_rng(seed, tag::DIRECTIONS, i as u64);
            loop {
                let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
                let nn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if nn > 0.0 {
                    break g.iter().map(|&x| T::of(x / nn)).collect();
                }
            }
        })
        .collect()
}

/// Binomial standard error `√(p(1 − p)/n)`.
pub fn proportion_std_error(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
