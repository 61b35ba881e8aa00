//! Empirical-measure model of `span(yⱼ + 1₍ⱼ,ⱼ₊₁₎) ⊆ L₂(ℝ)`.
//!
//! The continuous part lives on `M` sample points of `[0, 1]`, each of mass
//! `1/M`; row `t` of the sample matrix holds `(y₁(t), …, yₙ(t))`. The tail
//! part is `n` atoms of unit mass carrying the coefficients themselves.
//! Every norm of every element uses this one measure, so lemmas that are
//! pointwise algebra hold on the model to float precision.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::ops::Deref;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{sample_matrix, DistributionSpec, SampleMatrix};
use crate::error::check_dim;
use crate::linalg::{dot, SquareMatrix};
use crate::{Error, Real, Result};

/// Number of standard errors used for every Monte Carlo tolerance.
pub const MC_SIGMAS: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailWeight {
    /// Pure span of the `yⱼ` (no indicator atoms).
    PureSpan,
    /// `yⱼ + 1₍ⱼ,ⱼ₊₁₎`.
    Augmented,
}

impl TailWeight {
    pub fn value<T: Real>(self) -> T {
        match self {
            TailWeight::PureSpan => T::zero(),
            TailWeight::Augmented => T::one(),
        }
    }

    fn code(self) -> u8 {
        match self {
            TailWeight::PureSpan => 0,
            TailWeight::Augmented => 1,
        }
    }

    fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(TailWeight::PureSpan),
            1 => Ok(TailWeight::Augmented),
            other => Err(Error::Parse(format!(
                "tail_weight must be 0 or 1, got {other}"
            ))),
        }
    }
}

/// Coefficients `a` of `Σ aⱼ(yⱼ + 1₍ⱼ,ⱼ₊₁₎)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentedElement<T> {
    pub coeffs: Vec<T>,
}

impl<T> From<Vec<T>> for AugmentedElement<T> {
    fn from(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }
}

impl<T> Deref for AugmentedElement<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.coeffs
    }
}

/// Second-order statistics of a pair evaluated in one pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairStats<T> {
    pub gap: T,
    pub dist_minus: T,
    pub dist_plus: T,
    /// `‖f‖` in the same norm as the distances.
    pub norm_f: T,
}

impl<T: Real> PairStats<T> {
    pub fn min_dist(&self) -> T {
        self.dist_minus.min(self.dist_plus)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceModel<T> {
    samples: SampleMatrix<T>,
    tail: TailWeight,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuppressionCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub tolerance: T,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhintchineCheck<T> {
    pub lhs: T,
    pub rhs: T,
    /// Smallest column L₁ norm.
    pub c: T,
    pub tolerance: T,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakyReport<T> {
    pub x_prime: Vec<T>,
    pub y_prime: Vec<T>,
    pub eps: T,
    /// Empirical `‖y_N‖₁`.
    pub l1_last: T,
    /// `‖y_N‖₁ < ε²`; when false the run continues but carries no guarantee.
    pub precondition_met: bool,
    /// `x′·y′ ≡ 0` on every sample point.
    pub disjoint: bool,
    pub dist_last: T,
    pub dist_last_tolerance: T,
    pub dist_first_sq: T,
    pub dist_first_sq_tolerance: T,
    /// Empirical `Prob(|y_N| ≥ ε)`.
    pub tail_mass: T,
    pub holds: bool,
}

fn mean_and_se<T: Real>(xs: impl Iterator<Item = T> + Clone, count: usize) -> (T, T) {
    let n = T::of_usize(count);
    let mean = xs.clone().sum::<T>() / n;
    if count < 2 {
        return (mean, T::zero());
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<T>() / T::of_usize(count - 1);
    (mean, (var / n).sqrt())
}

impl<T: Real> SubspaceModel<T> {
    pub fn new(samples: SampleMatrix<T>, tail: TailWeight) -> Self {
        Self { samples, tail }
    }

    /// Draws `points × n` samples from `spec` and wraps them.
    pub fn sample(
        spec: &DistributionSpec,
        points: usize,
        n: usize,
        seed: u64,
        tail: TailWeight,
    ) -> Result<Self> {
        Ok(Self::new(sample_matrix(spec, points, n, seed)?, tail))
    }

    pub fn dim(&self) -> usize {
        self.samples.cols()
    }

    /// `M`, the number of sample points of `[0, 1]`.
    pub fn points(&self) -> usize {
        self.samples.rows()
    }

    pub fn tail(&self) -> TailWeight {
        self.tail
    }

    pub fn tail_weight(&self) -> T {
        self.tail.value()
    }

    pub fn samples(&self) -> &SampleMatrix<T> {
        &self.samples
    }

    /// `(⟨a, v_t⟩)_t`: the continuous part on the sample points.
    pub fn continuous_values(&self, a: &[T]) -> Result<Vec<T>> {
        self.samples.project(a)
    }

    fn mass(&self) -> T {
        T::one() / T::of_usize(self.points())
    }

    pub fn lp_norm(&self, f: &[T], p: T) -> Result<T> {
        check_dim(self.dim(), f.len())?;
        if !(p >= T::one()) {
            return Err(Error::Domain(format!("L_p norm needs p ≥ 1, got {p}")));
        }
        let cont = self
            .samples
            .iter_rows()
            .map(|r| dot(r, f).abs().powf(p))
            .sum::<T>()
            * self.mass();
        let tail = f.iter().map(|a| a.abs().powf(p)).sum::<T>() * self.tail_weight();
        Ok((cont + tail).powf(T::one() / p))
    }

    pub fn abs_gap(&self, f: &[T], g: &[T]) -> Result<T> {
        check_dim(self.dim(), f.len())?;
        check_dim(self.dim(), g.len())?;
        Ok(self.pair_stats(f, g).gap)
    }

    pub fn min_sign_distance(&self, f: &[T], g: &[T]) -> Result<T> {
        check_dim(self.dim(), f.len())?;
        check_dim(self.dim(), g.len())?;
        Ok(self.pair_stats(f, g).min_dist())
    }

    /// Gap and both sign distances in one pass. Dimensions are not checked.
    pub fn pair_stats(&self, f: &[T], g: &[T]) -> PairStats<T> {
        let (mut gap, mut minus, mut plus, mut nf) = (T::zero(), T::zero(), T::zero(), T::zero());
        for r in self.samples.iter_rows() {
            let (u, w) = (dot(r, f), dot(r, g));
            let d = u.abs() - w.abs();
            gap = gap + d * d;
            minus = minus + (u - w) * (u - w);
            plus = plus + (u + w) * (u + w);
            nf = nf + u * u;
        }
        let mass = self.mass();
        let (mut gap, mut minus, mut plus, mut nf) =
            (gap * mass, minus * mass, plus * mass, nf * mass);
        if self.tail == TailWeight::Augmented {
            for (&a, &b) in f.iter().zip(g) {
                let d = a.abs() - b.abs();
                gap = gap + d * d;
                minus = minus + (a - b) * (a - b);
                plus = plus + (a + b) * (a + b);
                nf = nf + a * a;
            }
        }
        PairStats {
            gap: gap.sqrt(),
            dist_minus: minus.sqrt(),
            dist_plus: plus.sqrt(),
            norm_f: nf.sqrt(),
        }
    }

    /// Empirical L₁ norm of each column.
    pub fn column_l1_norms(&self) -> Vec<T> {
        let mut acc = vec![T::zero(); self.dim()];
        for r in self.samples.iter_rows() {
            for (s, &x) in acc.iter_mut().zip(r) {
                *s = *s + x.abs();
            }
        }
        acc.into_iter().map(|s| s * self.mass()).collect()
    }

    /// `(1/M) VᵀV`, the empirical Gram matrix of the columns.
    pub fn column_gram(&self) -> SquareMatrix<T> {
        let mut g = SquareMatrix::gram(self.points(), self.dim(), self.samples.data());
        let mass = self.mass();
        g.data.iter_mut().for_each(|x| *x = *x * mass);
        g
    }

    fn require_pure_span(&self, what: &str) -> Result<()> {
        if self.tail == TailWeight::PureSpan {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} is a statement in L₁([0,1]); use a pure-span model"
            )))
        }
    }

    /// `‖Σ_{j∈J} aⱼyⱼ‖₁ ≤ ‖Σ aⱼyⱼ‖₁` with a Monte Carlo tolerance of
    /// [`MC_SIGMAS`] standard errors of the pointwise difference.
    pub fn check_suppression_unconditional(
        &self,
        a: &[T],
        subset: &[usize],
    ) -> Result<SuppressionCheck<T>> {
        self.require_pure_span("suppression unconditionality")?;
        check_dim(self.dim(), a.len())?;
        let mut partial = vec![T::zero(); a.len()];
        for &j in subset {
            if j >= a.len() {
                return Err(Error::Domain(format!(
                    "index {j} out of range for dimension {}",
                    a.len()
                )));
            }
            partial[j] = a[j];
        }
        let diffs: Vec<T> = self
            .samples
            .iter_rows()
            .map(|r| dot(r, &partial).abs() - dot(r, a).abs())
            .collect();
        let lhs = self
            .samples
            .iter_rows()
            .map(|r| dot(r, &partial).abs())
            .sum::<T>()
            * self.mass();
        let rhs = self.samples.iter_rows().map(|r| dot(r, a).abs()).sum::<T>() * self.mass();
        let (_, se) = mean_and_se(diffs.iter().copied(), diffs.len());
        let tolerance = T::of(MC_SIGMAS) * se;
        Ok(SuppressionCheck {
            lhs,
            rhs,
            tolerance,
            holds: lhs <= rhs + tolerance,
        })
    }

    /// `‖x‖₁ ≥ ½·c·A₁·‖x‖₂` for `x = Σ aⱼyⱼ`, `c = minⱼ ‖yⱼ‖₁`.
    pub fn khintchine_check(&self, a: &[T], a1: T) -> Result<KhintchineCheck<T>> {
        self.require_pure_span("the Khintchine lower bound")?;
        check_dim(self.dim(), a.len())?;
        let c = self
            .column_l1_norms()
            .into_iter()
            .fold(T::infinity(), T::min);
        let x = self.continuous_values(a)?;
        let m = x.len();
        let (l1, se1) = mean_and_se(x.iter().map(|v| v.abs()), m);
        let (l2sq, se2sq) = mean_and_se(x.iter().map(|&v| v * v), m);
        let l2 = l2sq.sqrt();
        let half = T::of(0.5) * c * a1;
        let se2 = if l2 > T::zero() {
            se2sq / (T::of(2.0) * l2)
        } else {
            T::zero()
        };
        let tolerance = T::of(MC_SIGMAS) * (se1 * se1 + half * half * se2 * se2).sqrt();
        let rhs = half * l2;
        Ok(KhintchineCheck {
            lhs: l1,
            rhs,
            c,
            tolerance,
            holds: l1 >= rhs - tolerance,
        })
    }

    /// Perturbs columns `first` (y₁) and `last` (y_N) to disjoint supports:
    /// `x′ = y₁·1{|y_N| < ε}`, `y′ = y_N·1{|y_N| ≥ ε}`.
    pub fn peaky_disjointification(
        &self,
        first: usize,
        last: usize,
        eps: T,
    ) -> Result<PeakyReport<T>> {
        self.require_pure_span("the peaky disjointification")?;
        let n = self.dim();
        if first >= n || last >= n || first == last {
            return Err(Error::Domain(format!(
                "columns ({first}, {last}) invalid for dimension {n}"
            )));
        }
        if !(eps > T::zero()) {
            return Err(Error::Domain("ε must be positive".into()));
        }
        let y1 = self.samples.column(first);
        let yn = self.samples.column(last);
        let m = y1.len();
        let big: Vec<bool> = yn.iter().map(|v| v.abs() >= eps).collect();
        let x_prime: Vec<T> = y1
            .iter()
            .zip(&big)
            .map(|(&v, &b)| if b { T::zero() } else { v })
            .collect();
        let y_prime: Vec<T> = yn
            .iter()
            .zip(&big)
            .map(|(&v, &b)| if b { v } else { T::zero() })
            .collect();
        let disjoint = x_prime
            .iter()
            .zip(&y_prime)
            .all(|(&a, &b)| a * b == T::zero());

        let l1_last = yn.iter().map(|v| v.abs()).sum::<T>() * self.mass();
        let precondition_met = l1_last < eps * eps;
        let tail_mass = T::of_usize(big.iter().filter(|&&b| b).count()) / T::of_usize(m);

        let sigmas = T::of(MC_SIGMAS);
        let rest: Vec<T> = yn
            .iter()
            .zip(&big)
            .map(|(&v, &b)| if b { T::zero() } else { v * v })
            .collect();
        let (rest_mean, rest_se) = mean_and_se(rest.iter().copied(), m);
        let dist_last = rest_mean.sqrt();
        let dist_last_tolerance = (eps * eps + sigmas * rest_se).sqrt() - eps;

        let cut: Vec<T> = y1
            .iter()
            .zip(&big)
            .map(|(&v, &b)| if b { v * v } else { T::zero() })
            .collect();
        let (dist_first_sq, cut_se) = mean_and_se(cut.iter().copied(), m);
        let dist_first_sq_tolerance = sigmas * cut_se;

        let holds = disjoint
            && dist_last < eps + dist_last_tolerance
            && dist_first_sq < eps + dist_first_sq_tolerance;
        Ok(PeakyReport {
            x_prime,
            y_prime,
            eps,
            l1_last,
            precondition_met,
            disjoint,
            dist_last,
            dist_last_tolerance,
            dist_first_sq,
            dist_first_sq_tolerance,
            tail_mass,
            holds,
        })
    }

    fn header(&self) -> String {
        format!(
            "# spr-model n={} M={} tail_weight={} seed={}",
            self.dim(),
            self.points(),
            self.tail.code(),
            self.samples.seed()
        )
    }

    /// Header line `# spr-model n=.. M=.. tail_weight=.. seed=..` followed
    /// by one comma-separated row per sample point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.header())?;
        for r in self.samples.iter_rows() {
            let line: Vec<String> = r.iter().map(|x| x.f64().to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("empty model file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let (n, m, tail, seed) = parse_header(&head)?;
        let mut data = Vec::with_capacity(n * m);
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let before = data.len();
            for cell in line.split(',') {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
                data.push(T::of(v));
            }
            check_dim(n, data.len() - before)?;
        }
        check_dim(n * m, data.len())?;
        Ok(Self::new(SampleMatrix::from_raw(m, n, data, seed)?, tail))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
        self.write_csv(BufWriter::new(file))
            .map_err(|source| Error::Io {
                path: path.into(),
                source,
            })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
        Self::read_csv(BufReader::new(file))
    }

    /// Little-endian: `b"SPRM"`, u32 version, u64 n, u64 M, u8 tail weight,
    /// u64 seed, then `M·n` f64 values row by row.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(b"SPRM")?;
        out.write_all(&1u32.to_le_bytes())?;
        out.write_all(&(self.dim() as u64).to_le_bytes())?;
        out.write_all(&(self.points() as u64).to_le_bytes())?;
        out.write_all(&[self.tail.code()])?;
        out.write_all(&self.samples.seed().to_le_bytes())?;
        for x in self.samples.data() {
            out.write_all(&x.f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Parse(format!("truncated model: {e}"));
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic).map_err(io)?;
        if &magic != b"SPRM" {
            return Err(Error::Parse("bad magic".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        let mut b1 = [0u8; 1];
        input.read_exact(&mut b4).map_err(io)?;
        if u32::from_le_bytes(b4) != 1 {
            return Err(Error::Parse("unsupported model version".into()));
        }
        input.read_exact(&mut b8).map_err(io)?;
        let n = u64::from_le_bytes(b8) as usize;
        input.read_exact(&mut b8).map_err(io)?;
        let m = u64::from_le_bytes(b8) as usize;
        input.read_exact(&mut b1).map_err(io)?;
        let tail = TailWeight::from_code(b1[0])?;
        input.read_exact(&mut b8).map_err(io)?;
        let seed = u64::from_le_bytes(b8);
        let mut data = Vec::with_capacity(n * m);
        for _ in 0..n * m {
            input.read_exact(&mut b8).map_err(io)?;
            data.push(T::of(f64::from_le_bytes(b8)));
        }
        Ok(Self::new(SampleMatrix::from_raw(m, n, data, seed)?, tail))
    }

    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
        let mut w = BufWriter::new(file);
        self.write_binary(&mut w)
            .and_then(|_| w.flush())
            .map_err(|source| Error::Io {
                path: path.into(),
                source,
            })
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
        Self::read_binary(BufReader::new(file))
    }
}

fn parse_header(line: &str) -> Result<(usize, usize, TailWeight, u64)> {
    let body = line
        .strip_prefix("# spr-model")
        .ok_or_else(|| Error::Parse("missing `# spr-model` header".into()))?;
    let (mut n, mut m, mut tail, mut seed) = (None, None, None, None);
    for field in body.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
        let bad = |e: std::num::ParseIntError| Error::Parse(format!("header {k}: {e}"));
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(bad)?),
            "M" => m = Some(v.parse::<usize>().map_err(bad)?),
            "tail_weight" => tail = Some(TailWeight::from_code(v.parse::<u8>().map_err(bad)?)?),
            "seed" => seed = Some(v.parse::<u64>().map_err(bad)?),
            other => return Err(Error::Parse(format!("unknown header field `{other}`"))),
        }
    }
    match (n, m, tail, seed) {
        (Some(n), Some(m), Some(t), Some(s)) => Ok((n, m, t, s)),
        _ => Err(Error::Parse(
            "header needs n, M, tail_weight and seed".into(),
        )),
    }
}
