//! Sphere nets of coordinate subspaces, product nets over disjoint splits
//! and J-set counting.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{random_unit_vectors, SampleMatrix};
use crate::error::check_dim;
use crate::frames::Frame;
use crate::linalg::{dot, norm2};
use crate::rng::{tag, tagged_rng};
use crate::{Error, Real, Result};

/// Probe count used to certify covering radii.
pub const DEFAULT_PROBES: usize = 100_000;
const PROBE_SEED: u64 = 0x6e65_7473;
const SHRINK: f64 = 0.85;
const MAX_REFINEMENTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereNet<T> {
    pub k: usize,
    pub eps: f64,
    pub points: Vec<Vec<T>>,
    /// Largest distance from a probe to its nearest net point.
    pub certified_radius: f64,
    pub probes: usize,
}

impl<T: Real> SphereNet<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(3/ε)^k`.
    pub fn cardinality_bound(&self) -> f64 {
        (3.0 / self.eps).powi(self.k as i32)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let cols: Vec<String> = (1..=self.k).map(|i| format!("x{i}")).collect();
        writeln!(out, "{}", cols.join(","))?;
        for p in &self.points {
            let vals: Vec<String> = p.iter().map(|v| format!("{:.16e}", v.f64())).collect();
            writeln!(out, "{}", vals.join(","))?;
        }
        Ok(())
    }
}

fn candidates(k: usize, eps: f64) -> Vec<Vec<f64>> {
    match k {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let count = ((200.0 / eps).ceil() as usize).clamp(720, 100_000);
            (0..count)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / count as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
        _ => {
            let count = ((30.0 / eps).powi(2).ceil() as usize).clamp(2000, 200_000);
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - (2 * i + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Greedy farthest-point selection until every candidate lies within `radius`.
fn farthest_point(cands: &[Vec<f64>], radius: f64) -> Vec<usize> {
    let mut chosen = vec![0usize];
    let mut nearest: Vec<f64> = cands.iter().map(|c| dist(c, &cands[0])).collect();
    loop {
        let (idx, far) = nearest
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc },
            );
        if far <= radius {
            return chosen;
        }
        chosen.push(idx);
        let p = &cands[idx];
        nearest
            .par_iter_mut()
            .zip(cands.par_iter())
            .for_each(|(d, c)| *d = d.min(dist(c, p)));
    }
}

fn probe_radius(points: &[Vec<f64>], k: usize, probes: usize, seed: u64) -> f64 {
    let probe_set: Vec<Vec<f64>> = if k == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        random_unit_vectors(k, probes, seed)
    };
    probe_set
        .par_iter()
        .map(|q| {
            points
                .iter()
                .map(|p| dist(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// ε-net of the unit sphere of `ℝᵏ`, `k ≤ 3`, with a probe-certified radius.
pub fn build_sphere_net<T: Real>(k: usize, eps: f64) -> Result<SphereNet<T>> {
    build_sphere_net_with(k, eps, DEFAULT_PROBES, PROBE_SEED)
}

pub fn build_sphere_net_with<T: Real>(
    k: usize,
    eps: f64,
    probes: usize,
    seed: u64,
) -> Result<SphereNet<T>> {
    if k == 0 || k > 3 {
        return Err(Error::Refused(format!(
            "sphere nets are built for 1 ≤ k ≤ 3, got k = {k}"
        )));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("need ε > 0, got {eps}")));
    }
    if probes == 0 {
        return Err(Error::Parameter("need at least one probe".into()));
    }
    let cands = candidates(k, eps.min(2.0));
    let mut points: Vec<Vec<f64>>;
    let mut radius;
    if eps >= 2.0 {
        points = vec![cands[0].clone()];
        radius = probe_radius(&points, k, probes, seed);
    } else {
        let mut target = SHRINK * eps;
        let mut attempt = 0;
        loop {
            points = farthest_point(&cands, target)
                .into_iter()
                .map(|i| cands[i].clone())
                .collect();
            radius = probe_radius(&points, k, probes, seed);
            attempt += 1;
            if radius <= eps || attempt >= MAX_REFINEMENTS {
                break;
            }
            target *= 0.9;
        }
        if radius > eps {
            return Err(Error::Construction(format!(
                "probe radius {radius} exceeds ε = {eps} after {MAX_REFINEMENTS} refinements"
            )));
        }
        let bound = (3.0 / eps).powi(k as i32);
        if eps < 1.0 && points.len() as f64 > bound {
            return Err(Error::Construction(format!(
                "net of {} points exceeds (3/ε)^k = {bound}",
                points.len()
            )));
        }
    }
    Ok(SphereNet {
        k,
        eps,
        points: points
            .into_iter()
            .map(|p| p.into_iter().map(T::of).collect())
            .collect(),
        certified_radius: radius,
        probes: if k == 1 { 2 } else { probes },
    })
}

/// One element of `D_ε` (or of its triple extension).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetTuple<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub z: Option<Vec<T>>,
    /// Coordinates in `I`, the support of `x`.
    pub split: Vec<bool>,
    /// `I = ∅` or `I = [n]`: one side lives on an empty sphere.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductNet<T> {
    pub n: usize,
    pub eps: f64,
    /// Smallest probe-certified radius among the sphere nets used.
    pub certified_radius: f64,
    pub tuples: Vec<NetTuple<T>>,
}

impl<T: Real> ProductNet<T> {
    pub fn proper(&self) -> impl Iterator<Item = &NetTuple<T>> {
        self.tuples.iter().filter(|t| !t.degenerate)
    }

    /// `6ⁿε⁻ⁿ`, or `18ⁿε⁻²ⁿ` with the third factor.
    pub fn cardinality_bound(&self, with_z: bool) -> f64 {
        let n = self.n as i32;
        if with_z {
            18f64.powi(n) * self.eps.powi(-2 * n)
        } else {
            6f64.powi(n) * self.eps.powi(-n)
        }
    }
}

fn embed<T: Real>(point: &[T], coords: &[usize], n: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    for (&c, &p) in coords.iter().zip(point) {
        v[c] = p;
    }
    v
}

/// `∪_{I ⊆ [n]} Z_{I,ε} × Z_{Iᶜ,ε}`, optionally times `Z_{[n],ε}`.
///
/// The splits `I = ∅` and `I = [n]` yield one-sided tuples (the other side
/// zero) tagged degenerate.
pub fn enumerate_product_net<T: Real>(n: usize, eps: f64, with_z: bool) -> Result<ProductNet<T>> {
    if n == 0 || n > 3 {
        return Err(Error::Refused(format!(
            "product nets are enumerated for 1 ≤ n ≤ 3, got n = {n}"
        )));
    }
    let nets: Vec<SphereNet<T>> = (1..=n)
        .map(|k| build_sphere_net(k, eps))
        .collect::<Result<_>>()?;
    let certified_radius = nets.iter().map(|s| s.certified_radius).fold(0.0, f64::max);
    let full: Vec<Vec<T>> = nets[n - 1].points.clone();
    let zs: Vec<Option<Vec<T>>> = if with_z {
        full.iter().cloned().map(Some).collect()
    } else {
        vec![None]
    };
    let sphere = |coords: &[usize]| -> Vec<Vec<T>> {
        if coords.is_empty() {
            Vec::new()
        } else {
            nets[coords.len() - 1]
                .points
                .iter()
                .map(|p| embed(p, coords, n))
                .collect()
        }
    };
    let mut tuples = Vec::new();
    for mask in 0u32..(1 << n) {
        let split: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let inside: Vec<usize> = (0..n).filter(|&i| split[i]).collect();
        let outside: Vec<usize> = (0..n).filter(|&i| !split[i]).collect();
        let (xs, ys) = (sphere(&inside), sphere(&outside));
        let degenerate = inside.is_empty() || outside.is_empty();
        let zero = vec![T::zero(); n];
        let pairs: Vec<(Vec<T>, Vec<T>)> = if inside.is_empty() {
            ys.into_iter().map(|y| (zero.clone(), y)).collect()
        } else if outside.is_empty() {
            xs.into_iter().map(|x| (x, zero.clone())).collect()
        } else {
            xs.iter()
                .flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone())))
                .collect()
        };
        for (x, y) in pairs {
            for z in &zs {
                tuples.push(NetTuple {
                    x: x.clone(),
                    y: y.clone(),
                    z: z.clone(),
                    split: split.clone(),
                    degenerate,
                });
            }
        }
    }
    Ok(ProductNet {
        n,
        eps,
        certified_radius,
        tuples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JSetReport {
    pub indices: Vec<usize>,
    pub cardinality: usize,
    pub m: usize,
    pub b: f64,
    pub s: Option<f64>,
    pub gamma: Option<f64>,
    pub n: Option<usize>,
    /// Rows with `|⟨x, vⱼ⟩| ≥ b‖x‖`.
    pub pass_x: usize,
    /// Rows with `|⟨y, vⱼ⟩| ≥ b‖y‖`.
    pub pass_y: usize,
    /// Rows meeting condition (i), both of the above.
    pub pass_both: usize,
    /// Rows with `|⟨z, vⱼ⟩| ≤ s‖z‖`.
    pub pass_z: Option<usize>,
    /// Rows with `‖vⱼ‖ ≤ 2γ⁻¹n^{1/2}`.
    pub pass_norm: Option<usize>,
}

impl JSetReport {
    pub fn fraction(&self) -> f64 {
        self.cardinality as f64 / self.m as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_disjoint<T: Real>(x: &[T], y: &[T]) -> Result<()> {
    if x.iter().all(|v| *v == T::zero()) || y.iter().all(|v| *v == T::zero()) {
        return Err(Error::Domain("J-sets need x ≠ 0 and y ≠ 0".into()));
    }
    if let Some(i) = x
        .iter()
        .zip(y)
        .position(|(a, b)| *a != T::zero() && *b != T::zero())
    {
        return Err(Error::Domain(format!(
            "x and y must have disjoint supports; both use coordinate {i}"
        )));
    }
    Ok(())
}

/// `J_{x,y}(b) = {j : |⟨x,vⱼ⟩| ≥ b‖x‖ and |⟨y,vⱼ⟩| ≥ b‖y‖}`.
pub fn count_jset<T: Real>(v: &SampleMatrix<T>, x: &[T], y: &[T], b: T) -> Result<JSetReport> {
    jset_impl(v, x, y, b, None)
}

/// `J^z_{x,y}(b, s)`: condition (i) of [`count_jset`] plus
/// `|⟨z,vⱼ⟩| ≤ s‖z‖` and `‖vⱼ‖ ≤ 2γ⁻¹n^{1/2}`. `s` may be infinite.
#[allow(clippy::too_many_arguments)]
pub fn count_jset_z<T: Real>(
    v: &SampleMatrix<T>,
    x: &[T],
    y: &[T],
    z: &[T],
    b: T,
    s: T,
    gamma: T,
    n: usize,
) -> Result<JSetReport> {
    check_dim(v.cols(), z.len())?;
    if z.iter().all(|c| *c == T::zero()) {
        return Err(Error::Domain("J-sets need z ≠ 0".into()));
    }
    if !(s > T::zero()) {
        return Err(Error::Domain(format!("need s > 0, got {s}")));
    }
    if !(gamma > T::zero() && gamma <= T::one()) {
        return Err(Error::Domain(format!("need 0 < γ ≤ 1, got {gamma}")));
    }
    jset_impl(v, x, y, b, Some((z, s, gamma, n)))
}

fn jset_impl<T: Real>(
    v: &SampleMatrix<T>,
    x: &[T],
    y: &[T],
    b: T,
    extra: Option<(&[T], T, T, usize)>,
) -> Result<JSetReport> {
    check_dim(v.cols(), x.len())?;
    check_dim(v.cols(), y.len())?;
    check_disjoint(x, y)?;
    if !(b >= T::zero()) {
        return Err(Error::Domain(format!("need b ≥ 0, got {b}")));
    }
    let (tx, ty) = (b * norm2(x), b * norm2(y));
    let extra = extra.map(|(z, s, gamma, n)| {
        let zt = s * norm2(z);
        let cap = T::of(2.0) * T::of_usize(n).sqrt() / gamma;
        (z, zt, cap, s, gamma, n)
    });
    let mut rep = JSetReport {
        indices: Vec::new(),
        cardinality: 0,
        m: v.rows(),
        b: b.f64(),
        s: extra.map(|e| e.3.f64()),
        gamma: extra.map(|e| e.4.f64()),
        n: extra.map(|e| e.5),
        pass_x: 0,
        pass_y: 0,
        pass_both: 0,
        pass_z: extra.map(|_| 0),
        pass_norm: extra.map(|_| 0),
    };
    for (j, row) in v.iter_rows().enumerate() {
        let px = dot(row, x).abs() >= tx;
        let py = dot(row, y).abs() >= ty;
        rep.pass_x += px as usize;
        rep.pass_y += py as usize;
        rep.pass_both += (px && py) as usize;
        let mut keep = px && py;
        if let Some((z, zt, cap, ..)) = extra {
            let pz = dot(row, z).abs() <= zt;
            let pn = norm2(row) <= cap;
            *rep.pass_z.as_mut().expect("set") += pz as usize;
            *rep.pass_norm.as_mut().expect("set") += pn as usize;
            keep = keep && pz && pn;
        }
        if keep {
            rep.indices.push(j);
        }
    }
    rep.cardinality = rep.indices.len();
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferStatus {
    HypothesisNotMet,
    Verified,
    Falsified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetTransferReport {
    pub status: TransferStatus,
    /// Upper frame bound of `(m^{-1/2} vⱼ)`.
    pub upper_frame_bound: f64,
    pub frame_ok: bool,
    pub eps: f64,
    pub eps_ok: bool,
    /// Smallest `|J_{x,y}(a)|` over the proper net tuples.
    pub net_min_count: usize,
    pub net_threshold: f64,
    pub net_ok: bool,
    pub trials: usize,
    /// Smallest `|J_{x,y}(a/2)|` over the random trials.
    pub min_count: usize,
    pub threshold: f64,
    pub violations: usize,
    /// First violating pair, if any.
    pub certificate: Option<(Vec<f64>, Vec<f64>, usize)>,
}

/// Checks that `|J_{x,y}(a/2)| ≥ γ²m/4` for random disjoint pairs whenever
/// the frame, radius and net hypotheses hold. Hypothesis failures are
/// reported in the status, not raised.
pub fn verify_net_transfer<T: Real>(
    v: &SampleMatrix<T>,
    net: &ProductNet<T>,
    a: T,
    gamma: T,
    trials: usize,
    seed: u64,
) -> Result<NetTransferReport> {
    let (m, n) = (v.rows(), v.cols());
    check_dim(n, net.n)?;
    if n < 2 {
        return Err(Error::Domain("disjoint pairs need n ≥ 2".into()));
    }
    if !(a > T::zero() && gamma > T::zero()) {
        return Err(Error::Domain(format!(
            "need a, γ > 0, got a = {a}, γ = {gamma}"
        )));
    }
    let scale = T::one() / T::of_usize(m).sqrt();
    let upper = Frame::from_samples(v, scale).frame_bounds()?.upper.f64();
    let frame_ok = upper <= 2.0;
    let eps_ok = net.eps.max(net.certified_radius) <= gamma.f64() * a.f64() / 8.0;
    let net_threshold = gamma.f64().powi(2) * m as f64 / 2.0;
    let net_min_count = net
        .proper()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|t| count_jset(v, &t.x, &t.y, a).map(|r| r.cardinality))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .unwrap_or(0);
    let net_ok = net_min_count as f64 >= net_threshold;
    let threshold = gamma.f64().powi(2) * m as f64 / 4.0;
    let half = a / T::of(2.0);

    let counts: Vec<(usize, Vec<T>, Vec<T>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = tagged_rng(seed, tag::TRIALS, i as u64);
            let mut split: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            if split.iter().all(|&s| s) || split.iter().all(|&s| !s) {
                let k = rng.random_range(0..n);
                split[k] = !split[k];
            }
            let draw =
                |rng: &mut rand_chacha::ChaCha8Rng| T::of(rng.sample::<f64, _>(StandardNormal));
            let (mut x, mut y) = (vec![T::zero(); n], vec![T::zero(); n]);
            for (k, &s) in split.iter().enumerate() {
                let c = draw(&mut rng);
                if s {
                    x[k] = c;
                } else {
                    y[k] = c;
                }
            }
            let c = count_jset(v, &x, &y, half)
                .map(|r| r.cardinality)
                .unwrap_or(0);
            (c, x, y)
        })
        .collect();
    let violations = counts
        .iter()
        .filter(|(c, ..)| (*c as f64) < threshold)
        .count();
    let certificate = counts
        .iter()
        .find(|(c, ..)| (*c as f64) < threshold)
        .map(|(c, x, y)| {
            (
                x.iter().map(|t| t.f64()).collect(),
                y.iter().map(|t| t.f64()).collect(),
                *c,
            )
        });
    let hypotheses = frame_ok && eps_ok && net_ok;
    let status = if !hypotheses {
        TransferStatus::HypothesisNotMet
    } else if violations > 0 {
        TransferStatus::Falsified
    } else {
        TransferStatus::Verified
    };
    Ok(NetTransferReport {
        status,
        upper_frame_bound: upper,
        frame_ok,
        eps: net.eps,
        eps_ok,
        net_min_count,
        net_threshold,
        net_ok,
        trials,
        min_count: counts.iter().map(|(c, ..)| *c).min().unwrap_or(0),
        threshold,
        violations,
        certificate,
    })
}
