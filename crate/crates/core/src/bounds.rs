//! Closed-form constants, tail bounds and sample complexities.

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// The Khintchine constant `A₁` and the universal concentration constant `C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub a1: f64,
    pub c: f64,
    /// `C` is a placeholder rather than a known value.
    pub illustrative: bool,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            a1: std::f64::consts::FRAC_1_SQRT_2,
            c: 1.0,
            illustrative: true,
        }
    }
}

impl BoundsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a1 > 0.0 && self.a1 <= 1.0) {
            return Err(Error::Parameter(format!(
                "A1 must lie in (0, 1], got {}",
                self.a1
            )));
        }
        if !(self.c >= 1.0 || self.illustrative && self.c > 0.0) {
            return Err(Error::Parameter(format!(
                "C must be ≥ 1 unless flagged illustrative, got {}",
                self.c
            )));
        }
        Ok(())
    }
}

fn domain(msg: String) -> Error {
    Error::Domain(msg)
}

/// `γ = B^{2p/(2−p)}·(1 − a²)^{p/(p−2)}` for an upper `L_p` bound, `p > 2`.
pub fn gamma_upper_lp<T: Real>(b: T, p: T, a: T) -> Result<T> {
    let two = T::of(2.0);
    if !(p > two) {
        return Err(domain(format!("need p > 2, got {p}")));
    }
    if !(b >= T::one()) {
        return Err(domain(format!("need B ≥ 1, got {b}")));
    }
    if !(a > T::zero() && a < T::one()) {
        return Err(domain(format!("need 0 < a < 1, got {a}")));
    }
    Ok(b.powf(two * p / (two - p)) * (T::one() - a * a).powf(p / (p - two)))
}

/// `γ = (Aᵖ − aᵖ)^{2/(2−p)}` for a lower `L_p` bound, `1 ≤ p < 2`, `0 < a < A ≤ 1`.
pub fn gamma_lower_lp<T: Real>(big_a: T, p: T, a: T) -> Result<T> {
    let two = T::of(2.0);
    if !(p >= T::one() && p < two) {
        return Err(domain(format!("need 1 ≤ p < 2, got {p}")));
    }
    if !(big_a > T::zero() && big_a <= T::one()) {
        return Err(domain(format!("need 0 < A ≤ 1, got {big_a}")));
    }
    if !(a > T::zero() && a < big_a) {
        return Err(domain(format!("need 0 < a < A, got a = {a}, A = {big_a}")));
    }
    Ok((big_a.powf(p) - a.powf(p)).powf(two / (two - p)))
}

/// The L₁/L₂ ratio a `K`-sub-Gaussian, variance-one variable is guaranteed,
/// `K^{1−2/λ}·p^{1/2−1/λ}` with `λ = (p−2)/(p−1)`.
pub fn subgaussian_l1_floor<T: Real>(k: T, p: T) -> Result<T> {
    let two = T::of(2.0);
    if !(p > two) {
        return Err(domain(format!("need p > 2, got {p}")));
    }
    if !(k >= T::of(0.5).sqrt() * (T::one() - T::epsilon())) {
        return Err(domain(format!("need K ≥ 2^(-1/2), got {k}")));
    }
    let lambda = (p - two) / (p - T::one());
    Ok(k.powf(T::one() - two / lambda) * p.powf(T::of(0.5) - T::one() / lambda))
}

/// `(a, γ)` with `a = ¼·A₁·K^{1−2/λ}·p^{1/2−1/λ}` and `γ = a²`.
pub fn subgaussian_small_ball<T: Real>(k: T, cfg: &BoundsConfig, p: T) -> Result<(T, T)> {
    cfg.validate()?;
    let a = T::of(0.25 * cfg.a1) * subgaussian_l1_floor(k, p)?;
    Ok((a, a * a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConcentrationForm {
    /// Constant `C`.
    Direct,
    /// Constant `C³`, from applying the direct form with the vector constant `CK`.
    Composed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationInterval<T> {
    pub lower: T,
    pub upper: T,
    /// `1 − 2e^{−s²}`.
    pub probability: T,
}

/// `((√m − cK²(√n+s))₊², (√m + cK²(√n+s))²)` with `c = C` or `C³`.
pub fn frame_concentration_interval<T: Real>(
    m: T,
    n: T,
    s: T,
    k: T,
    cfg: &BoundsConfig,
    form: ConcentrationForm,
) -> Result<ConcentrationInterval<T>> {
    cfg.validate()?;
    if !(s > T::zero()) {
        return Err(domain(format!("need s > 0, got {s}")));
    }
    let c = match form {
        ConcentrationForm::Direct => T::of(cfg.c),
        ConcentrationForm::Composed => T::of(cfg.c.powi(3)),
    };
    let spread = c * k * k * (n.sqrt() + s);
    let root = m.sqrt();
    let lo = (root - spread).max(T::zero());
    Ok(ConcentrationInterval {
        lower: lo * lo,
        upper: (root + spread) * (root + spread),
        probability: T::one() - T::of(2.0) * (-s * s).exp(),
    })
}

/// The choice `m = 64C⁶K⁴n`, `s = √m/(4C³K²) − √n` under which the
/// composed-form interval becomes `((9/16)m, (25/16)m)`.
pub fn balanced_substitution<T: Real>(n: T, k: T, cfg: &BoundsConfig) -> (T, T) {
    let c3 = T::of(cfg.c.powi(3));
    let m = T::of(64.0) * c3 * c3 * k.powi(4) * n;
    let s = m.sqrt() / (T::of(4.0) * c3 * k * k) - n.sqrt();
    (m, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JSetVariant {
    /// Exponent `γ⁴m/2`.
    SubGaussian,
    /// Exponent `γ⁴m/8`.
    General,
}

impl JSetVariant {
    fn divisor(self) -> f64 {
        match self {
            JSetVariant::SubGaussian => 2.0,
            JSetVariant::General => 8.0,
        }
    }
}

/// Hoeffding bound on `Prob(|J| ≤ γ²m/2)`: `exp(−γ⁴m/2)` or `exp(−γ⁴m/8)`.
pub fn hoeffding_jset_tail<T: Real>(gamma: T, m: T, variant: JSetVariant) -> Result<T> {
    if !(gamma > T::zero() && gamma <= T::one()) {
        return Err(domain(format!("need 0 < γ ≤ 1, got {gamma}")));
    }
    if !(m >= T::zero()) {
        return Err(domain(format!("need m ≥ 0, got {m}")));
    }
    Ok((-gamma.powi(4) * m / T::of(variant.divisor())).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NetParams<T> {
    /// Net radius `ε ∈ (0, 1)` with `(6/ε)ⁿ` pairs.
    SubGaussian { eps: T },
    /// Radius fixed at `ε = aγn^{−1/2}/4` with `18ⁿε^{−2n}` triples.
    General { a: T },
}

/// Union bound over a net: `exp(log(6/ε)·n − γ⁴m/2)` or
/// `exp(log(288a⁻²γ⁻²n)·n − γ⁴m/8)`, capped at 1.
pub fn net_union_failure<T: Real>(n: usize, m: T, gamma: T, params: NetParams<T>) -> Result<T> {
    Ok(net_union_exponent(n, m, gamma, params)?
        .min(T::zero())
        .exp())
}

/// The exponent of [`net_union_failure`] before capping.
pub fn net_union_exponent<T: Real>(n: usize, m: T, gamma: T, params: NetParams<T>) -> Result<T> {
    if n == 0 {
        return Err(domain("need n ≥ 1".into()));
    }
    if !(gamma > T::zero() && gamma <= T::one()) {
        return Err(domain(format!("need 0 < γ ≤ 1, got {gamma}")));
    }
    let nn = T::of_usize(n);
    let g4 = gamma.powi(4);
    match params {
        NetParams::SubGaussian { eps } => {
            if !(eps > T::zero() && eps < T::one()) {
                return Err(domain(format!("need 0 < ε < 1, got {eps}")));
            }
            Ok((T::of(6.0) / eps).ln() * nn - g4 * m / T::of(2.0))
        }
        NetParams::General { a } => {
            if !(a > T::zero()) {
                return Err(domain(format!("need a > 0, got {a}")));
            }
            let eps = general_net_radius(n, a, gamma);
            Ok((T::of(18.0) / (eps * eps)).ln() * nn - g4 * m / T::of(8.0))
        }
    }
}

/// `ε = aγn^{−1/2}/4`.
pub fn general_net_radius<T: Real>(n: usize, a: T, gamma: T) -> T {
    a * gamma / (T::of(4.0) * T::of_usize(n).sqrt())
}

/// `√(1 + (1+√2)²)`, the factor relating disjoint-pair bounds to the frame constant.
pub fn disjoint_factor<T: Real>() -> T {
    let r = T::one() + T::of(2.0).sqrt();
    (T::one() + r * r).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StabilityVariant<T> {
    /// `6/(aγ)` for the augmented subspace.
    SmallBall { a: T, gamma: T },
    /// `c₃K⁶` with `c₃ = √(1+(1+√2)²)·2¹¹`.
    SubGaussian { k: T },
    /// `12/(aγ) + 1` for a random frame with the identity block.
    RandomFrame { a: T, gamma: T },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstant<T> {
    pub value: T,
    /// `aγ > 1`, which no genuine small-ball pair can satisfy.
    pub warning: bool,
}

pub fn stability_constant<T: Real>(variant: StabilityVariant<T>) -> Result<StabilityConstant<T>> {
    let check = |a: T, g: T| -> Result<bool> {
        if !(a > T::zero() && g > T::zero()) {
            return Err(domain(format!("need a, γ > 0, got a = {a}, γ = {g}")));
        }
        Ok(a * g > T::one())
    };
    Ok(match variant {
        StabilityVariant::SmallBall { a, gamma } => StabilityConstant {
            warning: check(a, gamma)?,
            value: T::of(6.0) / (a * gamma),
        },
        StabilityVariant::RandomFrame { a, gamma } => StabilityConstant {
            warning: check(a, gamma)?,
            value: T::of(12.0) / (a * gamma) + T::one(),
        },
        StabilityVariant::SubGaussian { k } => {
            if !(k > T::zero()) {
                return Err(domain(format!("need K > 0, got {k}")));
            }
            StabilityConstant {
                value: disjoint_factor::<T>() * T::of(2048.0) * k.powi(6),
                warning: false,
            }
        }
    })
}

/// The two `(a, γ)` conventions for the sub-Gaussian frame constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgaussianConventions<T> {
    /// `a = K⁻²/8`, `γ = K⁻⁴/64`.
    pub direct: (T, T),
    /// `a = A₁K⁻²/16`, `γ = a²`.
    pub small_ball: (T, T),
    /// `√(1+(1+√2)²)·4/(aγ)` for each convention.
    pub constant_direct: T,
    pub constant_small_ball: T,
}

pub fn subgaussian_conventions<T: Real>(
    k: T,
    cfg: &BoundsConfig,
) -> Result<SubgaussianConventions<T>> {
    let direct = (
        T::one() / (T::of(8.0) * k * k),
        T::one() / (T::of(64.0) * k.powi(4)),
    );
    let small_ball = subgaussian_small_ball(k, cfg, T::of(4.0))?;
    let c = |(a, g): (T, T)| disjoint_factor::<T>() * T::of(4.0) / (a * g);
    Ok(SubgaussianConventions {
        constant_direct: c(direct),
        constant_small_ball: c(small_ball),
        direct,
        small_ball,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SampleComplexity<T> {
    /// `⌈64C⁶K⁴n⌉`.
    Concentration { k: T },
    /// `⌈c₁K¹⁶log(2K)n⌉` for a caller-supplied `c₁`.
    SubGaussian { k: T, c1: T },
    /// `⌈n·log(288a⁻²γ⁻²n)/(γ⁴/8 − k₂)⌉` for a caller-chosen rate `k₂ < γ⁴/8`.
    SmallBall { a: T, gamma: T, k2: T },
}

pub fn sample_complexity<T: Real>(
    variant: SampleComplexity<T>,
    n: usize,
    cfg: &BoundsConfig,
) -> Result<u64> {
    cfg.validate()?;
    if n == 0 {
        return Err(domain("need n ≥ 1".into()));
    }
    let nn = T::of_usize(n);
    let raw = match variant {
        SampleComplexity::Concentration { k } => T::of(64.0 * cfg.c.powi(6)) * k.powi(4) * nn,
        SampleComplexity::SubGaussian { k, c1 } => {
            if !(k >= T::of(0.5).sqrt() * (T::one() - T::epsilon())) || !(c1 > T::zero()) {
                return Err(domain(format!(
                    "need K ≥ 2^(-1/2) and c1 > 0, got K = {k}, c1 = {c1}"
                )));
            }
            c1 * k.powi(16) * (T::of(2.0) * k).ln() * nn
        }
        SampleComplexity::SmallBall { a, gamma, k2 } => {
            if n < 2 {
                return Err(domain("the n·log n form needs n ≥ 2".into()));
            }
            if !(a > T::zero() && gamma > T::zero() && gamma <= T::one()) {
                return Err(domain(format!(
                    "need a > 0, 0 < γ ≤ 1, got a = {a}, γ = {gamma}"
                )));
            }
            let rate = gamma.powi(4) / T::of(8.0) - k2;
            if !(rate > T::zero()) || !(k2 >= T::zero()) {
                return Err(Error::Parameter(format!(
                    "infeasible: need 0 ≤ k2 < γ⁴/8, got k2 = {k2}"
                )));
            }
            nn * (T::of(288.0) * nn / (a * a * gamma * gamma)).ln() / rate
        }
    };
    let m = raw.f64();
    if !m.is_finite() || m > u64::MAX as f64 {
        return Err(domain(format!("sample complexity overflows: {m}")));
    }
    // Absorb representation error so exact integers are not rounded up.
    let nearest = m.round();
    Ok(if (m - nearest).abs() <= 1e-9 * m.max(1.0) {
        nearest as u64
    } else {
        m.ceil() as u64
    })
}
