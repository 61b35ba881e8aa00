//! Sign alignment, lemma checks and the stability ratio
//! `min(‖f − g‖, ‖f + g‖) / ‖ |f| − |g| ‖`.

mod exact;
mod search;

pub use exact::{check_phase_retrieval_exact, PhaseRetrievalCheck};
pub use search::{
    adversarial_search, brute_force_stability, BruteForceReport, PairWitness, StabilityReport,
    Strategy, StrategyStats,
};

use serde::{Deserialize, Serialize};

use crate::error::check_dim;
use crate::frames::Frame;
use crate::linalg::{abs_gap, dot, min_sign_distance, norm2};
use crate::subspace::{PairStats, SubspaceModel, TailWeight, MC_SIGMAS};
use crate::{Error, Real, Result};

/// Default relative gap tolerance: pairs with gap `≤ 1e-9·‖f‖` are degenerate.
pub const DEFAULT_GAP_TOL: f64 = 1e-9;

/// Relative tolerance used for identities that are exact up to rounding.
pub const FLOAT_TOL: f64 = 1e-10;

/// Anything whose pairs can be compared through magnitudes only.
pub trait PhaseMeasurement<T: Real>: Sync {
    fn dim(&self) -> usize;

    /// Gap, both sign distances and `‖f‖` in one pass. Dimensions are not checked.
    fn pair_stats(&self, f: &[T], g: &[T]) -> PairStats<T>;
}

impl<T: Real> PhaseMeasurement<T> for SubspaceModel<T> {
    fn dim(&self) -> usize {
        SubspaceModel::dim(self)
    }

    fn pair_stats(&self, f: &[T], g: &[T]) -> PairStats<T> {
        SubspaceModel::pair_stats(self, f, g)
    }
}

/// Magnitudes are `|Tf|`; distances are measured in plain `ℓ₂ⁿ`.
impl<T: Real> PhaseMeasurement<T> for Frame<T> {
    fn dim(&self) -> usize {
        Frame::dim(self)
    }

    fn pair_stats(&self, f: &[T], g: &[T]) -> PairStats<T> {
        let mut gap = T::zero();
        for r in self.iter_rows() {
            let d = dot(r, f).abs() - dot(r, g).abs();
            gap = gap + d * d;
        }
        let (mut minus, mut plus) = (T::zero(), T::zero());
        for (&a, &b) in f.iter().zip(g) {
            minus = minus + (a - b) * (a - b);
            plus = plus + (a + b) * (a + b);
        }
        PairStats {
            gap: gap.sqrt(),
            dist_minus: minus.sqrt(),
            dist_plus: plus.sqrt(),
            norm_f: norm2(f),
        }
    }
}

/// Default absolute gap tolerance for a pair whose first element has norm `norm_f`.
pub fn default_gap_tol<T: Real>(norm_f: T) -> T {
    T::of(DEFAULT_GAP_TOL).max(T::epsilon() * T::of(100.0)) * norm_f
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Ratio<T> {
    Finite(T),
    /// Gap at or below tolerance. With `min_dist > 0` this is a
    /// phase-retrieval failure rather than an infinite ratio.
    Degenerate {
        gap: T,
        min_dist: T,
    },
}

impl<T: Real> Ratio<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Ratio::Finite(r) => Some(r),
            Ratio::Degenerate { .. } => None,
        }
    }

    fn from_stats(stats: &PairStats<T>, gap_tol: T) -> Self {
        if stats.gap > gap_tol {
            Ratio::Finite(stats.min_dist() / stats.gap)
        } else {
            Ratio::Degenerate {
                gap: stats.gap,
                min_dist: stats.min_dist(),
            }
        }
    }
}

/// `min_sign_distance / abs_gap`, or [`Ratio::Degenerate`] when the gap is
/// at most `gap_tol` (default `1e-9·‖f‖`).
pub fn stability_ratio<T: Real, P: PhaseMeasurement<T> + ?Sized>(
    meas: &P,
    f: &[T],
    g: &[T],
    gap_tol: Option<T>,
) -> Result<Ratio<T>> {
    check_dim(meas.dim(), f.len())?;
    check_dim(meas.dim(), g.len())?;
    let stats = meas.pair_stats(f, g);
    let tol = match gap_tol {
        Some(t) if t > T::zero() => t,
        Some(t) => {
            return Err(Error::Parameter(format!(
                "gap_tol must be positive, got {t}"
            )))
        }
        None => default_gap_tol(stats.norm_f),
    };
    Ok(Ratio::from_stats(&stats, tol))
}

/// `εⱼ = sign(aⱼbⱼ)` (`+1` when the product is zero), `δ = b − εa`, `h = εa`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignAlignment<T> {
    pub eps: Vec<T>,
    pub delta: Vec<T>,
    pub h: Vec<T>,
    /// Indices with `εⱼ = +1`.
    pub positive: Vec<usize>,
}

impl<T: Real> SignAlignment<T> {
    /// Coefficients of `x` (on `J`) and `y` (off `J`), so `a = x + y` and `h = x − y`.
    pub fn split(&self, a: &[T]) -> (Vec<T>, Vec<T>) {
        let mut x = vec![T::zero(); a.len()];
        let mut y = a.to_vec();
        for &j in &self.positive {
            x[j] = a[j];
            y[j] = T::zero();
        }
        (x, y)
    }

    pub fn delta_norm(&self) -> T {
        norm2(&self.delta)
    }
}

pub fn sign_align<T: Real>(a: &[T], b: &[T]) -> Result<SignAlignment<T>> {
    check_dim(a.len(), b.len())?;
    let mut out = SignAlignment {
        eps: Vec::new(),
        delta: Vec::new(),
        h: Vec::new(),
        positive: Vec::new(),
    };
    for (j, (&aj, &bj)) in a.iter().zip(b).enumerate() {
        let e = if aj * bj < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        if e > T::zero() {
            out.positive.push(j);
        }
        let h = e * aj;
        out.eps.push(e);
        out.h.push(h);
        out.delta.push(bj - h);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignsLemmaReport<T> {
    /// `‖ |f| − |g| ‖` on the whole model.
    pub gap: T,
    /// The same gap restricted to the sample points.
    pub gap_continuous: T,
    /// `(Σδⱼ²)^{1/2}`.
    pub delta_norm: T,
    /// `‖ |Σaⱼyⱼ| − |Σεⱼaⱼyⱼ| ‖`.
    pub sign_gap: T,
    /// `‖Σδⱼyⱼ‖` on the sample points; equals `delta_norm` only for an exactly orthonormal sample.
    pub delta_continuous: T,
    pub first_holds: bool,
    /// `sign_gap ≤ 2·gap` to relative tolerance.
    pub second_holds: bool,
    /// `sign_gap ≤ gap_continuous + delta_continuous`, the triangle step, which holds on any sample.
    pub triangle_holds: bool,
    pub holds: bool,
}

fn leq_rel<T: Real>(lhs: T, rhs: T, rel: T) -> bool {
    lhs <= rhs + rel * rhs.abs().max(lhs.abs()) + T::min_positive_value()
}

/// Both sign-alignment inequalities on the shared empirical measure.
pub fn check_signs_lemma<T: Real>(
    model: &SubspaceModel<T>,
    f: &[T],
    g: &[T],
) -> Result<SignsLemmaReport<T>> {
    if model.tail() != TailWeight::Augmented {
        return Err(Error::Refused(
            "the sign-alignment lemma needs the augmented model".into(),
        ));
    }
    check_dim(model.dim(), f.len())?;
    let al = sign_align(f, g)?;
    let gap = model.pair_stats(f, g).gap;
    let fv = model.continuous_values(f)?;
    let gv = model.continuous_values(g)?;
    let hv = model.continuous_values(&al.h)?;
    let dv = model.continuous_values(&al.delta)?;
    let mass = T::one() / T::of_usize(model.points());
    let mean_norm = |v: &[T], w: &[T]| (abs_gap(v, w).powi(2) * mass).sqrt();
    let gap_continuous = mean_norm(&fv, &gv);
    let sign_gap = mean_norm(&fv, &hv);
    let delta_continuous = (dot(&dv, &dv) * mass).sqrt();
    let delta_norm = al.delta_norm();
    let tol = T::of(FLOAT_TOL);
    let first_holds = leq_rel(delta_norm, gap, tol);
    let second_holds = leq_rel(sign_gap, T::of(2.0) * gap, tol);
    let triangle_holds = leq_rel(sign_gap, gap_continuous + delta_continuous, tol);
    Ok(SignsLemmaReport {
        gap,
        gap_continuous,
        delta_norm,
        sign_gap,
        delta_continuous,
        first_holds,
        second_holds,
        triangle_holds,
        holds: first_holds && second_holds && triangle_holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport<T> {
    /// `true` when `J` selected the smaller half and the roles were swapped.
    pub swapped: bool,
    pub norm_x: T,
    pub norm_y: T,
    /// `2âγ̂‖y‖`.
    pub lhs: T,
    /// `‖ |x+y| − |x−y| ‖`.
    pub rhs: T,
    /// `(∫(2 min(|x|,|y|))²)^{1/2}`, computed separately.
    pub min_form: T,
    pub identity_holds: bool,
    pub slack: T,
    pub holds: bool,
}

/// Checks `2âγ̂‖y‖ ≤ ‖ |x+y| − |x−y| ‖` for the `J / Jᶜ` split of `a`, with
/// the roles of `x`, `y` chosen so that `‖x‖ ≥ ‖y‖`. Only the continuous part
/// of the model enters.
pub fn check_lower_bound_lemma<T: Real>(
    model: &SubspaceModel<T>,
    subset: &[usize],
    a: &[T],
    a_hat: T,
    gamma_hat: T,
) -> Result<LowerBoundReport<T>> {
    check_dim(model.dim(), a.len())?;
    let mut xc = vec![T::zero(); a.len()];
    let mut yc = a.to_vec();
    for &j in subset {
        if j >= a.len() {
            return Err(Error::Domain(format!(
                "index {j} outside dimension {}",
                a.len()
            )));
        }
        xc[j] = a[j];
        yc[j] = T::zero();
    }
    let mut x = model.continuous_values(&xc)?;
    let mut y = model.continuous_values(&yc)?;
    let mass = T::one() / T::of_usize(model.points());
    let mut norm_x = (dot(&x, &x) * mass).sqrt();
    let mut norm_y = (dot(&y, &y) * mass).sqrt();
    let swapped = norm_x < norm_y;
    if swapped {
        std::mem::swap(&mut x, &mut y);
        std::mem::swap(&mut norm_x, &mut norm_y);
    }
    let two = T::of(2.0);
    let mut rhs_sq = T::zero();
    let mut min_sq = T::zero();
    let mut min_terms = Vec::with_capacity(x.len());
    for (&u, &v) in x.iter().zip(&y) {
        let d = (u + v).abs() - (u - v).abs();
        rhs_sq = rhs_sq + d * d;
        let m = two * u.abs().min(v.abs());
        min_sq = min_sq + m * m;
        min_terms.push(m * m);
    }
    let rhs = (rhs_sq * mass).sqrt();
    let min_form = (min_sq * mass).sqrt();
    let identity_holds = (rhs * rhs - min_form * min_form).abs()
        <= T::of(FLOAT_TOL) * (rhs * rhs).max(min_form * min_form) + T::min_positive_value();

    let mean = min_sq * mass;
    let count = min_terms.len();
    let var = if count > 1 {
        min_terms
            .iter()
            .map(|&t| (t - mean) * (t - mean))
            .sum::<T>()
            / T::of_usize(count - 1)
    } else {
        T::zero()
    };
    let se_sq = (var / T::of_usize(count)).sqrt();
    let slack = if rhs > T::zero() {
        T::of(MC_SIGMAS) * se_sq / (two * rhs)
    } else {
        (T::of(MC_SIGMAS) * se_sq).sqrt()
    };
    let lhs = two * a_hat * gamma_hat * norm_y;
    Ok(LowerBoundReport {
        swapped,
        norm_x,
        norm_y,
        lhs,
        rhs,
        min_form,
        identity_holds,
        slack,
        holds: identity_holds && lhs <= rhs + slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport<T> {
    /// `6‖ |f| − |g| ‖`.
    pub lhs: T,
    /// `âγ̂·‖f ∓ g‖`, the sign chosen by which half of the split is larger.
    pub rhs: T,
    pub slack: T,
    pub holds: bool,
}

/// The full chain `6‖ |f| − |g| ‖ ≥ âγ̂‖f ∓ g‖` on an augmented model.
pub fn check_stability_chain<T: Real>(
    model: &SubspaceModel<T>,
    f: &[T],
    g: &[T],
    a_hat: T,
    gamma_hat: T,
) -> Result<ChainReport<T>> {
    let signs = check_signs_lemma(model, f, g)?;
    let al = sign_align(f, g)?;
    let lower = check_lower_bound_lemma(model, &al.positive, f, a_hat, gamma_hat)?;
    let stats = model.pair_stats(f, g);
    let dist = if lower.swapped {
        stats.dist_plus
    } else {
        stats.dist_minus
    };
    let (x, y) = al.split(f);
    let y_coeff = if lower.swapped { norm2(&x) } else { norm2(&y) };
    let lhs = T::of(6.0) * stats.gap;
    let ag = a_hat * gamma_hat;
    let rhs = ag * dist;
    let two = T::of(2.0);
    let gram_excess = (signs.delta_continuous - signs.delta_norm).max(T::zero());
    let y_excess = (y_coeff - lower.norm_y).max(T::zero());
    let slack = two * gram_excess
        + two * lower.slack
        + ag * (two * y_excess + gram_excess)
        + T::of(FLOAT_TOL) * lhs.max(rhs);
    Ok(ChainReport {
        lhs,
        rhs,
        slack,
        holds: rhs <= lhs + slack,
    })
}

/// The disjointly supported pair from the ℓ₂ instability argument.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstabilityWitness<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub f: Vec<T>,
    pub g: Vec<T>,
    pub gap: T,
    pub min_dist: T,
    pub ratio: T,
    /// `x` and `y` are nearly parallel (`1 − ε² < 1e-2`).
    pub near_degenerate: bool,
}

/// `x = (√(1−ε²), ε, 0)`, `y = (0, ε, √(1−ε²))`, `f = x + y`, `g = x − y`;
/// the ratio is `1/ε`.
pub fn instability_witness<T: Real>(eps: T) -> Result<InstabilityWitness<T>> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::Domain(format!(
            "instability witness needs 0 < ε < 1, got {eps}"
        )));
    }
    let c = (T::one() - eps * eps).sqrt();
    let x = vec![c, eps, T::zero()];
    let y = vec![T::zero(), eps, c];
    let f: Vec<T> = x.iter().zip(&y).map(|(&a, &b)| a + b).collect();
    let g: Vec<T> = x.iter().zip(&y).map(|(&a, &b)| a - b).collect();
    let gap = abs_gap(&f, &g);
    let min_dist = min_sign_distance(&f, &g);
    Ok(InstabilityWitness {
        ratio: min_dist / gap,
        near_degenerate: T::one() - eps * eps < T::of(1e-2),
        x,
        y,
        f,
        g,
        gap,
        min_dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;

    #[test]
    fn sign_align_examples() {
        let s = sign_align(&[1.0, 2.0], &[1.0, -2.0]).unwrap();
        assert_eq!(
            (s.eps, s.delta, s.h),
            (vec![1.0, -1.0], vec![0.0, 0.0], vec![1.0, -2.0])
        );
        let s = sign_align(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!((s.eps, s.delta), (vec![1.0, 1.0], vec![-1.0, 1.0]));
        assert!(sign_align(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn split_recovers_a_and_h() {
        let a = [1.0, -2.0, 3.0];
        let s = sign_align(&a, &[-1.0, -1.0, 0.0]).unwrap();
        let (x, y) = s.split(&a);
        for j in 0..3 {
            assert_eq!(x[j] + y[j], a[j]);
            assert_eq!(x[j] - y[j], s.h[j]);
        }
    }

    #[test]
    fn instability_closed_form() {
        for &(e, r) in &[(0.1, 10.0), (0.01, 100.0), (0.001, 1000.0)] {
            let w = instability_witness::<f64>(e).unwrap();
            assert!((w.ratio - r).abs() <= 1e-9 * r);
        }
        assert!(instability_witness::<f64>(0.999).unwrap().near_degenerate);
        assert!(instability_witness::<f64>(0.0).is_err());
        assert!(instability_witness::<f64>(1.0).is_err());
    }

    #[test]
    fn ratio_degenerate_for_equal_pair() {
        let m = SubspaceModel::<f64>::sample(
            &DistributionSpec::gaussian(),
            200,
            3,
            1,
            TailWeight::Augmented,
        )
        .unwrap();
        let f = [0.3, -1.0, 2.0];
        assert!(matches!(
            stability_ratio(&m, &f, &f, None).unwrap(),
            Ratio::Degenerate { .. }
        ));
        assert!(stability_ratio(&m, &f, &f, Some(0.0)).is_err());
    }

    #[test]
    fn signs_lemma_trivial_cases() {
        let m = SubspaceModel::<f64>::sample(
            &DistributionSpec::gaussian(),
            300,
            4,
            2,
            TailWeight::Augmented,
        )
        .unwrap();
        let f = [1.0, 0.5, -0.25, 2.0];
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        for g in [f.to_vec(), neg] {
            let r = check_signs_lemma(&m, &f, &g).unwrap();
            assert!(r.holds);
            assert_eq!(r.delta_norm, 0.0);
        }
        let pure = SubspaceModel::new(m.samples().clone(), TailWeight::PureSpan);
        assert!(check_signs_lemma(&pure, &f, &f).is_err());
    }

    #[test]
    fn lower_bound_with_empty_y() {
        let m = SubspaceModel::<f64>::sample(
            &DistributionSpec::gaussian(),
            300,
            3,
            3,
            TailWeight::PureSpan,
        )
        .unwrap();
        let r = check_lower_bound_lemma(&m, &[0, 1, 2], &[1.0, 2.0, 3.0], 1.0, 0.3).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }
}
