//! Pass/fail thresholds shared by the scenarios and the acceptance suite.

/// Relative tolerance for `b = h + δ`.
pub const SIGN_ALIGN_REL: f64 = 1e-12;
/// Relative tolerance for the sign-alignment inequalities and the min identity.
pub const PAIRWISE_ALGEBRA_REL: f64 = 1e-10;

/// 1-d oracle: ratio 1 within this multiple of `M^{-1/2}`.
pub const ONE_D_SQRT_M_FACTOR: f64 = 2.0;
/// 2-d oracle: search within this fraction of the brute-force maximum.
pub const TWO_D_AGREEMENT: f64 = 0.05;
pub const TWO_D_RESOLUTION_DEG: f64 = 1.0;

/// Instability demo: ratio `1/ε` to this relative tolerance.
pub const INSTABILITY_REL: f64 = 1e-9;

/// PR failure: distance `√2` within this multiple of `M^{-1/2}`.
pub const PR_DISTANCE_SQRT_M_FACTOR: f64 = 5.0;
/// Gaussian frames that must do phase retrieval.
pub const PR_GENERIC_DIM: usize = 3;
pub const PR_GENERIC_VECTORS: usize = 6;
pub const PR_GENERIC_SEEDS: u64 = 10;

/// `2(1 − Φ(1))`.
pub const GAUSSIAN_SMALL_BALL_AT_ONE: f64 = 0.31731;
/// `(2(1 − Φ(1)))²`, rounded as quoted.
pub const GAUSSIAN_JSET_AT_ONE: f64 = 0.10065;
pub const SMALL_BALL_SIGMAS: f64 = 3.0;

/// Frame-bound window for the random block and the required passes.
pub const FRAME_LOWER: f64 = 0.5;
pub const FRAME_UPPER: f64 = 2.0;
pub const FRAME_MIN_PASS_FRACTION: f64 = 0.95;

/// J-set tail frequencies may exceed the bound by this many binomial standard errors.
pub const JSET_TAIL_SIGMAS: f64 = 3.0;

/// Small-ball calibration `(â, γ̂) = (1, 0.3173·(1 − 10·M^{-1/2}))` and
/// the stability ceiling `6/(âγ̂)`.
pub const CEILING_A: f64 = 1.0;
pub const CEILING_GAMMA: f64 = 0.3173;
pub const CEILING_SQRT_M_FACTOR: f64 = 10.0;
pub const CEILING_NUMERATOR: f64 = 6.0;
/// Largest allowed ratio growth from the smallest to the largest dimension.
pub const DIMENSION_GROWTH: f64 = 2.0;

/// Closed-form spot values, relative.
pub const FORMULA_REL: f64 = 1e-12;

/// Peaky construction defaults.
pub const PEAKY_EPS: f64 = 0.1;

pub fn ceiling_gamma(points: usize) -> f64 {
    CEILING_GAMMA * (1.0 - CEILING_SQRT_M_FACTOR / (points as f64).sqrt())
}

/// `6/(âγ̂)` at the calibration size `points`.
pub fn stability_ceiling(points: usize) -> f64 {
    CEILING_NUMERATOR / (CEILING_A * ceiling_gamma(points))
}

/// Relative closeness `|x − y| ≤ rel·max(|x|, |y|)`.
pub fn rel_close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceiling_at_reference_size() {
        let c = stability_ceiling(100_000);
        assert!((c - 6.0 / (0.3173 * (1.0 - 10.0 / 316.227_766_016_837_9))).abs() < 1e-9);
        assert!(c > 19.5 && c < 19.6);
    }
}
