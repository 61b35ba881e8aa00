use proptest::prelude::*;
use spr_core::bounds::{
    frame_concentration_interval, gamma_lower_lp, gamma_upper_lp, sample_complexity,
    subgaussian_small_ball, BoundsConfig, ConcentrationForm, SampleComplexity,
};
use spr_core::distributions::{estimate_small_ball, sample_matrix, SampleMatrix};
use spr_core::linalg::{abs_gap, dot, min_sign_distance, norm2};
use spr_core::nets::{build_sphere_net, count_jset, count_jset_z};
use spr_core::stability::{sign_align, stability_ratio, Ratio};
use spr_core::{DistributionSpec, Frame, SubspaceModel, TailWeight};
use std::sync::OnceLock;

const N: usize = 4;

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 6 => -3.0f64..3.0]
}

fn vec_n() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(coord(), N).prop_filter("nonzero", |v| norm2(v) > 1e-3)
}

fn samples() -> &'static SampleMatrix<f64> {
    static S: OnceLock<SampleMatrix<f64>> = OnceLock::new();
    S.get_or_init(|| sample_matrix(&DistributionSpec::gaussian(), 4000, N, 42).unwrap())
}

fn model(tail: TailWeight) -> SubspaceModel<f64> {
    SubspaceModel::new(samples().clone(), tail)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn ratios_match(a: Ratio<f64>, b: Ratio<f64>) -> bool {
    match (a, b) {
        (Ratio::Finite(x), Ratio::Finite(y)) => close(x, y),
        (Ratio::Degenerate { .. }, Ratio::Degenerate { .. }) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sign_alignment_decomposes(a in vec_n(), b in vec_n()) {
        let al = sign_align(&a, &b).unwrap();
        for j in 0..N {
            prop_assert!(al.eps[j] == 1.0 || al.eps[j] == -1.0);
            prop_assert_eq!(al.h[j], al.eps[j] * a[j]);
            prop_assert_eq!(al.delta[j].abs(), (a[j].abs() - b[j].abs()).abs());
            // h + δ re-rounds, so b is recovered to one rounding.
            prop_assert!((al.h[j] + al.delta[j] - b[j]).abs() <= f64::EPSILON * b[j].abs().max(al.h[j].abs()));
        }
    }

    #[test]
    fn ratio_is_symmetric_and_scale_free(f in vec_n(), g in vec_n(), c in 0.1f64..10.0) {
        let m = model(TailWeight::Augmented);
        let r = stability_ratio(&m, &f, &g, None).unwrap();
        let neg: Vec<f64> = g.iter().map(|x| -x).collect();
        let fs: Vec<f64> = f.iter().map(|x| c * x).collect();
        let gs: Vec<f64> = g.iter().map(|x| c * x).collect();
        prop_assert!(ratios_match(r, stability_ratio(&m, &g, &f, None).unwrap()));
        prop_assert!(ratios_match(r, stability_ratio(&m, &f, &neg, None).unwrap()));
        prop_assert!(ratios_match(r, stability_ratio(&m, &fs, &gs, None).unwrap()));
    }

    #[test]
    fn gap_is_dominated_by_sign_distance(f in vec_n(), g in vec_n()) {
        let m = model(TailWeight::Augmented);
        let gap = m.abs_gap(&f, &g).unwrap();
        prop_assert!(gap <= m.min_sign_distance(&f, &g).unwrap() * (1.0 + 1e-12));
        prop_assert!(close(gap, m.abs_gap(&g, &f).unwrap()));
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        prop_assert!(close(gap, m.abs_gap(&neg, &g).unwrap()));
        prop_assert!(abs_gap(&f, &g) <= min_sign_distance(&f, &g) * (1.0 + 1e-12));
    }

    #[test]
    fn lp_norms_increase_with_p(f in vec_n(), p in 1.0f64..6.0, dp in 0.0f64..3.0) {
        let m = model(TailWeight::PureSpan);
        prop_assert!(m.lp_norm(&f, p).unwrap() <= m.lp_norm(&f, p + dp).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn small_ball_decreases_in_threshold(x in vec_n(), a in 0.0f64..2.0, da in 0.0f64..1.0) {
        let v = samples();
        prop_assert!(estimate_small_ball(v, &x, a + da).unwrap() <= estimate_small_ball(v, &x, a).unwrap());
    }

    #[test]
    fn jsets_shrink_under_constraints(xs in vec_n(), ys in vec_n(), z in vec_n(), b in 0.0f64..1.5, db in 0.0f64..1.0, s in 0.1f64..3.0) {
        prop_assume!(xs[0] != 0.0 && ys[3] != 0.0);
        // J-sets are defined for disjointly supported x, y.
        let x = [xs[0], xs[1], 0.0, 0.0];
        let y = [0.0, 0.0, ys[2], ys[3]];
        let v = samples();
        let base = count_jset(v, &x, &y, b).unwrap();
        prop_assert!(count_jset(v, &x, &y, b + db).unwrap().cardinality <= base.cardinality);
        let zset = count_jset_z(v, &x, &y, &z, b, s, 0.5, N).unwrap();
        prop_assert!(zset.indices.iter().all(|j| base.indices.contains(j)));
    }

    #[test]
    fn frame_bounds_sandwich(x in vec_n(), rows in 4usize..40, seed in 0u64..1000) {
        let v = sample_matrix::<f64>(&DistributionSpec::gaussian(), rows, N, seed).unwrap();
        let frame = Frame::from_samples(&v, 1.0).union(&Frame::identity(N)).unwrap();
        let bounds = frame.frame_bounds().unwrap();
        let energy: f64 = frame.analysis(&x).unwrap().values.iter().map(|t| t * t).sum();
        let nx2 = dot(&x, &x);
        prop_assert!(bounds.lower * nx2 <= energy * (1.0 + 1e-9));
        prop_assert!(energy <= bounds.upper * nx2 * (1.0 + 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gamma_formulas_are_monotone(p in 2.05f64..8.0, b in 1.0f64..3.0, a in 0.05f64..0.9, t in 0.0f64..1.0) {
        let g = gamma_upper_lp(b, p, a).unwrap();
        prop_assert!(g > 0.0 && g <= 1.0);
        prop_assert!(gamma_upper_lp(b + t, p, a).unwrap() <= g * (1.0 + 1e-12));
        prop_assert!(gamma_upper_lp(b, p, a + t * (0.95 - a)).unwrap() <= g * (1.0 + 1e-12));
        let q = 1.0 + (p - 2.05) / 6.0;
        let big = a + 0.1 * (1.0 - a);
        let lo = gamma_lower_lp(big, q, a).unwrap();
        prop_assert!(gamma_lower_lp(big, q, a * (1.0 - 0.5 * t)).unwrap() >= lo * (1.0 - 1e-12));
        prop_assert!(gamma_lower_lp(big + t * (1.0 - big), q, a).unwrap() >= lo * (1.0 - 1e-12));
    }

    #[test]
    fn concentration_interval_is_ordered(m in 1.0f64..1e6, n in 1.0f64..1e3, s in 0.01f64..10.0, k in 0.71f64..5.0) {
        let cfg = BoundsConfig::default();
        for form in [ConcentrationForm::Direct, ConcentrationForm::Composed] {
            let iv = frame_concentration_interval(m, n, s, k, &cfg, form).unwrap();
            prop_assert!(0.0 <= iv.lower && iv.lower <= m && m <= iv.upper);
            prop_assert!(iv.probability <= 1.0);
        }
    }

    #[test]
    fn small_ball_from_subgaussian_matches_lower_lp(k in 0.71f64..4.0, p in 2.5f64..10.0) {
        let cfg = BoundsConfig::default();
        let (a, gamma) = subgaussian_small_ball(k, &cfg, p).unwrap();
        prop_assert!(close(gamma, a * a));
        // γ for A = 2a at p = 1 is (2a − a)² = a².
        prop_assert!(close(gamma_lower_lp(2.0 * a, 1.0, a).unwrap(), gamma));
    }

    #[test]
    fn sample_complexity_grows_with_dimension(n in 2usize..500, k in 0.71f64..3.0) {
        let cfg = BoundsConfig::default();
        for variant in [
            SampleComplexity::Concentration { k },
            SampleComplexity::SubGaussian { k, c1: 1.0 },
            SampleComplexity::SmallBall { a: 0.5, gamma: 0.3, k2: 0.0005 },
        ] {
            let lo = sample_complexity(variant, n, &cfg).unwrap();
            let hi = sample_complexity(variant, n + 1, &cfg).unwrap();
            prop_assert!(lo <= hi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sphere_nets_cover_and_respect_size(k in 1usize..4, eps in 0.3f64..0.9) {
        let net = build_sphere_net::<f64>(k, eps).unwrap();
        prop_assert!(net.certified_radius <= eps);
        prop_assert!((net.len() as f64) <= net.cardinality_bound());
        for p in &net.points {
            prop_assert!((norm2(p) - 1.0).abs() < 1e-12);
        }
    }
}
