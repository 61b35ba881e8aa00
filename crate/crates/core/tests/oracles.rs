//! Estimators checked against closed forms computed independently with statrs.

use spr_core::distributions::{
    estimate_l1_l2, estimate_small_ball, estimate_subgaussian_k, proportion_std_error,
    random_unit_vectors, sample_matrix, DEFAULT_P_GRID,
};
use spr_core::frames::build_discretized_parseval;
use spr_core::nets::count_jset;
use spr_core::subspace::MC_SIGMAS;
use spr_core::{DistributionSpec, Family, SubspaceModel, TailWeight};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;

fn normal_tail(a: f64) -> f64 {
    2.0 * (1.0 - Normal::standard().cdf(a))
}

/// `‖Z‖_p` for a standard normal `Z`: `√2·(Γ((p+1)/2)/Γ(1/2))^{1/p}`.
fn gaussian_abs_moment_norm(p: f64) -> f64 {
    2f64.sqrt() * ((ln_gamma((p + 1.0) / 2.0) - ln_gamma(0.5)) / p).exp()
}

#[test]
fn gaussian_k_matches_gamma_oracle() {
    let oracle = DEFAULT_P_GRID
        .iter()
        .map(|&p| gaussian_abs_moment_norm(p) / p.sqrt())
        .fold(0.0, f64::max);
    assert!((oracle - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    let est =
        estimate_subgaussian_k::<f64>(&DistributionSpec::gaussian(), &DEFAULT_P_GRID, 200_000, 11)
            .unwrap();
    assert!(
        (est.k - oracle).abs() < 0.01,
        "K̂ = {}, oracle {oracle}",
        est.k
    );
    assert_eq!(est.argmax_p, 1.0);
    assert!(!est.divergent);
}

#[test]
fn gaussian_profile_tracks_every_grid_point() {
    let est =
        estimate_subgaussian_k::<f64>(&DistributionSpec::gaussian(), &[1.0, 2.0, 4.0], 200_000, 5)
            .unwrap();
    for (p, r) in est.profile {
        let exact = gaussian_abs_moment_norm(p) / p.sqrt();
        assert!((r - exact).abs() < 0.01, "p = {p}: {r} vs {exact}");
    }
}

#[test]
fn rademacher_k_is_exactly_one() {
    let est =
        estimate_subgaussian_k::<f64>(&DistributionSpec::rademacher(), &DEFAULT_P_GRID, 1000, 3)
            .unwrap();
    assert_eq!(est.k, 1.0);
}

#[test]
fn pareto_flags_missing_moments() {
    let est = estimate_subgaussian_k::<f64>(
        &DistributionSpec::pareto(3.0).unwrap(),
        &DEFAULT_P_GRID,
        5000,
        3,
    )
    .unwrap();
    assert!(est.divergent);
    assert!(est.divergent_ps.contains(&4.0));
}

#[test]
fn l1_over_l2_ratios() {
    let g = estimate_l1_l2::<f64>(&DistributionSpec::gaussian(), 200_000, 1).unwrap();
    assert!((g - (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.01);
    assert_eq!(
        estimate_l1_l2::<f64>(&DistributionSpec::rademacher(), 2000, 1).unwrap(),
        1.0
    );
    let u = estimate_l1_l2::<f64>(&DistributionSpec::uniform(), 200_000, 1).unwrap();
    // Uniform on [-√3, √3]: E|X| = √3/2.
    assert!((u - 3f64.sqrt() / 2.0).abs() < 0.01);
    let peaky = estimate_l1_l2::<f64>(&DistributionSpec::peaky(0.01).unwrap(), 200_000, 1).unwrap();
    assert!(peaky <= 0.2, "{peaky}");
}

#[test]
fn peaky_l1_closed_form() {
    for &theta in &[0.3f64, 0.05, 0.01] {
        let c = (1.0 - (1.0 - theta) * theta * theta).sqrt();
        let exact = c * theta.sqrt() + (1.0 - theta) * theta;
        let spec = DistributionSpec::peaky_with_l1(exact).unwrap();
        let Family::Peaky { theta: solved } = spec.family else {
            panic!("wrong family")
        };
        assert!((solved - theta).abs() < 1e-9 * theta);
    }
}

#[test]
fn families_have_unit_variance() {
    let n = 400_000;
    for spec in [
        DistributionSpec::gaussian(),
        DistributionSpec::rademacher(),
        DistributionSpec::uniform(),
        DistributionSpec::pareto(6.0).unwrap(),
        DistributionSpec::peaky(0.2).unwrap(),
    ] {
        let v = sample_matrix::<f64>(&spec, n, 1, 21).unwrap();
        let xs = v.data();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let m2 = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
        let m4 = xs.iter().map(|x| x.powi(4)).sum::<f64>() / n as f64;
        assert!(
            mean.abs() <= MC_SIGMAS * (m2 / n as f64).sqrt(),
            "{spec}: mean {mean}"
        );
        let se_var = ((m4 - m2 * m2) / n as f64).sqrt();
        assert!(
            (m2 - 1.0).abs() <= MC_SIGMAS * se_var,
            "{spec}: variance {m2}"
        );
    }
}

#[test]
fn gaussian_small_ball_at_one() {
    let p = normal_tail(1.0);
    assert!((p - 0.31731).abs() < 1e-5);
    let m = 50_000;
    let v = sample_matrix::<f64>(&DistributionSpec::gaussian(), m, 6, 2).unwrap();
    let se = proportion_std_error(p, m);
    for x in random_unit_vectors::<f64>(6, 20, 9) {
        let est = estimate_small_ball(&v, &x, 1.0).unwrap();
        assert!((est - p).abs() <= MC_SIGMAS * se, "{est}");
    }
}

#[test]
fn jset_fraction_is_product_of_tails() {
    let p = normal_tail(1.0).powi(2);
    let m = 100_000;
    let v = sample_matrix::<f64>(&DistributionSpec::gaussian(), m, 4, 17).unwrap();
    let rep = count_jset(&v, &[0.6, 0.8, 0.0, 0.0], &[0.0, 0.0, 1.0, -1.0], 1.0).unwrap();
    assert!((rep.fraction() - p).abs() <= MC_SIGMAS * proportion_std_error(p, m));
}

#[test]
fn lp_norms_on_gaussian_model() {
    let m = SubspaceModel::<f64>::sample(
        &DistributionSpec::gaussian(),
        100_000,
        3,
        4,
        TailWeight::PureSpan,
    )
    .unwrap();
    let a = [0.48, -0.6, 0.64];
    let l1 = m.lp_norm(&a, 1.0).unwrap();
    assert!((l1 - (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.01);
    let aug = SubspaceModel::new(m.samples().clone(), TailWeight::Augmented);
    let l2 = aug.lp_norm(&[1.0, 0.0, 0.0], 2.0).unwrap();
    assert!((l2 - 2f64.sqrt()).abs() < MC_SIGMAS * 2f64.sqrt() / (100_000f64).sqrt());
}

#[test]
fn discretized_parseval_bounds_near_one() {
    let f =
        build_discretized_parseval::<f64>(&DistributionSpec::gaussian(), 100_000, 8, 12).unwrap();
    let b = f.frame_bounds().unwrap();
    assert!(b.lower > 0.95 && b.upper < 1.05, "{b:?}");
}
