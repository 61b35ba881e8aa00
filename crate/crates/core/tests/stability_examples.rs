use spr_core::distributions::random_unit_vectors;
use spr_core::frames::{build_augmented_frame, RowLabel};
use spr_core::stability::{
    adversarial_search, brute_force_stability, check_lower_bound_lemma,
    check_phase_retrieval_exact, check_signs_lemma, check_stability_chain, sign_align,
    stability_ratio, Ratio, Strategy,
};
use spr_core::{DistributionSpec, Frame, SubspaceModel, TailWeight};

fn model(
    spec: DistributionSpec,
    n: usize,
    m: usize,
    seed: u64,
    tail: TailWeight,
) -> SubspaceModel<f64> {
    SubspaceModel::sample(&spec, m, n, seed, tail).unwrap()
}

#[test]
fn search_agrees_with_grid_in_two_dimensions() {
    let m = model(
        DistributionSpec::gaussian(),
        2,
        20_000,
        31,
        TailWeight::Augmented,
    );
    let bf = brute_force_stability(&m, 1.0, 1e-9).unwrap();
    let rep = adversarial_search(&m, 4000, 7, &Strategy::ALL).unwrap();
    let worst = rep.worst_ratio().unwrap();
    assert!(
        (worst - bf.max_ratio).abs() <= 0.05 * bf.max_ratio,
        "search {worst}, grid {}",
        bf.max_ratio
    );
    let finer = brute_force_stability(&m, 0.5, 1e-9).unwrap();
    assert!((finer.max_ratio - bf.max_ratio).abs() <= 0.05 * bf.max_ratio);
}

#[test]
fn rademacher_pure_span_grid_grows_with_resolution() {
    let m = model(
        DistributionSpec::rademacher(),
        2,
        20_000,
        5,
        TailWeight::PureSpan,
    );
    let coarse = brute_force_stability(&m, 1.0, 1e-6).unwrap();
    let fine = brute_force_stability(&m, 0.25, 1e-6).unwrap();
    assert!(coarse.certificates > 0);
    assert!(coarse.max_ratio >= 50.0, "{}", coarse.max_ratio);
    assert!(fine.max_ratio >= 100.0, "{}", fine.max_ratio);
    assert!(fine.max_ratio > coarse.max_ratio);
}

#[test]
fn rademacher_certificate_pair() {
    let m = model(
        DistributionSpec::rademacher(),
        2,
        10_000,
        8,
        TailWeight::PureSpan,
    );
    let (f, g) = ([1.0, 0.0], [0.0, 1.0]);
    assert_eq!(m.abs_gap(&f, &g).unwrap(), 0.0);
    let d = m.min_sign_distance(&f, &g).unwrap();
    assert!((d - 2f64.sqrt()).abs() <= 5.0 / (10_000f64).sqrt());
    assert!(matches!(
        stability_ratio(&m, &f, &g, None).unwrap(),
        Ratio::Degenerate { .. }
    ));
}

#[test]
fn generic_gaussian_frames_do_phase_retrieval() {
    for seed in 0..10 {
        let v = spr_core::distributions::sample_matrix::<f64>(
            &DistributionSpec::gaussian(),
            6,
            3,
            seed,
        )
        .unwrap();
        let frame = Frame::from_samples(&v, 1.0);
        assert!(
            check_phase_retrieval_exact(&frame).unwrap().does_pr,
            "seed {seed}"
        );
    }
}

#[test]
fn too_few_vectors_fail_phase_retrieval() {
    // Real phase retrieval needs N ≥ 2n − 1.
    let v = spr_core::distributions::sample_matrix::<f64>(&DistributionSpec::gaussian(), 4, 3, 2)
        .unwrap();
    let frame = Frame::from_samples(&v, 1.0);
    let res = check_phase_retrieval_exact(&frame).unwrap();
    assert!(!res.does_pr);
    let (f, g) = res.witness.unwrap();
    let (tf, tg) = (frame.analysis(&f).unwrap(), frame.analysis(&g).unwrap());
    for (a, b) in tf.iter().zip(tg.iter()) {
        assert!((a.abs() - b.abs()).abs() < 1e-9);
    }
    assert!(spr_core::linalg::min_sign_distance(&f, &g) > 1e-3);
}

#[test]
fn augmented_frame_identity_block_rescues_small_frames() {
    let frame = build_augmented_frame::<f64>(&DistributionSpec::gaussian(), 3, 2, 4).unwrap();
    assert_eq!(frame.block(RowLabel::Identity).len(), 2);
    assert!(check_phase_retrieval_exact(&frame).unwrap().does_pr);
}

#[test]
fn signs_lemma_on_random_pairs() {
    let m = model(
        DistributionSpec::gaussian(),
        16,
        5000,
        3,
        TailWeight::Augmented,
    );
    let fs = random_unit_vectors::<f64>(16, 200, 1);
    let gs = random_unit_vectors::<f64>(16, 200, 2);
    for (f, g) in fs.iter().zip(&gs) {
        let r = check_signs_lemma(&m, f, g).unwrap();
        assert!(r.holds, "{r:?}");
        let al = sign_align(f, g).unwrap();
        for j in 0..16 {
            assert_eq!(al.delta[j].abs(), (f[j].abs() - g[j].abs()).abs());
        }
    }
}

#[test]
fn lower_bound_lemma_on_gaussian_model() {
    let m = model(
        DistributionSpec::gaussian(),
        8,
        20_000,
        6,
        TailWeight::PureSpan,
    );
    let coeffs = random_unit_vectors::<f64>(8, 1000, 3);
    let supports = random_unit_vectors::<f64>(8, 1000, 4);
    let gamma = 0.3173 * (1.0 - 10.0 / (20_000f64).sqrt());
    for (a, s) in coeffs.iter().zip(&supports) {
        let subset: Vec<usize> = (0..8).filter(|&j| s[j] > 0.0).collect();
        let r = check_lower_bound_lemma(&m, &subset, a, 1.0, gamma).unwrap();
        assert!(r.identity_holds);
        assert!(r.holds, "{r:?}");
    }
}

#[test]
fn full_chain_on_sign_split_pairs() {
    let m = model(
        DistributionSpec::gaussian(),
        8,
        20_000,
        9,
        TailWeight::Augmented,
    );
    let rep = adversarial_search(&m, 600, 1, &[Strategy::SignSplit]).unwrap();
    let w = rep.worst.unwrap();
    let chain = check_stability_chain(&m, &w.f, &w.g, 1.0, 0.3).unwrap();
    assert!(chain.holds, "{chain:?}");
    for (x, y) in random_unit_vectors::<f64>(8, 100, 1)
        .iter()
        .zip(random_unit_vectors::<f64>(8, 100, 2))
    {
        let f: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| if a.abs() > b.abs() { *a } else { 0.0 })
            .collect();
        let h: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| if a.abs() > b.abs() { 0.0 } else { 0.5 * b })
            .collect();
        let ff: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a + b).collect();
        let gg: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a - b).collect();
        assert!(check_stability_chain(&m, &ff, &gg, 1.0, 0.3).unwrap().holds);
    }
}

#[test]
fn augmented_ratios_stay_below_ceiling() {
    for &n in &[4usize, 8] {
        let m = model(
            DistributionSpec::gaussian(),
            n,
            8 * n,
            2,
            TailWeight::Augmented,
        );
        let rep = adversarial_search(&m, 2000, 3, &Strategy::ALL).unwrap();
        assert!(rep.worst_ratio().unwrap() <= 6.0 / 0.3173 * 2.0);
    }
}
