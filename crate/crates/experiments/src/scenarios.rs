//! The named scenarios.
//!
//! Each scenario fills a metrics table and a list of verdicts computed from
//! the recorded numbers. Random work is keyed on `cfg.seed` through
//! counter-based streams and reduced in index order, so a run is a pure
//! function of its config whatever the thread count.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use spr_core::bounds::{
    balanced_substitution, frame_concentration_interval, gamma_lower_lp, gamma_upper_lp,
    hoeffding_jset_tail, net_union_exponent, sample_complexity, stability_constant,
    subgaussian_conventions, subgaussian_small_ball, BoundsConfig, ConcentrationForm, JSetVariant,
    NetParams, SampleComplexity, StabilityVariant,
};
use spr_core::distributions::{
    estimate_l1_l2, estimate_small_ball, estimate_subgaussian_k, proportion_std_error,
    random_unit_vectors, sample_matrix, sample_matrix_columns, DEFAULT_P_GRID,
};
use spr_core::frames::{build_augmented_frame, build_discretized_parseval, RowLabel};
use spr_core::linalg::min_sign_distance;
use spr_core::nets::{
    count_jset, count_jset_z, enumerate_product_net, verify_net_transfer, TransferStatus,
};
use spr_core::rng::derive_seed;
use spr_core::stability::{
    adversarial_search, brute_force_stability, check_lower_bound_lemma,
    check_phase_retrieval_exact, check_signs_lemma, check_stability_chain, instability_witness,
    sign_align, Strategy, DEFAULT_GAP_TOL,
};
use spr_core::{DistributionSpec, Family, Frame, SampleMatrix, SubspaceModel, TailWeight};

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{ExpError, Result};
use crate::report::{RunReport, Table, Verdict, Witness};
use crate::thresholds as th;

/// Stream keys for the independent draws inside one scenario.
mod key {
    pub const MODEL: u64 = 1;
    pub const SEARCH: u64 = 2;
    pub const DIRECTIONS: u64 = 3;
    pub const TRIALS: u64 = 4;
    pub const SECOND: u64 = 5;
    pub const THIRD: u64 = 6;
    pub const SUBSETS: u64 = 7;
    pub const CALIBRATION: u64 = 8;
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
}

impl Clock {
    fn new(max_seconds: Option<f64>) -> Self {
        Self {
            start: Instant::now(),
            limit: max_seconds.map(|s| Duration::from_secs_f64(s.max(0.0))),
        }
    }

    fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() >= l)
    }
}

struct Outcome {
    metrics: Table,
    verdicts: Vec<Verdict>,
    witnesses: Vec<Witness>,
    partial: bool,
}

impl Outcome {
    fn new(columns: &[&str]) -> Self {
        Self {
            metrics: Table::new(columns),
            verdicts: Vec::new(),
            witnesses: Vec::new(),
            partial: false,
        }
    }

    fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    fn witness(&mut self, label: impl Into<String>, f: &[f64], g: &[f64]) {
        self.witnesses.push(Witness {
            label: label.into(),
            f: f.to_vec(),
            g: g.to_vec(),
        });
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    let clock = Clock::new(cfg.max_seconds);
    let out = match cfg.scenario {
        Scenario::StabilitySweep => stability_sweep(cfg, &clock),
        Scenario::FrameBounds => frame_bounds(cfg, &clock),
        Scenario::SmallBall => small_ball(cfg),
        Scenario::JsetTails => jset_tails(cfg),
        Scenario::NetTransfer => net_transfer(cfg),
        Scenario::InstabilityDemo => instability_demo(cfg),
        Scenario::PrFailureDemo => pr_failure_demo(cfg),
        Scenario::PeakyDemo => peaky_demo(cfg),
        Scenario::LemmaSuite => lemma_suite(cfg, &clock),
        Scenario::BoundsTable => bounds_table(cfg),
    }?;
    Ok(RunReport {
        scenario: cfg.scenario.name().to_string(),
        seed: cfg.seed,
        config: cfg.echo(),
        metrics: out.metrics,
        verdicts: out.verdicts,
        witnesses: out.witnesses,
        partial: out.partial,
        wall_time_secs: clock.start.elapsed().as_secs_f64(),
    })
}

fn seed(cfg: &ScenarioConfig, key: u64) -> u64 {
    derive_seed(cfg.seed, key)
}

fn gap_tol(cfg: &ScenarioConfig) -> f64 {
    cfg.gap_tol.unwrap_or(DEFAULT_GAP_TOL)
}

fn require(ok: bool, key: &str, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ExpError::config(key, message.to_string()))
    }
}

fn sqrt_m(points: usize) -> f64 {
    (points as f64).sqrt()
}

/// Conservative small-ball level at threshold `a`: the smallest estimate
/// over `directions` random unit vectors, less three standard errors.
fn calibrate_gamma(v: &SampleMatrix<f64>, a: f64, directions: usize, seed: u64) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for x in random_unit_vectors::<f64>(v.cols(), directions, seed) {
        worst = worst.min(estimate_small_ball(v, &x, a)?);
    }
    Ok((worst - th::SMALL_BALL_SIGMAS * proportion_std_error(worst, v.rows())).max(0.0))
}

/// Random disjointly supported `(x, y)`: `x` on the first `⌈n/2⌉` coordinates.
fn disjoint_pair(u: &[f64], w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let half = u.len().div_ceil(2);
    let x = u
        .iter()
        .enumerate()
        .map(|(k, &c)| if k < half { c } else { 0.0 })
        .collect();
    let y = w
        .iter()
        .enumerate()
        .map(|(k, &c)| if k < half { 0.0 } else { c })
        .collect();
    (x, y)
}

fn stability_sweep(cfg: &ScenarioConfig, clock: &Clock) -> Result<Outcome> {
    let mut out = Outcome::new(&[
        "n",
        "m",
        "worst_ratio",
        "random_pairs",
        "sign_split",
        "local_ascent",
        "brute_force",
        "ceiling",
        "evaluated",
        "degenerate",
    ]);
    let ceiling = th::stability_ceiling(cfg.points);
    let per_strategy = |r: &spr_core::StabilityReport<f64>, s: Strategy| {
        r.strategy(s)
            .and_then(|st| st.best.as_ref())
            .map(|w| w.ratio)
    };

    for n in [1usize, 2] {
        let model = SubspaceModel::<f64>::sample(
            &cfg.distribution,
            cfg.points,
            n,
            derive_seed(seed(cfg, key::MODEL), n as u64),
            TailWeight::Augmented,
        )?;
        let bf = brute_force_stability(
            &model,
            th::TWO_D_RESOLUTION_DEG.min(cfg.resolution_deg),
            gap_tol(cfg),
        )?;
        let rep = adversarial_search(&model, cfg.budget, seed(cfg, key::SEARCH), &Strategy::ALL)?;
        let worst = rep.worst_ratio().unwrap_or(f64::NAN);
        out.metrics.push(
            format!("model-oracle-{n}d"),
            vec![
                Some(n as f64),
                Some(cfg.points as f64),
                Some(worst),
                per_strategy(&rep, Strategy::RandomPairs),
                per_strategy(&rep, Strategy::SignSplit),
                per_strategy(&rep, Strategy::LocalAscent),
                Some(bf.max_ratio),
                None,
                Some(rep.evaluated as f64),
                Some(rep.degenerate as f64),
            ],
        );
        if n == 1 {
            let tol = th::ONE_D_SQRT_M_FACTOR / sqrt_m(cfg.points);
            out.verdict(Verdict::at_most(
                "1d search ratio |r-1|",
                (worst - 1.0).abs(),
                tol,
            ));
            out.verdict(Verdict::at_most(
                "1d brute-force ratio |r-1|",
                (bf.max_ratio - 1.0).abs(),
                tol,
            ));
        } else {
            let rel = (worst - bf.max_ratio).abs() / bf.max_ratio;
            out.verdict(Verdict::at_most(
                "2d search vs brute force (relative)",
                rel,
                th::TWO_D_AGREEMENT,
            ));
            out.witness("brute-force-2d", &bf.f, &bf.g);
        }
    }

    let mut sweep = Vec::new();
    for &n in &cfg.dims {
        if clock.expired() {
            out.partial = true;
            break;
        }
        let m = cfg.m_per_n * n;
        let frame = build_augmented_frame::<f64>(
            &cfg.distribution,
            m,
            n,
            derive_seed(seed(cfg, key::MODEL), 1000 + n as u64),
        )?;
        let rep = adversarial_search(
            &frame,
            cfg.budget,
            derive_seed(seed(cfg, key::SEARCH), n as u64),
            &Strategy::ALL,
        )?
        .with_ceiling(ceiling);
        let Some(worst) = rep.worst.clone() else {
            return Err(spr_core::Error::Construction(format!(
                "no finite ratio found for n = {n}"
            ))
            .into());
        };
        out.metrics.push(
            format!("frame-{n}"),
            vec![
                Some(n as f64),
                Some(m as f64),
                Some(worst.ratio),
                per_strategy(&rep, Strategy::RandomPairs),
                per_strategy(&rep, Strategy::SignSplit),
                per_strategy(&rep, Strategy::LocalAscent),
                None,
                Some(ceiling),
                Some(rep.evaluated as f64),
                Some(rep.degenerate as f64),
            ],
        );
        out.verdict(Verdict::at_most(
            format!("worst ratio n={n} within 6/(a*gamma)"),
            worst.ratio,
            ceiling,
        ));
        out.witness(format!("worst-frame-{n}"), &worst.f, &worst.g);
        sweep.push(worst.ratio);
    }
    if let (Some(first), Some(last)) = (sweep.first(), sweep.last()) {
        if sweep.len() == cfg.dims.len() && sweep.len() > 1 {
            out.verdict(Verdict::at_most(
                "ratio growth largest/smallest dimension",
                last / first,
                th::DIMENSION_GROWTH,
            ));
        }
    }
    Ok(out)
}

fn frame_bounds(cfg: &ScenarioConfig, clock: &Clock) -> Result<Outcome> {
    let mut out = Outcome::new(&[
        "seed",
        "random_lower",
        "random_upper",
        "inside",
        "augmented_lower",
        "augmented_upper",
    ]);
    let base = seed(cfg, key::MODEL);
    let rows: Vec<_> = (0..cfg.seeds as u64)
        .into_par_iter()
        .map(|s| -> Result<_> {
            if clock.expired() {
                return Ok(None);
            }
            let frame = build_augmented_frame::<f64>(
                &cfg.distribution,
                cfg.m,
                cfg.n,
                derive_seed(base, s),
            )?;
            let random = frame.block(RowLabel::Random).frame_bounds()?;
            let full = frame.frame_bounds()?;
            Ok(Some((s, random, full)))
        })
        .collect::<Result<_>>()?;
    let mut inside = 0usize;
    let mut min_aug_lower = f64::INFINITY;
    for row in &rows {
        let Some((s, random, full)) = row else {
            out.partial = true;
            continue;
        };
        let ok = random.lower >= th::FRAME_LOWER && random.upper <= th::FRAME_UPPER;
        inside += ok as usize;
        min_aug_lower = min_aug_lower.min(full.lower);
        out.metrics.push_all(
            format!("seed-{s}"),
            &[
                *s as f64,
                random.lower,
                random.upper,
                ok as u8 as f64,
                full.lower,
                full.upper,
            ],
        );
    }
    let needed = (th::FRAME_MIN_PASS_FRACTION * cfg.seeds as f64).ceil();
    out.verdict(Verdict::at_least(
        "random block bounds inside [1/2, 2]",
        inside as f64,
        needed,
    ));
    if min_aug_lower.is_finite() {
        out.verdict(Verdict::at_least(
            "augmented lower bound",
            min_aug_lower,
            1.0 - 1e-12,
        ));
    }

    if cfg.points >= cfg.n {
        let parseval = build_discretized_parseval::<f64>(
            &cfg.distribution,
            cfg.points,
            cfg.n,
            seed(cfg, key::SECOND),
        )?;
        let b = parseval.frame_bounds()?;
        out.metrics.push(
            "discretized-parseval",
            vec![None, Some(b.lower), Some(b.upper), None, None, None],
        );
        out.verdict(Verdict::at_most(
            "discretized Parseval deviation from 1",
            (1.0 - b.lower).max(b.upper - 1.0),
            0.05,
        ));
    }
    Ok(out)
}

fn small_ball(cfg: &ScenarioConfig) -> Result<Outcome> {
    require(
        cfg.n >= 2,
        "n",
        "small-ball needs n >= 2 for disjoint pairs",
    )?;
    let mut out = Outcome::new(&["estimate", "std_error", "reference"]);
    let v = sample_matrix::<f64>(&cfg.distribution, cfg.points, cfg.n, seed(cfg, key::MODEL))?;
    let gaussian_at_one = cfg.distribution.family == Family::Gaussian && cfg.a == 1.0;
    let (ball_ref, jset_ref) = if gaussian_at_one {
        (
            Some(th::GAUSSIAN_SMALL_BALL_AT_ONE),
            Some(th::GAUSSIAN_JSET_AT_ONE),
        )
    } else {
        (None, None)
    };

    let dirs = random_unit_vectors::<f64>(cfg.n, cfg.directions, seed(cfg, key::DIRECTIONS));
    for (i, x) in dirs.iter().enumerate() {
        let est = estimate_small_ball(&v, x, cfg.a)?;
        let se = proportion_std_error(ball_ref.unwrap_or(est), cfg.points);
        out.metrics.push(
            format!("small-ball-{i}"),
            vec![Some(est), Some(se), ball_ref],
        );
        if let Some(r) = ball_ref {
            out.verdict(Verdict::at_most(
                format!("small ball dir {i} (std errors)"),
                (est - r).abs() / se,
                th::SMALL_BALL_SIGMAS,
            ));
        }
    }
    let others = random_unit_vectors::<f64>(cfg.n, cfg.directions, seed(cfg, key::SECOND));
    for (i, (u, w)) in dirs.iter().zip(&others).enumerate() {
        let (x, y) = disjoint_pair(u, w);
        if x.iter().all(|&c| c == 0.0) || y.iter().all(|&c| c == 0.0) {
            continue;
        }
        let frac = count_jset(&v, &x, &y, cfg.a)?.fraction();
        let se = proportion_std_error(jset_ref.unwrap_or(frac), cfg.points);
        out.metrics
            .push(format!("jset-{i}"), vec![Some(frac), Some(se), jset_ref]);
        if let Some(r) = jset_ref {
            out.verdict(Verdict::at_most(
                format!("jset fraction pair {i} (std errors)"),
                (frac - r).abs() / se,
                th::SMALL_BALL_SIGMAS,
            ));
        }
    }

    let k = estimate_subgaussian_k::<f64>(
        &cfg.distribution,
        &DEFAULT_P_GRID,
        cfg.points,
        seed(cfg, key::THIRD),
    )?;
    out.metrics
        .push("subgaussian-k", vec![Some(k.k), None, None]);
    out.metrics
        .push("k-argmax-p", vec![Some(k.argmax_p), None, None]);
    out.metrics.push(
        "l1-over-l2",
        vec![
            Some(estimate_l1_l2::<f64>(
                &cfg.distribution,
                cfg.points,
                seed(cfg, key::THIRD),
            )?),
            None,
            None,
        ],
    );
    if k.divergent {
        out.metrics.push(
            "divergent-moments",
            vec![Some(k.divergent_ps.len() as f64), None, None],
        );
        return Ok(out);
    }
    // The small-ball pair guaranteed by the sub-Gaussian constant must hold empirically.
    let (a_sg, gamma_sg) = subgaussian_small_ball(k.k, &cfg.bounds, cfg.p)?;
    out.metrics
        .push("guaranteed-a", vec![Some(a_sg), None, None]);
    out.metrics
        .push("guaranteed-gamma", vec![Some(gamma_sg), None, None]);
    let mut worst = f64::INFINITY;
    for x in &dirs {
        worst = worst.min(estimate_small_ball(&v, x, a_sg)?);
    }
    let se = proportion_std_error(gamma_sg, cfg.points);
    out.verdict(Verdict::at_least(
        "small ball at guaranteed a (min over directions)",
        worst,
        gamma_sg - th::SMALL_BALL_SIGMAS * se,
    ));
    Ok(out)
}

fn jset_tails(cfg: &ScenarioConfig) -> Result<Outcome> {
    require(
        cfg.n >= 2,
        "n",
        "jset-tails needs n >= 2 for disjoint pairs",
    )?;
    let mut out = Outcome::new(&[
        "a",
        "gamma",
        "threshold",
        "frequency",
        "bound",
        "std_error",
        "mean_count",
    ]);
    let k = estimate_subgaussian_k::<f64>(
        &cfg.distribution,
        &DEFAULT_P_GRID,
        cfg.points,
        seed(cfg, key::THIRD),
    )?;
    if k.divergent {
        out.verdict(Verdict::flag(
            "distribution has the moments the small-ball guarantee needs",
            false,
        ));
        return Ok(out);
    }
    let (a_sg, gamma_sg) = subgaussian_small_ball(k.k, &cfg.bounds, cfg.p)?;
    let calib = sample_matrix::<f64>(
        &cfg.distribution,
        cfg.points,
        cfg.n,
        seed(cfg, key::CALIBRATION),
    )?;
    let gamma_cal = calibrate_gamma(&calib, cfg.a, cfg.directions, seed(cfg, key::DIRECTIONS))?;
    require(
        gamma_cal > 0.0,
        "a",
        "calibrated small-ball level is zero at this threshold",
    )?;

    let m = cfg.m;
    let trials_seed = seed(cfg, key::TRIALS);
    let us = random_unit_vectors::<f64>(cfg.n, cfg.trials, seed(cfg, key::SECOND));
    let ws = random_unit_vectors::<f64>(cfg.n, cfg.trials, seed(cfg, key::THIRD));
    let zs = random_unit_vectors::<f64>(cfg.n, cfg.trials, seed(cfg, key::SUBSETS));
    let params = [("lemma", a_sg, gamma_sg), ("calibrated", cfg.a, gamma_cal)];
    let counts: Vec<[(usize, usize); 2]> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<_> {
            let v = sample_matrix::<f64>(
                &cfg.distribution,
                m,
                cfg.n,
                derive_seed(trials_seed, t as u64),
            )?;
            let (x, y) = disjoint_pair(&us[t], &ws[t]);
            let mut res = [(0, 0); 2];
            for (slot, &(_, a, gamma)) in res.iter_mut().zip(&params) {
                let plain = count_jset(&v, &x, &y, a)?.cardinality;
                let z = count_jset_z(&v, &x, &y, &zs[t], a, 2.0 / gamma, gamma, cfg.n)?.cardinality;
                *slot = (plain, z);
            }
            Ok(res)
        })
        .collect::<Result<_>>()?;

    let trials = cfg.trials as f64;
    for (idx, &(name, a, gamma)) in params.iter().enumerate() {
        for (variant, label, divisor) in [
            (JSetVariant::SubGaussian, "plain", 2.0),
            (JSetVariant::General, "z", 4.0),
        ] {
            let threshold = gamma * gamma * m as f64 / divisor;
            let pick = |c: &[(usize, usize); 2]| if label == "plain" { c[idx].0 } else { c[idx].1 };
            let hits = counts
                .iter()
                .filter(|c| pick(c) as f64 <= threshold)
                .count();
            let mean = counts.iter().map(|c| pick(c) as f64).sum::<f64>() / trials;
            let freq = hits as f64 / trials;
            let bound = hoeffding_jset_tail(gamma, m as f64, variant)?;
            let se = proportion_std_error(bound, cfg.trials);
            out.metrics.push_all(
                format!("{name}-{label}"),
                &[a, gamma, threshold, freq, bound, se, mean],
            );
            out.verdict(Verdict::at_most(
                format!("{name} {label} tail frequency"),
                freq,
                bound + th::JSET_TAIL_SIGMAS * se,
            ));
        }
    }
    Ok(out)
}

fn net_transfer(cfg: &ScenarioConfig) -> Result<Outcome> {
    require(
        (2..=3).contains(&cfg.n),
        "n",
        "net-transfer runs for n in {2, 3}",
    )?;
    let mut out = Outcome::new(&["value"]);
    let v = sample_matrix::<f64>(&cfg.distribution, cfg.m, cfg.n, seed(cfg, key::MODEL))?;
    let gamma = calibrate_gamma(&v, cfg.a, cfg.directions, seed(cfg, key::DIRECTIONS))?;
    require(
        gamma > 0.0,
        "a",
        "calibrated small-ball level is zero at this threshold",
    )?;
    let eps = 0.99 * gamma * cfg.a / 8.0;
    let net = enumerate_product_net::<f64>(cfg.n, eps, false)?;
    let rep = verify_net_transfer(&v, &net, cfg.a, gamma, cfg.trials, seed(cfg, key::TRIALS))?;
    for (label, value) in [
        ("gamma", gamma),
        ("eps", rep.eps),
        ("net-tuples", net.tuples.len() as f64),
        ("upper-frame-bound", rep.upper_frame_bound),
        ("net-min-count", rep.net_min_count as f64),
        ("net-threshold", rep.net_threshold),
        ("trial-min-count", rep.min_count as f64),
        ("trial-threshold", rep.threshold),
        ("violations", rep.violations as f64),
    ] {
        out.metrics.push_all(label, &[value]);
    }
    out.verdict(Verdict::flag(
        "net hypotheses met",
        rep.status != TransferStatus::HypothesisNotMet,
    ));
    out.verdict(Verdict::at_most(
        "transfer violations",
        rep.violations as f64,
        0.0,
    ));
    if let Some((x, y, _)) = &rep.certificate {
        out.witness("violation", x, y);
    }
    Ok(out)
}

fn instability_demo(cfg: &ScenarioConfig) -> Result<Outcome> {
    let mut out = Outcome::new(&["eps", "gap", "min_dist", "ratio", "expected"]);
    for &eps in &cfg.eps {
        let w = instability_witness::<f64>(eps)?;
        out.metrics.push_all(
            format!("eps-{eps:e}"),
            &[eps, w.gap, w.min_dist, w.ratio, 1.0 / eps],
        );
        out.verdict(Verdict::at_most(
            format!("ratio = 1/eps at eps={eps:e} (relative error)"),
            (w.ratio * eps - 1.0).abs(),
            th::INSTABILITY_REL,
        ));
        out.witness(format!("eps-{eps:e}"), &w.f, &w.g);
    }
    Ok(out)
}

fn pr_failure_demo(cfg: &ScenarioConfig) -> Result<Outcome> {
    require(cfg.n >= 2, "n", "pr-failure-demo needs n >= 2")?;
    let mut out = Outcome::new(&["value", "reference"]);
    let model = SubspaceModel::<f64>::sample(
        &cfg.distribution,
        cfg.points,
        cfg.n,
        seed(cfg, key::MODEL),
        TailWeight::PureSpan,
    )?;
    let mut f = vec![0.0; cfg.n];
    let mut g = vec![0.0; cfg.n];
    f[0] = 1.0;
    g[1] = 1.0;
    let stats = model.pair_stats(&f, &g);
    let dist = stats.min_dist();
    out.metrics
        .push("span-gap", vec![Some(stats.gap), Some(0.0)]);
    out.metrics
        .push("span-min-dist", vec![Some(dist), Some(2f64.sqrt())]);
    out.verdict(Verdict::at_most("span gap", stats.gap, 0.0));
    out.verdict(Verdict::at_most(
        "span min distance |d - sqrt 2|",
        (dist - 2f64.sqrt()).abs(),
        th::PR_DISTANCE_SQRT_M_FACTOR / sqrt_m(cfg.points),
    ));
    out.witness("span-e1-e2", &f, &g);

    if cfg.n == 2 {
        let bf = brute_force_stability(&model, cfg.resolution_deg, cfg.gap_tol.unwrap_or(1e-6))?;
        out.metrics
            .push("grid-max-ratio", vec![Some(bf.max_ratio), None]);
        out.metrics.push(
            "grid-certificates",
            vec![Some(bf.certificates as f64), None],
        );
    }

    let identity = Frame::<f64>::identity(cfg.n);
    let check = check_phase_retrieval_exact(&identity)?;
    let witness_ok = match &check.witness {
        Some((wf, wg)) => {
            let (tf, tg) = (identity.analysis(wf)?.values, identity.analysis(wg)?.values);
            let equal = tf
                .iter()
                .zip(tg.iter())
                .all(|(a, b)| (a.abs() - b.abs()).abs() <= 1e-12);
            out.witness("identity-frame", wf, wg);
            equal && min_sign_distance(wf, wg) > 1e-6
        }
        None => false,
    };
    out.metrics.push(
        "identity-does-pr",
        vec![Some(check.does_pr as u8 as f64), Some(0.0)],
    );
    out.verdict(Verdict::flag(
        "identity frame fails PR with a valid witness",
        !check.does_pr && witness_ok,
    ));

    let mut generic = 0;
    for s in 0..th::PR_GENERIC_SEEDS {
        let v = sample_matrix::<f64>(
            &DistributionSpec::gaussian(),
            th::PR_GENERIC_VECTORS,
            th::PR_GENERIC_DIM,
            derive_seed(seed(cfg, key::SECOND), s),
        )?;
        generic += check_phase_retrieval_exact(&Frame::from_samples(&v, 1.0))?.does_pr as usize;
    }
    out.metrics.push(
        "generic-frames-doing-pr",
        vec![Some(generic as f64), Some(th::PR_GENERIC_SEEDS as f64)],
    );
    out.verdict(Verdict::at_least(
        "generic gaussian frames doing PR",
        generic as f64,
        th::PR_GENERIC_SEEDS as f64,
    ));
    Ok(out)
}

fn peaky_demo(cfg: &ScenarioConfig) -> Result<Outcome> {
    require(cfg.n >= 2, "n", "peaky-demo needs n >= 2")?;
    let eps = cfg.eps.first().copied().unwrap_or(th::PEAKY_EPS);
    let mut specs = vec![cfg.distribution; cfg.n - 1];
    specs.push(
        DistributionSpec::peaky_with_l1(cfg.peaky_l1)
            .map_err(|e| ExpError::config("peaky_l1", e.to_string()))?,
    );
    let v = sample_matrix_columns::<f64>(&specs, cfg.points, seed(cfg, key::MODEL))?;
    let model = SubspaceModel::new(v, TailWeight::PureSpan);
    let r = model.peaky_disjointification(0, cfg.n - 1, eps)?;
    let mut out = Outcome::new(&["value", "bound"]);
    out.metrics.push("eps", vec![Some(eps), None]);
    out.metrics
        .push("l1-last", vec![Some(r.l1_last), Some(eps * eps)]);
    out.metrics.push(
        "dist-last",
        vec![Some(r.dist_last), Some(eps + r.dist_last_tolerance)],
    );
    out.metrics.push(
        "dist-first-sq",
        vec![Some(r.dist_first_sq), Some(eps + r.dist_first_sq_tolerance)],
    );
    out.metrics
        .push("tail-mass", vec![Some(r.tail_mass), Some(eps)]);
    out.verdict(Verdict::flag(
        "l1 norm of last column below eps^2",
        r.precondition_met,
    ));
    out.verdict(Verdict::flag("disjoint supports", r.disjoint));
    out.verdict(Verdict::at_most(
        "|y_N - y'|",
        r.dist_last,
        eps + r.dist_last_tolerance,
    ));
    out.verdict(Verdict::at_most(
        "|y_1 - x'|^2",
        r.dist_first_sq,
        eps + r.dist_first_sq_tolerance,
    ));
    Ok(out)
}

#[derive(Default)]
struct PairTally {
    abs_delta_mismatch: usize,
    max_recon_rel: f64,
    max_first_rel: f64,
    max_second_rel: f64,
    max_triangle_rel: f64,
}

fn rel_excess(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        ((lhs - rhs) / scale).max(0.0)
    }
}

fn lemma_suite(cfg: &ScenarioConfig, clock: &Clock) -> Result<Outcome> {
    let n = cfg.n;
    require(n >= 2, "n", "lemma-suite needs n >= 2")?;
    let mut out = Outcome::new(&["value", "bound"]);
    let aug = SubspaceModel::<f64>::sample(
        &cfg.distribution,
        cfg.points,
        n,
        seed(cfg, key::MODEL),
        TailWeight::Augmented,
    )?;
    let pure = SubspaceModel::new(aug.samples().clone(), TailWeight::PureSpan);

    let fs = random_unit_vectors::<f64>(n, cfg.pairs, seed(cfg, key::SECOND));
    let gs = random_unit_vectors::<f64>(n, cfg.pairs, seed(cfg, key::THIRD));
    let tallies: Vec<Option<PairTally>> = fs
        .par_iter()
        .zip(&gs)
        .map(|(f, g)| -> Result<_> {
            if clock.expired() {
                return Ok(None);
            }
            let al = sign_align(f, g)?;
            let mut t = PairTally::default();
            for j in 0..n {
                if al.delta[j].abs() != (f[j].abs() - g[j].abs()).abs() {
                    t.abs_delta_mismatch += 1;
                }
                let scale = g[j].abs().max(al.h[j].abs());
                if scale > 0.0 {
                    t.max_recon_rel = t
                        .max_recon_rel
                        .max((al.h[j] + al.delta[j] - g[j]).abs() / scale);
                }
            }
            let r = check_signs_lemma(&aug, f, g)?;
            t.max_first_rel = rel_excess(r.delta_norm, r.gap);
            t.max_second_rel = rel_excess(r.sign_gap, 2.0 * r.gap);
            t.max_triangle_rel = rel_excess(r.sign_gap, r.gap_continuous + r.delta_continuous);
            Ok(Some(t))
        })
        .collect::<Result<_>>()?;
    let mut total = PairTally::default();
    let mut done = 0usize;
    for t in tallies.iter().flatten() {
        done += 1;
        total.abs_delta_mismatch += t.abs_delta_mismatch;
        total.max_recon_rel = total.max_recon_rel.max(t.max_recon_rel);
        total.max_first_rel = total.max_first_rel.max(t.max_first_rel);
        total.max_second_rel = total.max_second_rel.max(t.max_second_rel);
        total.max_triangle_rel = total.max_triangle_rel.max(t.max_triangle_rel);
    }
    out.partial |= done < cfg.pairs;
    out.metrics
        .push("sign-pairs", vec![Some(done as f64), None]);
    out.metrics.push(
        "abs-delta-mismatches",
        vec![Some(total.abs_delta_mismatch as f64), Some(0.0)],
    );
    out.metrics.push(
        "reconstruction-rel",
        vec![Some(total.max_recon_rel), Some(th::SIGN_ALIGN_REL)],
    );
    out.metrics.push(
        "delta-norm-excess-rel",
        vec![Some(total.max_first_rel), Some(th::PAIRWISE_ALGEBRA_REL)],
    );
    out.metrics.push(
        "sign-gap-excess-rel",
        vec![Some(total.max_second_rel), Some(th::PAIRWISE_ALGEBRA_REL)],
    );
    out.metrics.push(
        "triangle-excess-rel",
        vec![Some(total.max_triangle_rel), Some(th::PAIRWISE_ALGEBRA_REL)],
    );
    out.verdict(Verdict::at_most(
        "|delta_j| = ||a_j|-|b_j|| mismatches",
        total.abs_delta_mismatch as f64,
        0.0,
    ));
    out.verdict(Verdict::at_most(
        "b = h + delta (relative)",
        total.max_recon_rel,
        th::SIGN_ALIGN_REL,
    ));
    out.verdict(Verdict::at_most(
        "delta norm <= gap (relative excess)",
        total.max_first_rel,
        th::PAIRWISE_ALGEBRA_REL,
    ));
    out.verdict(Verdict::at_most(
        "sign gap <= 2 gap (relative excess)",
        total.max_second_rel,
        th::PAIRWISE_ALGEBRA_REL,
    ));
    out.verdict(Verdict::at_most(
        "triangle step (relative excess)",
        total.max_triangle_rel,
        th::PAIRWISE_ALGEBRA_REL,
    ));

    let gamma = calibrate_gamma(
        aug.samples(),
        th::CEILING_A,
        cfg.directions,
        seed(cfg, key::CALIBRATION),
    )?;
    let min_pairs = (cfg.pairs / 10).max(1);
    let coeffs = random_unit_vectors::<f64>(n, min_pairs, seed(cfg, key::SUBSETS));
    let masks = random_unit_vectors::<f64>(n, min_pairs, derive_seed(seed(cfg, key::SUBSETS), 1));
    let lower: Vec<_> = coeffs
        .par_iter()
        .zip(&masks)
        .map(|(a, mask)| {
            let subset: Vec<usize> = (0..n).filter(|&j| mask[j] > 0.0).collect();
            check_lower_bound_lemma(&pure, &subset, a, th::CEILING_A, gamma)
        })
        .collect::<spr_core::Result<_>>()?;
    let identity_err = lower
        .iter()
        .map(|r| {
            rel_excess(r.rhs * r.rhs, r.min_form * r.min_form)
                .max(rel_excess(r.min_form * r.min_form, r.rhs * r.rhs))
        })
        .fold(0.0, f64::max);
    let lower_failures = lower.iter().filter(|r| !r.holds).count();
    out.metrics
        .push("calibrated-gamma", vec![Some(gamma), None]);
    out.metrics.push(
        "min-identity-rel",
        vec![Some(identity_err), Some(th::PAIRWISE_ALGEBRA_REL)],
    );
    out.metrics.push(
        "lower-bound-failures",
        vec![Some(lower_failures as f64), Some(0.0)],
    );
    out.verdict(Verdict::at_most(
        "min identity (relative)",
        identity_err,
        th::PAIRWISE_ALGEBRA_REL,
    ));
    out.verdict(Verdict::at_most(
        "lower bound lemma failures",
        lower_failures as f64,
        0.0,
    ));

    let search = adversarial_search(
        &aug,
        (cfg.pairs as u64 / 10).max(1),
        seed(cfg, key::SEARCH),
        &[Strategy::SignSplit],
    )?;
    let mut chain_failures = 0usize;
    let mut chain_checked = 0usize;
    for w in search.worst.iter().chain(&search.certificates) {
        chain_checked += 1;
        chain_failures +=
            !check_stability_chain(&aug, &w.f, &w.g, th::CEILING_A, gamma)?.holds as usize;
    }
    for (f, g) in fs.iter().zip(&gs).take(100) {
        chain_checked += 1;
        chain_failures += !check_stability_chain(&aug, f, g, th::CEILING_A, gamma)?.holds as usize;
    }
    out.metrics
        .push("chain-checked", vec![Some(chain_checked as f64), None]);
    out.metrics.push(
        "chain-failures",
        vec![Some(chain_failures as f64), Some(0.0)],
    );
    out.verdict(Verdict::at_most(
        "stability chain failures",
        chain_failures as f64,
        0.0,
    ));

    let mut supp_failures = 0usize;
    let mut khin_failures = 0usize;
    for (a, mask) in coeffs.iter().zip(&masks).take(100) {
        let subset: Vec<usize> = (0..n).filter(|&j| mask[j] > 0.0).collect();
        supp_failures += !pure.check_suppression_unconditional(a, &subset)?.holds as usize;
        khin_failures += !pure.khintchine_check(a, cfg.bounds.a1)?.holds as usize;
    }
    out.metrics.push(
        "suppression-failures",
        vec![Some(supp_failures as f64), Some(0.0)],
    );
    out.metrics.push(
        "khintchine-failures",
        vec![Some(khin_failures as f64), Some(0.0)],
    );
    out.verdict(Verdict::at_most(
        "suppression unconditional failures",
        supp_failures as f64,
        0.0,
    ));
    out.verdict(Verdict::at_most(
        "Khintchine lower bound failures",
        khin_failures as f64,
        0.0,
    ));
    Ok(out)
}

fn bounds_table(cfg: &ScenarioConfig) -> Result<Outcome> {
    let mut out = Outcome::new(&["value", "expected", "rel_error"]);
    let reference = BoundsConfig::default();
    let spot = |out: &mut Outcome, label: &str, value: f64, expected: f64| {
        let rel = (value - expected).abs() / expected.abs();
        out.metrics.push_all(label, &[value, expected, rel]);
        out.verdict(Verdict::at_most(label, rel, th::FORMULA_REL));
    };
    spot(
        &mut out,
        "gamma_upper(B=2,p=4,a=0.5)",
        gamma_upper_lp(2.0, 4.0, 0.5)?,
        9.0 / 256.0,
    );
    spot(
        &mut out,
        "gamma_lower(A=0.5,p=1,a=0.25)",
        gamma_lower_lp(0.5, 1.0, 0.25)?,
        1.0 / 16.0,
    );
    let (a, g) = subgaussian_small_ball(1.0, &reference, 4.0)?;
    spot(
        &mut out,
        "subgaussian_small_ball(K=1,p=4).a",
        a,
        1.0 / (16.0 * 2f64.sqrt()),
    );
    spot(
        &mut out,
        "subgaussian_small_ball(K=1,p=4).gamma",
        g,
        1.0 / 512.0,
    );
    let (m, s) = balanced_substitution(10.0, 1.0, &reference);
    let iv =
        frame_concentration_interval(m, 10.0, s, 1.0, &reference, ConcentrationForm::Composed)?;
    spot(
        &mut out,
        "balanced interval lower / m",
        iv.lower / m,
        9.0 / 16.0,
    );
    spot(
        &mut out,
        "balanced interval upper / m",
        iv.upper / m,
        25.0 / 16.0,
    );
    let c3 = (1.0 + (1.0 + 2f64.sqrt()).powi(2)).sqrt() * 2048.0;
    spot(
        &mut out,
        "stability_constant(subgaussian,K=1)",
        stability_constant(StabilityVariant::SubGaussian { k: 1.0 })?.value,
        c3,
    );
    spot(
        &mut out,
        "stability_constant(small-ball,a=0.5,gamma=0.5)",
        stability_constant(StabilityVariant::SmallBall { a: 0.5, gamma: 0.5 })?.value,
        24.0,
    );
    spot(
        &mut out,
        "stability_constant(random-frame,a=0.5,gamma=0.5)",
        stability_constant(StabilityVariant::RandomFrame { a: 0.5, gamma: 0.5 })?.value,
        49.0,
    );
    spot(
        &mut out,
        "sample_complexity(concentration,K=1,n=10)",
        sample_complexity(SampleComplexity::Concentration { k: 1.0 }, 10, &reference)? as f64,
        640.0,
    );
    spot(
        &mut out,
        "net_union_exponent(n=10,eps=0.1,gamma=0.5,m=1e4)",
        net_union_exponent(10, 1e4, 0.5, NetParams::SubGaussian { eps: 0.1 })?,
        10.0 * 60f64.ln() - 312.5,
    );

    // Configured evaluations, reported without verdicts.
    let conv = subgaussian_conventions(1.0, &cfg.bounds)?;
    out.metrics.push(
        "conventions.direct.a",
        vec![Some(conv.direct.0), None, None],
    );
    out.metrics.push(
        "conventions.direct.gamma",
        vec![Some(conv.direct.1), None, None],
    );
    out.metrics.push(
        "conventions.small_ball.a",
        vec![Some(conv.small_ball.0), None, None],
    );
    out.metrics.push(
        "conventions.small_ball.gamma",
        vec![Some(conv.small_ball.1), None, None],
    );
    out.metrics.push(
        "conventions.constant_direct",
        vec![Some(conv.constant_direct), None, None],
    );
    out.metrics.push(
        "conventions.constant_small_ball",
        vec![Some(conv.constant_small_ball), None, None],
    );
    for &n in &cfg.dims {
        let n = n.max(2);
        let rows = [
            ("concentration", SampleComplexity::Concentration { k: 1.0 }),
            (
                "small-ball",
                SampleComplexity::SmallBall {
                    a: cfg.a.min(1.0),
                    gamma: 0.5,
                    k2: 0.5f64.powi(4) / 16.0,
                },
            ),
        ];
        for (name, variant) in rows {
            let m = sample_complexity(variant, n, &cfg.bounds)?;
            out.metrics.push(
                format!("sample_complexity({name},n={n})"),
                vec![Some(m as f64), None, None],
            );
        }
    }
    for &m in &[1e3, 1e4] {
        for (name, variant) in [
            ("subgaussian", JSetVariant::SubGaussian),
            ("general", JSetVariant::General),
        ] {
            let tail = hoeffding_jset_tail(0.5, m, variant)?;
            out.metrics.push(
                format!("jset_tail({name},gamma=0.5,m={m:e})"),
                vec![Some(tail), None, None],
            );
        }
    }
    Ok(out)
}
