use spr_experiments::{run_scenario, Scenario, ScenarioConfig};

/// Small settings so every scenario runs in well under a second.
fn small(scenario: Scenario) -> ScenarioConfig {
    let text = match scenario {
        Scenario::StabilitySweep => "points = 3000\ndims = 3,6\nbudget = 600\nresolution_deg = 3\n",
        Scenario::FrameBounds => "seeds = 12\npoints = 20000\n",
        Scenario::SmallBall => "points = 20000\ndirections = 5\n",
        Scenario::JsetTails => "trials = 40\nm = 2000\npoints = 20000\n",
        Scenario::NetTransfer => "m = 3000\ntrials = 50\n",
        Scenario::PrFailureDemo => "points = 3000\nresolution_deg = 5\n",
        Scenario::LemmaSuite => "points = 2000\nn = 6\npairs = 300\n",
        Scenario::PeakyDemo | Scenario::InstabilityDemo | Scenario::BoundsTable => "",
    };
    ScenarioConfig::parse(scenario, text).unwrap()
}

#[test]
fn every_scenario_passes_at_small_size() {
    for s in Scenario::ALL {
        let r = run_scenario(&small(s)).unwrap();
        assert_eq!(r.scenario, s.name());
        assert!(r.verdicts_consistent());
        assert!(!r.verdicts.is_empty(), "{s}");
        assert!(r.passed(), "{s}:\n{}", r.summary());
    }
}

#[test]
fn reruns_reproduce_the_csv() {
    for s in [
        Scenario::StabilitySweep,
        Scenario::LemmaSuite,
        Scenario::SmallBall,
    ] {
        let cfg = small(s);
        assert_eq!(
            run_scenario(&cfg).unwrap().to_csv(),
            run_scenario(&cfg).unwrap().to_csv(),
            "{s}"
        );
    }
}

#[test]
fn instability_rows_track_one_over_eps() {
    let r = run_scenario(&ScenarioConfig::defaults(Scenario::InstabilityDemo)).unwrap();
    let eps = r.metrics.column("eps").unwrap();
    let ratio = r.metrics.column("ratio").unwrap();
    for (e, q) in eps.iter().zip(&ratio) {
        let (e, q) = (e.unwrap(), q.unwrap());
        assert!((q * e - 1.0).abs() < 1e-9);
    }
    assert_eq!(r.witnesses.len(), 3);
}

#[test]
fn sweep_reports_a_witness_per_dimension() {
    let r = run_scenario(&small(Scenario::StabilitySweep)).unwrap();
    let frames: Vec<_> = r
        .witnesses
        .iter()
        .filter(|w| w.label.starts_with("worst-frame"))
        .collect();
    assert_eq!(frames.len(), 2);
    assert_eq!(frames[1].f.len(), 6);
}

#[test]
fn scenario_preconditions_are_config_errors() {
    let mut cfg = ScenarioConfig::defaults(Scenario::NetTransfer);
    cfg.n = 5;
    assert_eq!(run_scenario(&cfg).unwrap_err().exit_code(), 2);
}
