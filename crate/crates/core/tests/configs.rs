use std::path::{Path, PathBuf};

use approx::assert_relative_eq;

use astforge::config::KvFile;
use astforge::harness::ExperimentConfig;
use astforge::rewards::RewardMode;
use astforge::rss::RssParams;
use astforge::solver::Algorithm;
use astforge::ScenarioConfig;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scenario(name: &str) -> ScenarioConfig {
    let kv = KvFile::load(&configs().join(name)).unwrap();
    let s = ScenarioConfig::from_kv(&kv).unwrap();
    kv.ensure_all_used().unwrap();
    s
}

#[test]
fn shipped_scenarios_match_presets() {
    assert_eq!(scenario("scenario_twocar.cfg"), ScenarioConfig::two_car_two_ped());
    assert_eq!(scenario("scenario_onecar.cfg"), ScenarioConfig::one_car_one_ped());
}

#[test]
fn shipped_rss_parameters_match_defaults() {
    let kv = KvFile::load(&configs().join("rss_table1.cfg")).unwrap();
    let p = RssParams::<f64>::from_kv(&kv).unwrap();
    kv.ensure_all_used().unwrap();
    let d = RssParams::<f64>::default();
    for (a, b) in [
        (p.rho, d.rho),
        (p.lat_a_max_acc, d.lat_a_max_acc),
        (p.lat_a_min_brk, d.lat_a_min_brk),
        (p.lon_a_max_acc, d.lon_a_max_acc),
        (p.lon_a_min_brk, d.lon_a_min_brk),
        (p.lon_a_max_brk, d.lon_a_max_brk),
        (p.margin, d.margin),
    ] {
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }
}

#[test]
fn shipped_experiments_load() {
    let ft = ExperimentConfig::load(&configs().join("failure_types.cfg")).unwrap();
    assert_eq!(ft.scenario, ScenarioConfig::two_car_two_ped());
    assert_eq!(ft.modes, vec![RewardMode::Generic, RewardMode::Td]);
    assert_eq!(ft.seeds, (0..10).collect::<Vec<u64>>());
    assert_eq!(ft.search.algo, Algorithm::Mcts);

    let imp = ExperimentConfig::load(&configs().join("improper_fraction.cfg")).unwrap();
    assert_eq!(imp.scenario, ScenarioConfig::one_car_one_ped());
    assert_eq!(imp.modes, vec![RewardMode::Generic, RewardMode::Rss]);
    assert_relative_eq!(imp.rss.lon_a_min_brk, 6.86, max_relative = 1e-12);

    let quick = ExperimentConfig::load(&configs().join("quickstart.cfg")).unwrap();
    assert_eq!(quick.modes, RewardMode::ALL.to_vec());
}

#[test]
fn experiment_overrides_and_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let scen = configs().join("scenario_onecar.cfg").canonicalize().unwrap();
    let path = tmp.path().join("e.cfg");
    std::fs::write(
        &path,
        format!(
            "scenario = {}\nexperiment.seeds = 7\nsearch.algo = random\nsearch.budget = 12\n\
             reward.k = 5\nclassify.min_speed = 1.0\n",
            scen.display()
        ),
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&path).unwrap();
    assert_eq!(cfg.seeds, vec![7]);
    assert_eq!(cfg.search.algo, Algorithm::Random);
    assert_eq!(cfg.search.budget, 12);
    assert_eq!(cfg.reward.k, 5);
    assert_eq!(cfg.min_speed, 1.0);
    assert_eq!(cfg.modes, RewardMode::ALL.to_vec());
    assert_eq!(cfg.search.c_ucb, 1.41);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = KvFile::parse("a = 1\nnot a pair\n", "x.cfg").unwrap_err();
    assert!(err.is_config());
    assert!(err.to_string().contains('2'), "{err}");
}
