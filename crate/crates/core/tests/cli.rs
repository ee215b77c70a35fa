use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_astforge"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").canonicalize().unwrap()
}

fn write_experiment(dir: &Path, budget: usize, extra: &str) -> PathBuf {
    let path = dir.join("exp.cfg");
    let body = format!(
        "scenario = {}\nexperiment.modes = generic, td\nexperiment.seeds = 4\nsearch.budget = {budget}\n{extra}",
        configs().join("scenario_onecar.cfg").display()
    );
    std::fs::write(&path, body).unwrap();
    path
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn run_to(cfg: &Path, out: &Path) -> Output {
    bin().arg("run").arg("--config").arg(cfg).arg("--out").arg(out).output().unwrap()
}

#[test]
fn run_writes_reports_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_experiment(tmp.path(), 400, "");
    let out = tmp.path().join("out");
    let o = run_to(&cfg, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("failure_type,generic,rss,td\n"));
    for f in ["summary.csv", "fimp_histogram.csv", "trials.csv", "archive_generic_s4.csv", "archive_td_s4.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let trials = std::fs::read_to_string(out.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 3);
}

#[test]
fn missing_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_to(&tmp.path().join("nope.cfg"), &tmp.path().join("out"));
    assert_eq!(code(&o), 1);
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_experiment(tmp.path(), 400, "search.bugdet = 10\n");
    let o = run_to(&cfg, &tmp.path().join("out"));
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("search.bugdet"));
}

#[test]
fn invalid_value_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_experiment(tmp.path(), 400, "search.alpha_pw = 1.5\n");
    assert_eq!(code(&run_to(&cfg, &tmp.path().join("out"))), 1);
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_experiment(tmp.path(), 400, "");
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = run_to(&cfg, &blocker.join("out"));
    assert_eq!(code(&o), 2);
}

fn exported_failure(dir: &Path) -> PathBuf {
    let cfg = write_experiment(dir, 3000, "");
    let out = dir.join("out");
    assert_eq!(code(&run_to(&cfg, &out)), 0);
    let mut trajs: Vec<PathBuf> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("traj_"))
        .collect();
    trajs.sort();
    assert!(!trajs.is_empty(), "expected archived failures");
    trajs.swap_remove(0)
}

#[test]
fn classify_matches_exported_classification() {
    let tmp = tempfile::tempdir().unwrap();
    let traj = exported_failure(tmp.path());
    let o = bin().arg("classify").arg("--traj").arg(&traj).output().unwrap();
    assert_eq!(code(&o), 0);
    let name = traj.file_name().unwrap().to_string_lossy().replacen("traj_", "rss_", 1);
    let exported = std::fs::read(traj.with_file_name(name)).unwrap();
    assert_eq!(o.stdout, exported);
    assert!(String::from_utf8_lossy(&o.stderr).contains("f_imp="));

    let params = tmp.path().join("rss.cfg");
    std::fs::write(&params, "rss.rho = 0.5\n").unwrap();
    let dest = tmp.path().join("c.csv");
    let o = bin()
        .args(["classify", "--traj"])
        .arg(&traj)
        .arg("--rss-params")
        .arg(&params)
        .arg("--out")
        .arg(&dest)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(dest).unwrap().starts_with("t,other_id,"));
}

#[test]
fn classify_rejects_bad_input() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "t,agent_id,vx\n0,car0,1\n").unwrap();
    assert_eq!(code(&bin().arg("classify").arg("--traj").arg(&bad).output().unwrap()), 1);
    let o = bin().arg("classify").arg("--traj").arg(tmp.path().join("missing.csv")).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn dissim_of_a_file_with_itself_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let traj = exported_failure(tmp.path());
    for agent in ["car0", "ped0", "all"] {
        let o = bin()
            .args(["dissim", "--a"])
            .arg(&traj)
            .arg("--b")
            .arg(&traj)
            .args(["--agent", agent])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "0");
    }
    let o = bin().args(["dissim", "--a"]).arg(&traj).arg("--b").arg(&traj).args(["--n", "0"]).output().unwrap();
    assert_eq!(code(&o), 1);
    let o = bin().args(["dissim", "--a"]).arg(&traj).arg("--b").arg(&traj).args(["--agent", "car7"]).output().unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&bin().arg("frobnicate").output().unwrap()), 1);
    assert_eq!(code(&bin().arg("run").output().unwrap()), 1);
    assert_eq!(code(&bin().arg("--help").output().unwrap()), 0);
}
