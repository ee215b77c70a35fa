use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use astforge::config::KvFile;
use astforge::dissim::{dissimilarity, DissimSource};
use astforge::harness::{export, run_experiment, FailureType};
use astforge::rewards::RewardMode;
use astforge::rss::{classify_sut, improper_fraction, write_classification_csv, RssParams};
use astforge::scenario::AgentId;
use astforge::{Error, Result, Trajectory};

#[derive(Parser)]
#[command(name = "astforge", version, about = "Adaptive stress testing for a crosswalk driving scenario")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file and write CSV reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-step RSS classification of a trajectory export.
    Classify {
        #[arg(long)]
        traj: PathBuf,
        /// Key/value file with RSS parameters; defaults apply to missing keys.
        #[arg(long = "rss-params")]
        rss_params: Option<PathBuf>,
        /// Car whose responses are judged.
        #[arg(long, default_value = "car0")]
        car: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dissimilarity between two trajectory exports.
    Dissim {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Agent whose path is compared, or `all` for every agent.
        #[arg(long, default_value = "car0")]
        agent: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, out } => run(&config, &out),
        Command::Classify {
            traj,
            rss_params,
            car,
            out,
        } => classify(&traj, rss_params.as_deref(), &car, out.as_deref()),
        Command::Dissim { a, b, n, agent } => dissim(&a, &b, n, &agent),
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn run(config: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let report = run_experiment(config)?;
    let manifest = export(&report, out)?;
    let mut so = std::io::stdout().lock();
    for t in &report.trials {
        if let Some(err) = &t.error {
            eprintln!("trial {}/seed {} failed: {err}", t.mode, t.seed);
        }
    }
    writeln!(so, "failure_type,generic,rss,td").map_err(stdout_err)?;
    for ty in FailureType::FAILURES {
        let c: Vec<String> = RewardMode::ALL.iter().map(|m| report.count(ty, *m).to_string()).collect();
        writeln!(so, "{ty},{}", c.join(",")).map_err(stdout_err)?;
    }
    writeln!(so, "wrote {} files to {}", manifest.len(), out.display()).map_err(stdout_err)?;
    if report.trials.iter().any(|t| t.error.is_some()) {
        return Err(Error::Precondition("one or more trials failed".into()));
    }
    Ok(())
}

fn agent_index(traj: &Trajectory, name: &str) -> Result<usize> {
    let id: AgentId = name.parse().map_err(|e: String| Error::Config {
        field: "agent".into(),
        message: e,
    })?;
    traj.agent_index(id).ok_or_else(|| Error::Config {
        field: "agent".into(),
        message: format!("trajectory has no agent `{id}`"),
    })
}

fn classify(
    traj_path: &std::path::Path,
    params: Option<&std::path::Path>,
    car: &str,
    out: Option<&std::path::Path>,
) -> Result<()> {
    let traj = Trajectory::load(traj_path)?;
    let p = match params {
        Some(path) => {
            let kv = KvFile::load(path)?;
            let p = RssParams::from_kv(&kv)?;
            kv.ensure_all_used()?;
            p
        }
        None => RssParams::default(),
    };
    let car = agent_index(&traj, car)?;
    match out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| Error::Io {
                path: path.into(),
                source: e,
            })?;
            write_classification_csv(&traj, car, &p, std::io::BufWriter::new(f))?;
        }
        None => write_classification_csv(&traj, car, &p, std::io::stdout().lock())?,
    }
    let f_imp = improper_fraction::<f64>(&classify_sut(&traj, car, &p)?);
    eprintln!("f_imp={f_imp}");
    Ok(())
}

fn dissim(a: &std::path::Path, b: &std::path::Path, n: usize, agent: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Config {
            field: "n".into(),
            message: "segment count must be >= 1".into(),
        });
    }
    let ta = Trajectory::load(a)?;
    let tb = Trajectory::load(b)?;
    let d = if agent == "all" {
        let sa = astforge::dissim::trajectory_signature(&ta, n, DissimSource::AllAgents)?;
        let sb = astforge::dissim::trajectory_signature(&tb, n, DissimSource::AllAgents)?;
        if sa.points().len() != sb.points().len() {
            return Err(Error::Interface("trajectories have different agent counts".into()));
        }
        astforge::dissim::representative_distance(&sa, &sb)
    } else {
        dissimilarity(&ta.path(agent_index(&ta, agent)?), &tb.path(agent_index(&tb, agent)?), n)?
    };
    println!("{d}");
    Ok(())
}
