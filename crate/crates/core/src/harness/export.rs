//! CSV export of an experiment report.
//!
//! Files written into the output directory:
//!
//! * `summary.csv`: `failure_type,generic,rss,td` counts
//! * `fimp_histogram.csv`: `bin_low,bin_high,generic,rss,td`
//! * `trials.csv`: one row per (mode, seed) trial
//! * `archive_<mode>_s<seed>.csv`: the archived failures of a trial
//! * `traj_<mode>_s<seed>_r<rank>.csv` / `rss_<mode>_s<seed>_r<rank>.csv`:
//!   per-failure trajectory and per-step RSS classification

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::experiment::ExperimentReport;
use super::failure::FailureType;
use crate::error::{Error, Result};
use crate::rewards::RewardMode;
use crate::rss::write_classification_csv;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const HISTOGRAM_FILE: &str = "fimp_histogram.csv";
pub const TRIALS_FILE: &str = "trials.csv";

/// Paths of every file written, in write order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub files: Vec<PathBuf>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

struct Out<'a> {
    dir: &'a Path,
    manifest: Manifest,
}

impl Out<'_> {
    fn write(&mut self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.manifest.files.push(path);
        Ok(())
    }
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

pub fn trajectory_file_name(mode: RewardMode, seed: u64, rank: usize) -> String {
    format!("traj_{mode}_s{seed}_r{rank:02}.csv")
}

pub fn classification_file_name(mode: RewardMode, seed: u64, rank: usize) -> String {
    format!("rss_{mode}_s{seed}_r{rank:02}.csv")
}

pub fn export(report: &ExperimentReport, out_dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut out = Out {
        dir: out_dir,
        manifest: Manifest::default(),
    };
    let modes = RewardMode::ALL;
    let summary_path = out_dir.join(SUMMARY_FILE);
    out.write(SUMMARY_FILE, |w| {
        let e = io_at(&summary_path);
        writeln!(w, "failure_type,generic,rss,td").map_err(&e)?;
        for ty in FailureType::FAILURES {
            let counts: Vec<String> = modes.iter().map(|m| report.count(ty, *m).to_string()).collect();
            writeln!(w, "{ty},{}", counts.join(",")).map_err(&e)?;
        }
        Ok(())
    })?;
    if report.trials.is_empty() {
        return Ok(out.manifest);
    }

    let hist_path = out_dir.join(HISTOGRAM_FILE);
    out.write(HISTOGRAM_FILE, |w| {
        let e = io_at(&hist_path);
        writeln!(w, "bin_low,bin_high,generic,rss,td").map_err(&e)?;
        let n = report.histogram_bins;
        for b in 0..n {
            let counts: Vec<String> = modes
                .iter()
                .map(|m| report.histogram.get(m).map_or(0, |h| h[b]).to_string())
                .collect();
            let lo = b as f64 / n as f64;
            let hi = (b + 1) as f64 / n as f64;
            writeln!(w, "{lo},{hi},{}", counts.join(",")).map_err(&e)?;
        }
        Ok(())
    })?;

    let trials_path = out_dir.join(TRIALS_FILE);
    out.write(TRIALS_FILE, |w| {
        let e = io_at(&trials_path);
        writeln!(w, "mode,seed,episodes,failure_episodes,archived,error").map_err(&e)?;
        for t in &report.trials {
            let err = t.error.as_deref().unwrap_or("").replace([',', '\n'], " ");
            writeln!(
                w,
                "{},{},{},{},{},{err}",
                t.mode,
                t.seed,
                t.episodes,
                t.failure_episodes,
                t.failures.len()
            )
            .map_err(&e)?;
        }
        Ok(())
    })?;

    for t in &report.trials {
        let mut rows = Vec::with_capacity(t.failures.len());
        for (rank, f) in t.failures.iter().enumerate() {
            let traj_name = trajectory_file_name(t.mode, t.seed, rank);
            let traj_path = out_dir.join(&traj_name);
            out.write(&traj_name, |w| f.trajectory.write_csv(w).map_err(io_at(&traj_path)))?;
            let cls_name = classification_file_name(t.mode, t.seed, rank);
            out.write(&cls_name, |w| write_classification_csv(&f.trajectory, 0, &report.rss, w))?;
            rows.push(format!(
                "{rank},{},{},{},{traj_name}",
                f.trajectory.total_reward(),
                f.failure_type,
                f.f_imp
            ));
        }
        let name = format!("archive_{}_s{}.csv", t.mode, t.seed);
        let path = out_dir.join(&name);
        out.write(&name, |w| {
            let e = io_at(&path);
            writeln!(w, "rank,total_reward,failure_type,f_imp,trajectory_file").map_err(&e)?;
            for r in &rows {
                writeln!(w, "{r}").map_err(&e)?;
            }
            Ok(())
        })?;
    }
    Ok(out.manifest)
}
