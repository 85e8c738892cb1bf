//! Command-line front end for `rotlog-core`.
//!
//! Every command renders its output in memory and then writes it to `--out`
//! or stdout, so a run with the same flags, config and seed reproduces the
//! same bytes regardless of `--jobs`.

pub mod args;
pub mod commands;
pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};

use crate::args::{Cli, Command};
use crate::commands::{
    Artifact, Run, Status, COMMON_KEYS, DISTANCE_KEYS, DR_SWEEP_KEYS, FIT_KEYS, SCALING_KEYS, SIMULATE_KEYS,
};
use crate::config::Config;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const NOT_CONVERGED: u8 = 2;
}

fn allowed_keys(cmd: &Command) -> Vec<&'static str> {
    let specific: &[&str] = match cmd {
        Command::Distance(_) => &DISTANCE_KEYS,
        Command::Scaling(_) => &SCALING_KEYS,
        Command::Fit(_) => &FIT_KEYS,
        Command::Simulate(_) => &SIMULATE_KEYS,
        Command::DrSweep(_) => &DR_SWEEP_KEYS,
        Command::CommutatorTable(_) => &[],
    };
    COMMON_KEYS.iter().chain(specific).copied().collect()
}

/// Runs the command and writes its output.
pub fn execute(cli: &Cli) -> Result<Status> {
    let common = cli.command.common();
    let cfg = Config::load(common.config.as_deref(), &allowed_keys(&cli.command))?;
    let out: Option<PathBuf> = cfg.pick_opt(common.out.clone(), "out")?;
    let jobs = cfg.pick(common.jobs, "jobs", 1usize)?;
    let gnuplot = common.gnuplot || cfg.get::<bool>("gnuplot")?.unwrap_or(false);
    ensure!(jobs >= 1, "--jobs must be at least 1");
    ensure!(!gnuplot || out.is_some(), "--gnuplot needs --out");

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("starting worker threads")?;
    let run = pool.install(|| render(&cli.command, &cfg))?;
    emit(out.as_deref(), gnuplot, &run.artifacts)?;
    Ok(run.status)
}

/// Produces the output without writing it.
pub fn render(cmd: &Command, cfg: &Config) -> Result<Run> {
    match cmd {
        Command::Distance(a) => commands::distance(a, cfg),
        Command::Scaling(a) => commands::scaling(a, cfg),
        Command::Fit(a) => commands::fit(a, cfg),
        Command::Simulate(a) => commands::simulate(a, cfg),
        Command::DrSweep(a) => commands::dr_sweep(a, cfg),
        Command::CommutatorTable(_) => commands::commutator_table(),
    }
}

/// `dir/stem-suffix.ext` for split outputs.
fn suffixed(path: &Path, suffix: Option<&str>) -> PathBuf {
    let Some(suffix) = suffix else {
        return path.to_path_buf();
    };
    let stem = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    path.with_file_name(name)
}

fn emit(out: Option<&Path>, gnuplot: bool, artifacts: &[Artifact]) -> Result<()> {
    let Some(out) = out else {
        let mut stdout = std::io::stdout().lock();
        for a in artifacts {
            stdout.write_all(a.body.as_bytes())?;
        }
        return stdout.flush().map_err(Into::into);
    };
    for a in artifacts {
        let path = suffixed(out, a.suffix.as_deref());
        std::fs::write(&path, &a.body).with_context(|| format!("writing {}", path.display()))?;
        if !gnuplot {
            continue;
        }
        let Some(script) = &a.plot else {
            log::warn!("no gnuplot script for this command");
            continue;
        };
        let Some(name) = path.file_name() else {
            bail!("--out {} has no file name", path.display());
        };
        let gp = path.with_extension("gp");
        std::fs::write(&gp, script.replace("@DATA@", &name.to_string_lossy()))
            .with_context(|| format!("writing {}", gp.display()))?;
    }
    Ok(())
}
