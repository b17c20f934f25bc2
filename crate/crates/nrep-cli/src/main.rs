//! `nrep`: runs annealed ansatz growth experiments from a config file and
//! inspects the target files the runs consume and produce.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nrep_cli::config::load_config;
use nrep_cli::experiment::{run_experiment, summary_path};
use nrep_core::rdm::{hs_distance, read_target, RdmPayload};
use nrep_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "nrep",
    about = "Grows product ansatze until a reduced density matrix matches a target",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a `key = value` config file.
    Run {
        config: PathBuf,
        /// Run only this seed instead of the config's seed list.
        #[arg(long)]
        seed: Option<u64>,
        /// Cap the number of proposals, overriding the config.
        #[arg(long = "max-iters")]
        max_iters: Option<usize>,
    },
    /// Parse a target file and print its invariants.
    CheckTarget { file: PathBuf },
    /// Print the Hilbert-Schmidt distance between two target files.
    Distance { file_a: PathBuf, file_b: PathBuf },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed downstream pipe (`nrep run ... | head`) is not a failure
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Run { config, seed, max_iters } => run(config, seed, max_iters, &mut out),
        Command::CheckTarget { file } => check_target(file, &mut out),
        Command::Distance { file_a, file_b } => {
            let a = read_target(file_a)?;
            let b = read_target(file_b)?;
            writeln!(out, "{:.16e}", hs_distance(&a.payload, &b.payload)?)?;
            Ok(())
        }
    }
}

fn run(
    config: PathBuf,
    seed: Option<u64>,
    max_iters: Option<usize>,
    out: &mut impl Write,
) -> Result<()> {
    let mut cfg = load_config(&config)?;
    if let Some(seed) = seed {
        cfg.seeds = vec![seed];
    }
    if let Some(max_iters) = max_iters {
        cfg.schedule.max_iterations = max_iters;
        cfg.schedule.validate()?;
    }
    let report = run_experiment(&cfg)?;
    writeln!(out, "target: {}", report.target_provenance)?;
    match report.reference_distance {
        Some(d) => writeln!(out, "reference distance: {d:.16e}")?,
        None => writeln!(out, "reference distance: n/a (file target)")?,
    }
    if let Some(note) = &report.distance_note {
        writeln!(out, "note: {note}")?;
    }
    for row in &report.seeds {
        writeln!(
            out,
            "seed {}: final {:.16e} best {:.16e} length {} after {} proposals ({}, {:.2} s)",
            row.seed,
            row.final_distance,
            row.best_distance,
            row.ansatz_length,
            row.total_proposals,
            row.termination,
            row.wall_time_secs,
        )?;
    }
    writeln!(out, "summary: {}", summary_path(&cfg).display())?;
    Ok(())
}

fn check_target(file: PathBuf, out: &mut impl Write) -> Result<()> {
    let target = read_target(file)?;
    writeln!(out, "kind: {}", target.payload.kind().token())?;
    writeln!(out, "modes: {}", target.payload.num_modes())?;
    writeln!(out, "particles: {}", target.particles)?;
    writeln!(
        out,
        "provenance: {}",
        target.provenance.as_deref().unwrap_or("(none)")
    )?;
    if target.noise_epsilon > 0.0 {
        writeln!(out, "noise epsilon: {}", target.noise_epsilon)?;
    }
    writeln!(out, "hermiticity defect: {:.3e}", target.payload.hermiticity_defect())?;
    match &target.payload {
        RdmPayload::One(g) => writeln!(out, "trace: {:.12}", g.trace().re)?,
        RdmPayload::Two(g) => writeln!(out, "pair trace: {:.12}", g.pair_trace().re)?,
        RdmPayload::Doci(b) => writeln!(out, "pair-number trace: {:.12}", b.pi_trace().re)?,
    }
    writeln!(out, "OK")?;
    Ok(())
}
