//! Turns a parsed config into a finished experiment: builds the model and
//! pool, prepares the target, runs the annealer once per seed, and writes
//! the trace, ansatz, and summary files into the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use nrep_core::anneal;
use nrep_core::ansatz::write_ansatz;
use nrep_core::fock::{FockBasis, SpaceKind, SparseOperator, StateVector};
use nrep_core::models::{
    bcs_hamiltonian_with_levels, bcs_level_energies, build_molecular_hamiltonian,
    build_xxz_hamiltonian, exact_eigenstates, hartree_fock_reference, load_fcidump,
    neel_superposition_reference, pair_reference,
};
use nrep_core::pool::{build_pool, OperatorPool};
use nrep_core::rdm::{extract_payload, hs_distance, read_target, RdmKind, RdmTarget};
use nrep_core::{Error, Result};

use crate::config::{resolved_map, RunConfig, SystemSpec, TargetSource};
use crate::trace::write_trace;

/// Model, pool, reference state, and target, ready to anneal.
pub struct PreparedRun {
    pub pool: Arc<OperatorPool>,
    pub initial: StateVector,
    pub target: RdmTarget,
    /// Distance from the noiseless exact matrix to the actual target:
    /// zero without noise, the noise floor with it, absent for file targets.
    pub reference_distance: Option<f64>,
}

/// One annealing run's results, as serialized into `summary.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedReport {
    pub seed: u64,
    pub final_distance: f64,
    pub best_distance: f64,
    pub ansatz_length: usize,
    pub total_proposals: usize,
    pub termination: String,
    pub wall_time_secs: f64,
}

/// The whole `summary.json` document. `config` holds every effective
/// setting; rendering it back to `key = value` lines reproduces the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: BTreeMap<String, String>,
    pub target_provenance: String,
    pub reference_distance: Option<f64>,
    pub distance_note: Option<String>,
    pub seeds: Vec<SeedReport>,
}

fn pair_basis(k: usize, system: &str) -> Result<Arc<FockBasis>> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::domain(format!(
            "system = {system} runs at half filling, so k must be even and at least 2 (got {k})"
        )));
    }
    Ok(Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, k, k / 2)?))
}

/// Builds everything the annealer needs from a config.
pub fn prepare(cfg: &RunConfig) -> Result<PreparedRun> {
    // Model space, reference state, and a Hamiltonian builder for the
    // exact-target sources. The builder is deferred so file-target runs
    // never diagonalize anything.
    type HamiltonianBuilder = Box<dyn Fn() -> Result<SparseOperator>>;
    let (basis, initial, hamiltonian): (_, _, HamiltonianBuilder) = match &cfg.system {
        SystemSpec::Molecular { fcidump } => {
            let ints = load_fcidump(fcidump)?;
            let basis = Arc::new(FockBasis::new(
                SpaceKind::Fermion,
                ints.num_spin_orbitals(),
                ints.num_electrons(),
            )?);
            let initial = hartree_fock_reference(&basis)?;
            let b = Arc::clone(&basis);
            (basis, initial, Box::new(move || build_molecular_hamiltonian(&ints, &b)) as _)
        }
        SystemSpec::Bcs { k, g, spacing } => {
            let basis = pair_basis(*k, "bcs")?;
            let initial = pair_reference(&basis)?;
            let levels = bcs_level_energies(*k, *spacing);
            let (g, b) = (*g, Arc::clone(&basis));
            (basis, initial, Box::new(move || bcs_hamiltonian_with_levels(g, &levels, &b)) as _)
        }
        SystemSpec::Xxz { k, delta } => {
            let basis = pair_basis(*k, "xxz")?;
            let initial = neel_superposition_reference(&basis)?;
            let (k, delta, b) = (*k, *delta, Arc::clone(&basis));
            (basis, initial, Box::new(move || build_xxz_hamiltonian(k, delta, &b)) as _)
        }
    };
    let pool = Arc::new(build_pool(cfg.pool, &basis)?);
    let particles = basis
        .particle_count()
        .expect("run bases are built with a single particle sector");

    let exact_target = match &cfg.target_source {
        TargetSource::ExactGround | TargetSource::ExactExcited { .. } => {
            let level = match &cfg.target_source {
                TargetSource::ExactExcited { level } => *level,
                _ => 0,
            };
            let states = exact_eigenstates(&hamiltonian()?, level + 1)?;
            let state = &states[level];
            let payload = extract_payload(cfg.target_kind, &state.vector)?;
            let what = if level == 0 {
                "exact ground state".to_string()
            } else {
                format!("exact eigenstate {level}")
            };
            RdmTarget::new(payload, particles).with_provenance(format!(
                "{what} (energy {:.12}) of {}",
                state.value,
                cfg.system.describe()
            ))
        }
        TargetSource::File { path } => {
            let target = read_target(path)?;
            if target.payload.kind() != cfg.target_kind {
                return Err(Error::domain(format!(
                    "target file holds a {} matrix but the config asks for {}",
                    target.payload.kind().token(),
                    cfg.target_kind.token()
                )));
            }
            if target.payload.num_modes() != basis.num_modes() {
                return Err(Error::mismatch(format!(
                    "target file is for {} modes, the configured system has {}",
                    target.payload.num_modes(),
                    basis.num_modes()
                )));
            }
            if target.particles != particles {
                return Err(Error::mismatch(format!(
                    "target file is for {} particles, the configured system has {}",
                    target.particles, particles
                )));
            }
            target
        }
    };

    let from_exact_source = !matches!(cfg.target_source, TargetSource::File { .. });
    let (target, reference_distance) = if cfg.noise_epsilon > 0.0 {
        let noisy = exact_target.with_noise(cfg.noise_epsilon, cfg.noise_seed)?;
        let reference = from_exact_source
            .then(|| hs_distance(&exact_target.payload, &noisy.payload))
            .transpose()?;
        (noisy, reference)
    } else {
        (exact_target, from_exact_source.then_some(0.0))
    };

    Ok(PreparedRun {
        pool,
        initial,
        target,
        reference_distance,
    })
}

/// Runs every seed, writes `trace_<seed>.csv`, `ansatz_<seed>.txt`, and
/// `summary.json` under the output directory, and returns the report.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentReport> {
    let prepared = prepare(cfg)?;
    fs::create_dir_all(&cfg.output_dir)?;

    let mut seed_reports = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let started = Instant::now();
        let outcome = anneal::run(
            &prepared.pool,
            &prepared.initial,
            &prepared.target,
            &cfg.schedule,
            seed,
        )?;
        let wall_time_secs = started.elapsed().as_secs_f64();
        write_trace(&outcome.trace, cfg.output_dir.join(format!("trace_{seed}.csv")))?;
        write_ansatz(&outcome.ansatz, cfg.output_dir.join(format!("ansatz_{seed}.txt")))?;
        seed_reports.push(SeedReport {
            seed,
            final_distance: outcome.final_distance,
            best_distance: outcome.best_distance,
            ansatz_length: outcome.ansatz.len(),
            total_proposals: outcome.total_proposals(),
            termination: outcome.termination.token().to_string(),
            wall_time_secs,
        });
    }

    let report = ExperimentReport {
        config: resolved_map(cfg),
        target_provenance: prepared
            .target
            .provenance
            .clone()
            .unwrap_or_else(|| "(none)".to_string()),
        reference_distance: prepared.reference_distance,
        distance_note: (cfg.target_kind == RdmKind::Doci).then(|| {
            "distance adds the pair-hop and pair-number block distances with equal weight"
                .to_string()
        }),
        seeds: seed_reports,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::domain(format!("could not serialize the summary: {e}")))?;
    fs::write(summary_path(cfg), json + "\n")?;
    Ok(report)
}

pub fn summary_path(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir.join("summary.json")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_text;

    fn bcs_config(dir: &std::path::Path) -> RunConfig {
        parse_config_text(&format!(
            "system = bcs\nk = 4\ng = 1.0\ntarget_source = exact_ground\n\
             target_kind = doci\nseeds = 11\noutput_dir = {}\n\
             t_initial = 0.0\nstall_window = 200\nmax_iterations = 4000\n",
            dir.display()
        ))
        .unwrap()
    }

    #[test]
    fn prepare_reports_the_noise_floor_as_reference_distance() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = bcs_config(dir.path());
        let clean = prepare(&cfg).unwrap();
        assert_eq!(clean.reference_distance, Some(0.0));
        assert_eq!(clean.target.noise_epsilon, 0.0);
        assert!(clean.target.provenance.as_deref().unwrap().contains("exact ground state"));

        cfg.noise_epsilon = 0.01;
        let noisy = prepare(&cfg).unwrap();
        let floor = noisy.reference_distance.unwrap();
        assert!(floor > 0.0 && floor < 1.0, "floor {floor}");
        assert_eq!(
            hs_distance(&clean.target.payload, &noisy.target.payload).unwrap(),
            floor
        );
    }

    #[test]
    fn experiment_writes_all_per_seed_files_and_the_summary() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = bcs_config(dir.path());
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.seeds.len(), 1);
        let row = &report.seeds[0];
        assert_eq!(row.seed, 11);
        assert!(row.final_distance >= row.best_distance);
        assert!(dir.path().join("trace_11.csv").is_file());
        assert!(dir.path().join("ansatz_11.txt").is_file());
        let text = fs::read_to_string(dir.path().join("summary.json")).unwrap();
        let parsed: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.config, resolved_map(&cfg));
        assert_eq!(parsed.seeds[0].final_distance, row.final_distance);
        assert!(parsed.distance_note.is_some(), "doci runs carry the weighting note");
    }

    #[test]
    fn file_targets_are_validated_against_the_configured_system() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = bcs_config(dir.path());
        // write a DOCI target for the wrong mode count
        let wrong = parse_config_text(&format!(
            "system = bcs\nk = 6\ng = 1.0\ntarget_source = exact_ground\n\
             target_kind = doci\noutput_dir = {}\n",
            dir.path().display()
        ))
        .unwrap();
        let six_mode_target = prepare(&wrong).unwrap().target;
        let path = dir.path().join("wrong.target");
        nrep_core::rdm::write_target(&six_mode_target, &path).unwrap();

        let mut file_cfg = cfg.clone();
        file_cfg.target_source = TargetSource::File { path };
        let err = match prepare(&file_cfg) {
            Err(e) => e,
            Ok(_) => panic!("a target file for the wrong mode count must be rejected"),
        };
        assert!(matches!(err, Error::BasisMismatch(_)), "got {err:?}");
    }
}
