//! The stochastic growth loop. Each iteration proposes one more exponential
//! on top of the current ansatz: a pool operator drawn uniformly and an
//! amplitude drawn uniformly from a shrinking-or-growing window. The
//! proposal is scored by the distance between the evolved state's reduced
//! density matrix and the target, and accepted by the Metropolis rule at the
//! current temperature. Accepted factors are appended permanently; nothing
//! is ever re-optimized.
//!
//! Randomness comes from a single seeded stream, consumed in a fixed order
//! per iteration (operator, amplitude, then the acceptance draw only when
//! the move is uphill at nonzero temperature), so a run is reproducible from
//! its seed alone.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{apply_exponential, Ansatz, AnsatzElement};
use crate::error::{Error, Result};
use crate::fock::StateVector;
use crate::pool::OperatorPool;
use crate::rdm::{extract_payload, hs_distance, RdmTarget};

/// Smallest value the amplitude window may shrink to.
pub const THETA_WINDOW_MIN: f64 = 1e-6;
/// Largest value the amplitude window may grow to.
pub const THETA_WINDOW_MAX: f64 = 2.0;

/// Knobs of the annealing loop. `Default` gives the standard run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    /// Starting temperature of the Metropolis rule; zero means greedy.
    pub t_initial: f64,
    /// Multiplicative temperature decay applied after every iteration.
    pub t_decay: f64,
    /// Starting half-width of the uniform amplitude window.
    pub theta_max_initial: f64,
    /// Window shrink factor on a rejected proposal.
    pub theta_decay: f64,
    /// Window growth factor on an accepted proposal.
    pub theta_growth: f64,
    /// Smallest improvement of the best distance that resets the stall count.
    pub stall_epsilon: f64,
    /// Consecutive proposals without such an improvement before stopping.
    pub stall_window: usize,
    /// Hard cap on the number of proposals.
    pub max_iterations: usize,
}

impl Default for AnnealSchedule {
    fn default() -> AnnealSchedule {
        AnnealSchedule {
            t_initial: 0.01,
            t_decay: 0.995,
            theta_max_initial: 0.5,
            theta_decay: 0.999,
            theta_growth: 1.0025,
            stall_epsilon: 1e-12,
            stall_window: 1000,
            max_iterations: 50_000,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !self.t_initial.is_finite() || self.t_initial < 0.0 {
            return Err(Error::domain("t_initial must be finite and non-negative"));
        }
        if !(self.t_decay > 0.0 && self.t_decay <= 1.0) {
            return Err(Error::domain("t_decay must lie in (0, 1]"));
        }
        if !(self.theta_max_initial >= THETA_WINDOW_MIN
            && self.theta_max_initial <= THETA_WINDOW_MAX)
        {
            return Err(Error::domain(format!(
                "theta_max_initial must lie in [{THETA_WINDOW_MIN}, {THETA_WINDOW_MAX}]"
            )));
        }
        if !(self.theta_decay > 0.0 && self.theta_decay <= 1.0) {
            return Err(Error::domain("theta_decay must lie in (0, 1]"));
        }
        if !self.theta_growth.is_finite() || self.theta_growth < 1.0 {
            return Err(Error::domain("theta_growth must be finite and at least 1"));
        }
        if !self.stall_epsilon.is_finite() || self.stall_epsilon < 0.0 {
            return Err(Error::domain("stall_epsilon must be finite and non-negative"));
        }
        if self.stall_window == 0 {
            return Err(Error::domain("stall_window must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// One proposal, exactly as it happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// 1-based proposal counter.
    pub iteration: usize,
    /// Pool index of the drawn generator.
    pub proposed_op: usize,
    /// Drawn amplitude.
    pub proposed_theta: f64,
    /// Distance the proposal would move to.
    pub candidate_distance: f64,
    pub accepted: bool,
    /// Distance after the accept/reject decision.
    pub current_distance: f64,
    /// Temperature used by this iteration's Metropolis rule.
    pub temperature: f64,
    /// Amplitude window half-width used by this iteration's draw.
    pub theta_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// The best distance stopped improving for a full stall window.
    Stalled,
    /// The proposal budget ran out.
    MaxIterations,
    /// A proposal produced a non-finite distance.
    NumericalAbort,
}

impl TerminationReason {
    pub fn token(&self) -> &'static str {
        match self {
            TerminationReason::Stalled => "stalled",
            TerminationReason::MaxIterations => "max_iterations",
            TerminationReason::NumericalAbort => "numerical_abort",
        }
    }
}

/// Everything a finished run reports.
#[derive(Debug, Clone)]
pub struct AnnealOutcome {
    pub ansatz: Ansatz,
    pub trace: Vec<TraceRecord>,
    /// Distance of the state the final ansatz prepares.
    pub final_distance: f64,
    /// Smallest distance any accepted state reached.
    pub best_distance: f64,
    pub termination: TerminationReason,
    pub seed: u64,
}

impl AnnealOutcome {
    pub fn total_proposals(&self) -> usize {
        self.trace.len()
    }
}

/// Grows an ansatz from `initial` toward `target`, driven by the seeded
/// stream. Returns the full proposal trace alongside the final ansatz.
pub fn run(
    pool: &Arc<OperatorPool>,
    initial: &StateVector,
    target: &RdmTarget,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<AnnealOutcome> {
    schedule.validate()?;
    let kind = target.payload.kind();
    let mut ansatz = Ansatz::new(pool, initial.clone())?;
    let mut current_d = hs_distance(&extract_payload(kind, ansatz.current_state())?, &target.payload)?;
    if !current_d.is_finite() {
        return Err(Error::numerical("initial distance to the target is not finite"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut temperature = schedule.t_initial;
    let mut theta_max = schedule.theta_max_initial;
    let mut best_d = current_d;
    let mut stall = 0usize;
    let mut trace = Vec::new();
    let mut termination = TerminationReason::MaxIterations;

    for iteration in 1..=schedule.max_iterations {
        let proposed_op = rng.gen_range(0..pool.len());
        let proposed_theta = rng.gen_range(-theta_max..=theta_max);
        let candidate_state = apply_exponential(
            &pool.operator_at(proposed_op)?.matrix,
            proposed_theta,
            ansatz.current_state(),
        )?;
        let candidate_d = hs_distance(&extract_payload(kind, &candidate_state)?, &target.payload)?;
        if !candidate_d.is_finite() {
            trace.push(TraceRecord {
                iteration,
                proposed_op,
                proposed_theta,
                candidate_distance: candidate_d,
                accepted: false,
                current_distance: current_d,
                temperature,
                theta_max,
            });
            termination = TerminationReason::NumericalAbort;
            break;
        }

        let delta = candidate_d - current_d;
        let accepted = if delta <= 0.0 {
            true
        } else if temperature > 0.0 {
            // the acceptance draw is consumed only on this branch, so greedy
            // and thermal runs stay reproducible from the same seed
            rng.gen::<f64>() < (-delta / temperature).exp()
        } else {
            false
        };

        if accepted {
            ansatz = ansatz.extend(
                AnsatzElement {
                    pool_index: proposed_op,
                    theta: proposed_theta,
                },
                candidate_state,
            )?;
            current_d = candidate_d;
        }
        trace.push(TraceRecord {
            iteration,
            proposed_op,
            proposed_theta,
            candidate_distance: candidate_d,
            accepted,
            current_distance: current_d,
            temperature,
            theta_max,
        });

        // window and temperature updates take effect from the next iteration
        theta_max = if accepted {
            (theta_max * schedule.theta_growth).clamp(THETA_WINDOW_MIN, THETA_WINDOW_MAX)
        } else {
            (theta_max * schedule.theta_decay).clamp(THETA_WINDOW_MIN, THETA_WINDOW_MAX)
        };
        temperature *= schedule.t_decay;

        if current_d < best_d - schedule.stall_epsilon {
            best_d = current_d;
            stall = 0;
        } else {
            best_d = best_d.min(current_d);
            stall += 1;
            if stall >= schedule.stall_window {
                termination = TerminationReason::Stalled;
                break;
            }
        }
    }

    Ok(AnnealOutcome {
        ansatz,
        trace,
        final_distance: current_d,
        best_distance: best_d,
        termination,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockBasis, SpaceKind};
    use crate::models::{build_xxz_hamiltonian, exact_eigenstates, hartree_fock_reference};
    use crate::pool::{build_pool, OperatorPool, PoolKind};
    use crate::rdm::{compute_doci_blocks, compute_rdm1, RdmPayload, RdmTarget};

    fn fermion_setup() -> (Arc<OperatorPool>, StateVector) {
        let basis = Arc::new(FockBasis::new(SpaceKind::Fermion, 4, 2).unwrap());
        let pool = Arc::new(build_pool(PoolKind::Gsd, &basis).unwrap());
        let initial = hartree_fock_reference(&basis).unwrap();
        (pool, initial)
    }

    fn self_target(initial: &StateVector) -> RdmTarget {
        RdmTarget::new(RdmPayload::One(compute_rdm1(initial).unwrap()), 2)
    }

    #[test]
    fn greedy_self_target_stalls_immediately() {
        let (pool, initial) = fermion_setup();
        let target = self_target(&initial);
        let schedule = AnnealSchedule {
            t_initial: 0.0,
            stall_window: 50,
            max_iterations: 10_000,
            ..AnnealSchedule::default()
        };
        let out = run(&pool, &initial, &target, &schedule, 11).unwrap();
        assert_eq!(out.termination, TerminationReason::Stalled);
        assert_eq!(out.total_proposals(), 50);
        assert_eq!(out.final_distance, 0.0, "no uphill move can be accepted");
        assert_eq!(out.best_distance, 0.0);
        // greedy acceptance still admits exactly neutral moves (generators
        // that annihilate the reference), so only the distance must be pinned
        for rec in &out.trace {
            assert!(!rec.accepted || rec.candidate_distance == 0.0);
        }
    }

    #[test]
    fn same_seed_reproduces_the_whole_trace() {
        let (pool, initial) = fermion_setup();
        let target = self_target(&initial);
        let schedule = AnnealSchedule {
            max_iterations: 200,
            stall_window: 100_000,
            ..AnnealSchedule::default()
        };
        let a = run(&pool, &initial, &target, &schedule, 5).unwrap();
        let b = run(&pool, &initial, &target, &schedule, 5).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.final_distance, b.final_distance);
        assert_eq!(a.ansatz.elements(), b.ansatz.elements());

        let c = run(&pool, &initial, &target, &schedule, 6).unwrap();
        assert!(a.trace != c.trace, "a different seed takes a different path");
    }

    #[test]
    fn replaying_the_elements_rebuilds_the_final_state() {
        let (pool, initial) = fermion_setup();
        let target = self_target(&initial);
        let schedule = AnnealSchedule {
            t_initial: 0.5, // hot enough to accept plenty of uphill moves
            max_iterations: 120,
            stall_window: 100_000,
            ..AnnealSchedule::default()
        };
        let out = run(&pool, &initial, &target, &schedule, 3).unwrap();
        assert!(!out.ansatz.is_empty());
        let replay =
            Ansatz::from_elements(&pool, initial.clone(), out.ansatz.elements().to_vec())
                .unwrap();
        let d = hs_distance(
            &extract_payload(target.payload.kind(), replay.current_state()).unwrap(),
            &target.payload,
        )
        .unwrap();
        assert_eq!(d, out.final_distance, "replay is bit-exact");
    }

    #[test]
    fn greedy_runs_never_increase_the_distance() {
        let basis = Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, 4, 2).unwrap());
        let pool = Arc::new(build_pool(PoolKind::Pair, &basis).unwrap());
        let h = build_xxz_hamiltonian(4, 1.5, &basis).unwrap();
        let ground = &exact_eigenstates(&h, 1).unwrap()[0];
        let target = RdmTarget::new(
            RdmPayload::Doci(compute_doci_blocks(&ground.vector).unwrap()),
            2,
        );
        let initial =
            StateVector::basis_state(&basis, 0b0011).unwrap();
        let schedule = AnnealSchedule {
            t_initial: 0.0,
            max_iterations: 400,
            stall_window: 100_000,
            ..AnnealSchedule::default()
        };
        let out = run(&pool, &initial, &target, &schedule, 9).unwrap();
        let mut last = f64::INFINITY;
        for rec in &out.trace {
            assert!(rec.current_distance <= last + 1e-18);
            if rec.accepted {
                assert_eq!(rec.current_distance, rec.candidate_distance);
            }
            last = rec.current_distance;
        }
        assert!(out.final_distance < 0.5, "greedy descent makes progress");
        assert_eq!(out.final_distance, out.best_distance);
    }

    #[test]
    fn trace_follows_the_declared_schedules() {
        let (pool, initial) = fermion_setup();
        let target = self_target(&initial);
        let schedule = AnnealSchedule {
            t_initial: 0.7,
            max_iterations: 150,
            stall_window: 100_000,
            ..AnnealSchedule::default()
        };
        let out = run(&pool, &initial, &target, &schedule, 4).unwrap();
        assert_eq!(out.termination, TerminationReason::MaxIterations);
        let mut t = schedule.t_initial;
        let mut w = schedule.theta_max_initial;
        for (n, rec) in out.trace.iter().enumerate() {
            assert_eq!(rec.iteration, n + 1);
            assert!(rec.proposed_op < pool.len());
            assert_eq!(rec.temperature, t, "temperature is the value used this iteration");
            assert_eq!(rec.theta_max, w);
            assert!(rec.proposed_theta.abs() <= w);
            assert!((THETA_WINDOW_MIN..=THETA_WINDOW_MAX).contains(&w));
            t *= schedule.t_decay;
            w = if rec.accepted {
                (w * schedule.theta_growth).clamp(THETA_WINDOW_MIN, THETA_WINDOW_MAX)
            } else {
                (w * schedule.theta_decay).clamp(THETA_WINDOW_MIN, THETA_WINDOW_MAX)
            };
        }
        assert!(
            out.trace.iter().any(|r| r.accepted && r.candidate_distance > 0.0),
            "a hot run accepts uphill moves away from its own target"
        );
        assert!(out.best_distance <= out.final_distance);
    }

    #[test]
    fn schedule_validation_rejects_bad_knobs() {
        let good = AnnealSchedule::default();
        assert!(good.validate().is_ok());
        for bad in [
            AnnealSchedule { t_initial: -1.0, ..good },
            AnnealSchedule { t_initial: f64::NAN, ..good },
            AnnealSchedule { t_decay: 0.0, ..good },
            AnnealSchedule { t_decay: 1.5, ..good },
            AnnealSchedule { theta_max_initial: 0.0, ..good },
            AnnealSchedule { theta_max_initial: 3.0, ..good },
            AnnealSchedule { theta_decay: 0.0, ..good },
            AnnealSchedule { theta_growth: 0.9, ..good },
            AnnealSchedule { stall_epsilon: -1e-9, ..good },
            AnnealSchedule { stall_window: 0, ..good },
            AnnealSchedule { max_iterations: 0, ..good },
        ] {
            assert!(bad.validate().is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn target_shape_mismatch_is_an_error() {
        let (pool, initial) = fermion_setup();
        let wrong = RdmTarget::new(
            RdmPayload::One(
                crate::rdm::Rdm1::new(nalgebra::DMatrix::identity(3, 3)).unwrap(),
            ),
            2,
        );
        assert!(run(&pool, &initial, &wrong, &AnnealSchedule::default(), 1).is_err());
    }
}
