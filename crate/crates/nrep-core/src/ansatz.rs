//! Product-of-exponentials ansatz over a pool of generators.
//!
//! The ansatz is the ordered product `U = A_n ... A_2 A_1` with
//! `A = exp(theta * P)`, `P` drawn from an [`OperatorPool`]. Growth is
//! append-only: [`Ansatz::extend`] returns a new value and leaves the old
//! one usable, and the evolved state is carried along so a length-`L`
//! ansatz never costs `O(L)` to evaluate. [`Ansatz::evolve_from_scratch`]
//! replays the product from the initial state and is the independent check
//! that cached and recomputed states agree.
//!
//! Exponentials are applied as a truncated Taylor series in the sparse
//! generator; the result is renormalized, which pins the state's norm
//! against accumulated rounding over long products.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{SparseOperator, StateVector};
use crate::pool::{OperatorPool, PoolKind};

/// Taylor term-norm convergence threshold.
pub const EXP_TERM_TOLERANCE: f64 = 1e-15;
/// Hard cap on Taylor terms before reporting non-convergence.
pub const EXP_MAX_TERMS: usize = 60;

const ANSATZ_MAGIC: &str = "NREP-ANSATZ";
const ANSATZ_VERSION: &str = "v1";

/// One ansatz factor: which pool generator, and its amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzElement {
    pub pool_index: usize,
    pub theta: f64,
}

/// Applies `exp(theta * op)` to `v` by summing the Taylor series until the
/// running term's norm drops below [`EXP_TERM_TOLERANCE`], then renormalizes.
/// Errors if the series has not converged after [`EXP_MAX_TERMS`] terms.
pub fn apply_exponential(
    op: &SparseOperator,
    theta: f64,
    v: &StateVector,
) -> Result<StateVector> {
    if !theta.is_finite() {
        return Err(Error::domain(format!("theta must be finite, got {theta}")));
    }
    let mut acc = v.clone();
    let mut term = v.clone();
    let mut converged = false;
    for k in 1..=EXP_MAX_TERMS {
        term = op.apply(&term)?;
        term.scale(Complex64::new(theta / k as f64, 0.0));
        acc.add_scaled(Complex64::ONE, &term)?;
        if term.norm() < EXP_TERM_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numerical(format!(
            "exponential Taylor series did not converge in {EXP_MAX_TERMS} terms \
             (theta = {theta}, generator norm ~ {:.3e})",
            op.norm_fro()
        )));
    }
    acc.normalize()?;
    Ok(acc)
}

/// Append-only product ansatz with its evolved state cached.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pool: Arc<OperatorPool>,
    initial: StateVector,
    elements: Vec<AnsatzElement>,
    current: StateVector,
}

impl Ansatz {
    /// Empty ansatz: the identity product on a normalized initial state.
    pub fn new(pool: &Arc<OperatorPool>, initial: StateVector) -> Result<Ansatz> {
        if !pool.basis().compatible(initial.basis()) {
            return Err(Error::mismatch("initial state basis differs from pool basis"));
        }
        if (initial.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!(
                "initial state must be normalized, norm = {}",
                initial.norm()
            )));
        }
        Ok(Ansatz {
            pool: Arc::clone(pool),
            current: initial.clone(),
            initial,
            elements: Vec::new(),
        })
    }

    /// Appends one factor. `cached_state` must be
    /// `apply_exponential(generator, theta, current)` as computed by the
    /// caller (the annealer already evaluated the candidate, so the state is
    /// reused rather than recomputed); replay tests enforce the contract.
    pub fn extend(&self, element: AnsatzElement, cached_state: StateVector) -> Result<Ansatz> {
        if element.pool_index >= self.pool.len() {
            return Err(Error::domain(format!(
                "pool index {} out of range for {} operators",
                element.pool_index,
                self.pool.len()
            )));
        }
        if !element.theta.is_finite() {
            return Err(Error::domain("theta must be finite"));
        }
        if !cached_state.basis().compatible(self.current.basis()) {
            return Err(Error::mismatch("cached state basis differs from ansatz basis"));
        }
        let mut elements = self.elements.clone();
        elements.push(element);
        Ok(Ansatz {
            pool: Arc::clone(&self.pool),
            initial: self.initial.clone(),
            elements,
            current: cached_state,
        })
    }

    /// Recomputes the evolved state by replaying every factor from the
    /// initial state.
    pub fn evolve_from_scratch(&self) -> Result<StateVector> {
        let mut state = self.initial.clone();
        for el in &self.elements {
            let op = self.pool.operator_at(el.pool_index)?;
            state = apply_exponential(&op.matrix, el.theta, &state)?;
        }
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[AnsatzElement] {
        &self.elements
    }

    pub fn pool(&self) -> &Arc<OperatorPool> {
        &self.pool
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial
    }

    pub fn current_state(&self) -> &StateVector {
        &self.current
    }

    /// Rebuilds an ansatz by replaying stored elements (used after reading
    /// one back from disk).
    pub fn from_elements(
        pool: &Arc<OperatorPool>,
        initial: StateVector,
        elements: Vec<AnsatzElement>,
    ) -> Result<Ansatz> {
        let mut ansatz = Ansatz::new(pool, initial)?;
        ansatz.elements = elements;
        ansatz.current = ansatz.evolve_from_scratch()?;
        Ok(ansatz)
    }
}

/// Serialized form, one factor per line after the header:
///
/// ```text
/// NREP-ANSATZ v1 <pool_kind> <num_modes> <particle_count>
/// <pool_index> <theta>
/// ```
///
/// Theta is written with 17 significant digits so the round trip is exact.
pub fn ansatz_to_string(ansatz: &Ansatz) -> Result<String> {
    let basis = ansatz.pool().basis();
    let particles = basis.particle_count().ok_or_else(|| {
        Error::domain("only single-sector ansatz bases can be serialized")
    })?;
    let mut out = format!(
        "{ANSATZ_MAGIC} {ANSATZ_VERSION} {} {} {}\n",
        ansatz.pool().kind().token(),
        basis.num_modes(),
        particles
    );
    for el in ansatz.elements() {
        out.push_str(&format!("{} {:.16e}\n", el.pool_index, el.theta));
    }
    Ok(out)
}

pub fn write_ansatz(ansatz: &Ansatz, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, ansatz_to_string(ansatz)?)?;
    Ok(())
}

/// Parses a serialized ansatz and validates its header against `pool`.
pub fn read_ansatz_elements(
    path: impl AsRef<Path>,
    pool: &OperatorPool,
) -> Result<Vec<AnsatzElement>> {
    let text = fs::read_to_string(path)?;
    parse_ansatz_text(&text, pool)
}

pub fn parse_ansatz_text(text: &str, pool: &OperatorPool) -> Result<Vec<AnsatzElement>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty ansatz file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != ANSATZ_MAGIC || fields[1] != ANSATZ_VERSION {
        return Err(Error::parse(
            1,
            format!("expected '{ANSATZ_MAGIC} {ANSATZ_VERSION} <pool> <modes> <particles>', got '{header}'"),
        ));
    }
    let kind = PoolKind::from_token(fields[2])
        .ok_or_else(|| Error::parse(1, format!("unknown pool kind '{}'", fields[2])))?;
    if kind != pool.kind() {
        return Err(Error::parse(
            1,
            format!("ansatz pool kind {} does not match pool {}", kind, pool.kind()),
        ));
    }
    let modes: usize = fields[3]
        .parse()
        .map_err(|_| Error::parse(1, format!("bad mode count '{}'", fields[3])))?;
    let particles: usize = fields[4]
        .parse()
        .map_err(|_| Error::parse(1, format!("bad particle count '{}'", fields[4])))?;
    let basis = pool.basis();
    if modes != basis.num_modes() || Some(particles) != basis.particle_count() {
        return Err(Error::parse(
            1,
            format!(
                "ansatz system ({modes} modes, {particles} particles) does not match pool \
                 ({} modes, {:?} particles)",
                basis.num_modes(),
                basis.particle_count()
            ),
        ));
    }
    let mut elements = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::parse(
                line_no,
                format!("expected '<pool_index> <theta>', got '{trimmed}'"),
            ));
        }
        let pool_index: usize = parts[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad pool index '{}'", parts[0])))?;
        if pool_index >= pool.len() {
            return Err(Error::parse(
                line_no,
                format!("pool index {pool_index} out of range for {} operators", pool.len()),
            ));
        }
        let theta: f64 = parts[1]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad theta '{}'", parts[1])))?;
        if !theta.is_finite() {
            return Err(Error::parse(line_no, "theta must be finite"));
        }
        elements.push(AnsatzElement { pool_index, theta });
    }
    Ok(elements)
}
