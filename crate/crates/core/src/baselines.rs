//! Reference points the search is judged against: classical guessing,
//! ideal (lossless-oracle) Grover, and the single-box bomb test.

use thiserror::Error;

use crate::closed_form::leak_factor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("classical search cannot spend {queries} queries on {n_boxes} boxes")]
    QueriesExceedBoxes { queries: usize, n_boxes: usize },
}

/// Probability that opening `queries` distinct boxes out of `n_boxes`
/// uncovers the bomb: `queries / N`.
pub fn classical_success(n_boxes: usize, queries: usize) -> Result<f64, BaselineError> {
    assert!(n_boxes >= 2, "the search needs at least two boxes");
    if queries > n_boxes {
        return Err(BaselineError::QueriesExceedBoxes { queries, n_boxes });
    }
    Ok(queries as f64 / n_boxes as f64)
}

/// Ideal Grover success after `iterations` oracle calls on `n_boxes`
/// items: `sin^2((2k + 1) arcsin(1/sqrt(N)))`.
pub fn grover_success(n_boxes: usize, iterations: usize) -> f64 {
    assert!(n_boxes >= 2, "the search needs at least two boxes");
    let beta = (1.0 / (n_boxes as f64).sqrt()).asin();
    ((2 * iterations + 1) as f64 * beta).sin().powi(2)
}

/// Oracle queries a `large_cycles`-round run spends: one per pass, `k * M`.
pub fn query_count(large_cycles: usize, small_cycles: usize) -> usize {
    large_cycles * small_cycles
}

/// What one interferometer pass sequence does to a single box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleBoxOutcome {
    /// Probability the bomb fires during the `M` passes.
    pub explosion_probability: f64,
    /// Polarization angle of the photon when it exits (given no
    /// explosion): `M * theta` past a bomb-free box, `0` past a guarded
    /// one.
    pub exit_polarization: f64,
}

/// Single-box interaction-free measurement: `M` passes at `theta` through
/// one box that either does or does not hold the bomb.
pub fn ifm_single(small_cycles: usize, theta: f64, bomb_present: bool) -> SingleBoxOutcome {
    assert!(small_cycles >= 1, "need at least one pass");
    if bomb_present {
        let c = leak_factor(small_cycles, theta);
        SingleBoxOutcome {
            explosion_probability: 1.0 - c * c,
            exit_polarization: 0.0,
        }
    } else {
        SingleBoxOutcome {
            explosion_probability: 0.0,
            exit_polarization: small_cycles as f64 * theta,
        }
    }
}

/// One line of a baseline comparison at a fixed query budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub n_boxes: usize,
    pub queries: usize,
    pub small_cycles: usize,
    pub large_cycles: usize,
    pub theta: f64,
    pub classical: f64,
    pub grover: f64,
    pub ifm_grover: f64,
}
