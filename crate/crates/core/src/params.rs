//! Validated run parameters shared by the simulator and the closed form.

use std::f64::consts::PI;

use thiserror::Error;

/// Rejected parameter combinations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("search needs at least 2 boxes, got {0}")]
    TooFewBoxes(usize),
    #[error("need at least 1 polarization pass per box traversal")]
    ZeroSmallCycles,
    #[error("rotation angle must be finite and in (0, pi], got {0}")]
    ThetaOutOfRange(f64),
    #[error("target box {target} out of range for {n_boxes} boxes")]
    TargetOutOfRange { target: usize, n_boxes: usize },
    #[error("trajectory sampling needs at least one trial")]
    ZeroTrials,
}

/// Per-pass polarization rotation angle, either explicit or one of the two
/// presets the interferometer is normally tuned to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta {
    /// Explicit angle in radians.
    Radians(f64),
    /// `pi/M`: after M passes a bomb-free mode returns to horizontal and a
    /// guarded box imprints a pi phase (the lossless-in-the-limit tuning).
    PiOverM,
    /// `pi/(2M)`: a guarded box acts as an absorbing, fully distinguishing
    /// oracle.
    PiOver2M,
}

impl Theta {
    /// Resolve to radians for a given number of passes per traversal.
    pub fn radians(self, small_cycles: usize) -> f64 {
        match self {
            Theta::Radians(t) => t,
            Theta::PiOverM => PI / small_cycles as f64,
            Theta::PiOver2M => PI / (2 * small_cycles) as f64,
        }
    }
}

/// A validated search configuration.
///
/// `n_boxes` is the number of path modes (N >= 2: with a single box there
/// is nothing to search), `small_cycles` the number of rotation passes per
/// box traversal (M), `large_cycles` the number of oracle-plus-diffusion
/// rounds (k, may be 0), and `target` the index of the guarded box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    n_boxes: usize,
    small_cycles: usize,
    theta: f64,
    large_cycles: usize,
    target: usize,
}

impl SearchParams {
    pub fn new(
        n_boxes: usize,
        small_cycles: usize,
        theta: Theta,
        large_cycles: usize,
        target: usize,
    ) -> Result<Self, ParamError> {
        if n_boxes < 2 {
            return Err(ParamError::TooFewBoxes(n_boxes));
        }
        if small_cycles == 0 {
            return Err(ParamError::ZeroSmallCycles);
        }
        let theta = theta.radians(small_cycles);
        if !theta.is_finite() || theta <= 0.0 || theta > PI {
            return Err(ParamError::ThetaOutOfRange(theta));
        }
        if target >= n_boxes {
            return Err(ParamError::TargetOutOfRange { target, n_boxes });
        }
        Ok(SearchParams {
            n_boxes,
            small_cycles,
            theta,
            large_cycles,
            target,
        })
    }

    pub fn n_boxes(&self) -> usize {
        self.n_boxes
    }

    pub fn small_cycles(&self) -> usize {
        self.small_cycles
    }

    /// Resolved rotation angle in radians.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn large_cycles(&self) -> usize {
        self.large_cycles
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Total number of box queries the run spends: one per box traversal,
    /// `large_cycles * small_cycles` in all.
    pub fn query_budget(&self) -> usize {
        self.large_cycles * self.small_cycles
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve_against_small_cycles() {
        assert_eq!(Theta::PiOverM.radians(4), PI / 4.0);
        assert_eq!(Theta::PiOver2M.radians(4), PI / 8.0);
        assert_eq!(Theta::Radians(0.3).radians(4), 0.3);
    }

    #[test]
    fn single_box_is_rejected() {
        // N = 1 would make the diffusion a no-op and the "search" vacuous.
        let err = SearchParams::new(1, 3, Theta::PiOverM, 1, 0).unwrap_err();
        assert_eq!(err, ParamError::TooFewBoxes(1));
    }

    #[test]
    fn bad_angles_are_rejected() {
        assert!(matches!(
            SearchParams::new(4, 2, Theta::Radians(0.0), 1, 0),
            Err(ParamError::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            SearchParams::new(4, 2, Theta::Radians(PI + 0.1), 1, 0),
            Err(ParamError::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            SearchParams::new(4, 2, Theta::Radians(f64::NAN), 1, 0),
            Err(ParamError::ThetaOutOfRange(_))
        ));
        // pi itself is allowed (it is pi/M for M = 1).
        assert!(SearchParams::new(4, 1, Theta::PiOverM, 1, 0).is_ok());
    }

    #[test]
    fn target_and_cycle_bounds() {
        assert!(matches!(
            SearchParams::new(4, 2, Theta::PiOverM, 1, 4),
            Err(ParamError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            SearchParams::new(4, 0, Theta::PiOverM, 1, 0),
            Err(ParamError::ZeroSmallCycles)
        ));
        // Zero large cycles is a legal (if pointless) run.
        assert!(SearchParams::new(4, 2, Theta::PiOverM, 0, 0).is_ok());
    }

    #[test]
    fn query_budget_is_cycles_times_passes() {
        let p = SearchParams::new(15, 3, Theta::PiOverM, 2, 0).unwrap();
        assert_eq!(p.query_budget(), 6);
    }
}
