//! Numeric tolerances used across the crate.
//!
//! Everything here is a contract, not a tuning knob: tests and the
//! validation gate pin against these exact values. If an implementation
//! change needs a looser bound, that is a regression to investigate, not a
//! constant to bump.

/// Maximum absolute disagreement allowed between the brute-force circuit
/// evolution and the closed form, per grid point, for both the target
/// amplitude and the cumulative survival. The two routes share no code
/// beyond `f64`, so agreement at this level over hundreds of points is
/// strong evidence both are right.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-10;

/// Squared norm of any state exposed to callers must be within this of 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Cumulative explosion-or-loss probability plus survival must equal 1
/// within this, summed over an entire run.
pub const CONSERVATION_TOLERANCE: f64 = 1e-12;

/// Applying inversion about the average twice must return the input within
/// this (it is an orthogonal involution; only rounding survives).
pub const INVOLUTION_TOLERANCE: f64 = 1e-15;

/// Imaginary residue allowed on normalized closed-form amplitudes. The
/// unnormalized pair can be purely imaginary when phi is, but the common
/// factor cancels in the quotient; anything bigger than rounding here
/// means a branch-cut mistake.
pub const REALITY_TOLERANCE: f64 = 1e-12;

/// Half-width of the band around |cos phi| = 1 classified as Critical.
pub const CRITICAL_REGIME_TOLERANCE: f64 = 1e-12;

/// Normalizer magnitudes below this are reported as underflow instead of
/// being divided through.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// Slack granted to the survival lower bound `cos^(2kM) theta` before a
/// violation is reported (the bound is exact in real arithmetic).
pub const SURVIVAL_BOUND_SLACK: f64 = 1e-12;

/// Two success probabilities within this of each other are treated as tied
/// when picking the optimal number of large cycles (ties and plateaus
/// resolve toward smaller k).
pub const PLATEAU_TOLERANCE: f64 = 1e-12;

// Compile-time guards. The cross-route gate is the loosest bound;
// per-state rounding bounds sit below it; the involution bound is pure
// rounding. Editing a constant out of order breaks the build right here.
const _: () = {
    assert!(EQUIVALENCE_TOLERANCE > NORMALIZATION_TOLERANCE);
    assert!(NORMALIZATION_TOLERANCE >= CONSERVATION_TOLERANCE);
    assert!(CONSERVATION_TOLERANCE > INVOLUTION_TOLERANCE);
    assert!(UNDERFLOW_FLOOR > 0.0 && UNDERFLOW_FLOOR < f64::MIN_POSITIVE * 1e10);

    let all = [
        EQUIVALENCE_TOLERANCE,
        NORMALIZATION_TOLERANCE,
        CONSERVATION_TOLERANCE,
        INVOLUTION_TOLERANCE,
        REALITY_TOLERANCE,
        CRITICAL_REGIME_TOLERANCE,
        UNDERFLOW_FLOOR,
        SURVIVAL_BOUND_SLACK,
        PLATEAU_TOLERANCE,
    ];
    let mut i = 0;
    while i < all.len() {
        assert!(all[i].is_finite() && all[i] > 0.0);
        i += 1;
    }
};
