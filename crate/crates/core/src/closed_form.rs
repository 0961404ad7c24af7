//! Closed-form solution of the two-amplitude recursion.
//!
//! By symmetry the search state is described by two numbers: the amplitude
//! `tau` on the guarded box and the common amplitude `alpha` on every
//! other box. With the phase-oracle tuning (`theta = pi/M`) one large
//! cycle acts linearly on the pair, and the k-th boundary has, up to a
//! common factor,
//!
//! ```text
//! alpha~(k) = -c sin(k phi) + sqrt(c) sin((k+1) phi)
//! tau~(k)   =    sin(k phi) + sqrt(c) sin((k+1) phi)
//! cos(phi)  = (1 - 2/N) (1 + c) / (2 sqrt(c)),   c = cos^M(theta)
//! ```
//!
//! `cos(phi)` may exceed 1, in which case `phi` is purely imaginary, the
//! sines turn hyperbolic, and the target amplitude saturates instead of
//! oscillating. Everything is evaluated through one complex code path —
//! including the near-confluent region `cos(phi) ~ 1` — and the common
//! (possibly imaginary) factor drops out when the pair is normalized, so
//! the normalized outputs are real. They are asserted real rather than
//! truncated: a branch mistake should fail loudly, not skew a plot.

use num_complex::Complex64;
use thiserror::Error;

use crate::tolerances::{CRITICAL_REGIME_TOLERANCE, REALITY_TOLERANCE, UNDERFLOW_FLOOR};

/// Inputs on which the closed form is undefined.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    /// `cos^M(theta) <= 0`: the per-traversal leak factor degenerates and
    /// the recursion solution does not apply (for example M = 1 with
    /// theta = pi, where c = -1).
    #[error("leak factor cos^M(theta) = {leak} is not positive; the closed form needs c > 0")]
    DegenerateLeak { leak: f64 },
    /// The normalizer underflowed; amplitudes at this k are not
    /// representable (only reachable at the exact confluent point).
    #[error("normalizer magnitude {magnitude} below representable floor")]
    NormalizationUnderflow { magnitude: f64 },
}

/// Which branch of the evolution a parameter set lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `|cos phi| < 1`: real phi, the amplitudes precess like ideal Grover.
    Oscillation,
    /// `|cos phi| > 1`: imaginary phi, the target amplitude climbs to a
    /// fixed point and stays there.
    Saturation,
    /// Within tolerance of the confluent boundary `|cos phi| = 1`.
    Critical,
}

/// The per-cycle rotation angle of the two-amplitude recursion, possibly
/// complex, plus the leak factor it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParameter {
    pub cos_phi: f64,
    pub phi: Complex64,
    pub regime: Regime,
    /// `c = cos^M(theta)`.
    pub leak: f64,
}

/// `cos^M(theta)`, evaluated as `exp(M ln cos theta)` when `cos theta > 0`
/// so that large M underflows gracefully instead of losing accuracy to
/// repeated multiplication.
pub(crate) fn leak_factor(small_cycles: usize, theta: f64) -> f64 {
    let c = theta.cos();
    let m = small_cycles as f64;
    if c > 0.0 {
        (m * c.ln()).exp()
    } else if c == 0.0 {
        0.0
    } else {
        let magnitude = (m * (-c).ln()).exp();
        if small_cycles.is_multiple_of(2) {
            magnitude
        } else {
            -magnitude
        }
    }
}

/// Build the phase parameter for `n_boxes` boxes and `small_cycles` passes
/// at angle `theta`. Fails on a non-positive leak factor.
pub fn phase_parameter(
    n_boxes: usize,
    small_cycles: usize,
    theta: f64,
) -> Result<PhaseParameter, ClosedFormError> {
    assert!(n_boxes >= 2, "the search needs at least two boxes");
    assert!(small_cycles >= 1, "need at least one pass per traversal");
    let leak = leak_factor(small_cycles, theta);
    if leak <= 0.0 {
        return Err(ClosedFormError::DegenerateLeak { leak });
    }
    let cos_phi = (1.0 - 2.0 / n_boxes as f64) * (1.0 + leak) / (2.0 * leak.sqrt());
    // cos_phi is real and non-negative, so phi is either real (oscillation)
    // or purely imaginary (saturation). Branching on the two real inverse
    // functions stays accurate even when cos_phi is enormous (tiny leak),
    // where a complex acos would cancel catastrophically; taking acosh >= 0
    // picks the root whose saturation-side amplitudes carry the same signs
    // the circuit produces.
    let phi = if cos_phi >= 1.0 {
        Complex64::new(0.0, cos_phi.acosh())
    } else {
        Complex64::new(cos_phi.acos(), 0.0)
    };
    let regime = if (cos_phi - 1.0).abs() <= CRITICAL_REGIME_TOLERANCE {
        Regime::Critical
    } else if cos_phi > 1.0 {
        Regime::Saturation
    } else {
        Regime::Oscillation
    };
    Ok(PhaseParameter {
        cos_phi,
        phi,
        regime,
        leak,
    })
}

/// Normalized amplitudes at the k-th large-cycle boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub k: usize,
    /// Common amplitude on each of the `N - 1` unguarded boxes.
    pub alpha: f64,
    /// Amplitude on the guarded box.
    pub tau: f64,
}

/// `sin(z) * exp(-damp)` without overflowing for large `|Im z|`.
///
/// Written out through `sin(a + ib) = sin a cosh b + i cos a sinh b` with
/// the exponentials of `cosh`/`sinh` damped individually; exact (it *is*
/// `sin`) when `damp = 0` and `z` is real. Requires `damp >= |Im z|` so
/// every exponent is non-positive.
fn damped_sin(z: Complex64, damp: f64) -> Complex64 {
    debug_assert!(damp >= z.im.abs() - 1e-9);
    let (a, b) = (z.re, z.im);
    let ep = (b - damp).exp();
    let em = (-b - damp).exp();
    Complex64::new(a.sin() * (ep + em) / 2.0, a.cos() * (ep - em) / 2.0)
}

fn raw_pair(pp: &PhaseParameter, k: usize) -> (Complex64, Complex64) {
    if pp.cos_phi == 0.0 {
        // N = 2 pins cos phi to exactly 0, i.e. phi = pi/2. sin(k pi/2)
        // cycles through {0, 1, 0, -1} exactly, but evaluating it as
        // sin(k * acos(0)) in floating point leaves residues ~k eps that
        // swamp the sqrt(leak)-sized terms when the leak is tiny. Use the
        // exact quarter-period values instead.
        let quarter = |j: usize| match j % 4 {
            0 => 0.0,
            1 => 1.0,
            2 => 0.0,
            _ => -1.0,
        };
        let (sk, sk1) = (quarter(k), quarter(k + 1));
        let sqrt_c = pp.leak.sqrt();
        return (
            Complex64::new(-pp.leak * sk + sqrt_c * sk1, 0.0),
            Complex64::new(sk + sqrt_c * sk1, 0.0),
        );
    }
    if pp.phi.norm() == 0.0 {
        // cos phi is exactly 1 (degenerate eigenvalue; e.g. N = 10, M = 4):
        // sin(k phi) vanishes identically, but sin(k phi)/sin(phi) -> k is
        // the exact solution of the recursion there, and the dropped
        // sin(phi) is a common factor normalization removes anyway.
        let (uk, uk1) = (k as f64, k as f64 + 1.0);
        let sqrt_c = pp.leak.sqrt();
        return (
            Complex64::new(-pp.leak * uk + sqrt_c * uk1, 0.0),
            Complex64::new(uk + sqrt_c * uk1, 0.0),
        );
    }
    // One shared damping factor keeps the linear combination intact while
    // sinh((k+1)|Im phi|) stays representable at any k.
    let damp = (k as f64 + 1.0) * pp.phi.im.abs();
    let sk = damped_sin(pp.phi * k as f64, damp);
    let sk1 = damped_sin(pp.phi * (k as f64 + 1.0), damp);
    let sqrt_c = Complex64::new(pp.leak.sqrt(), 0.0);
    let alpha_raw = -pp.leak * sk + sqrt_c * sk1;
    let tau_raw = sk + sqrt_c * sk1;
    (alpha_raw, tau_raw)
}

fn normalized_pair(
    n_boxes: usize,
    pp: &PhaseParameter,
    k: usize,
) -> Result<(f64, f64), ClosedFormError> {
    let (alpha_raw, tau_raw) = raw_pair(pp, k);
    let eta = ((n_boxes as f64 - 1.0) * alpha_raw * alpha_raw + tau_raw * tau_raw).sqrt();
    if eta.norm() < UNDERFLOW_FLOOR {
        return Err(ClosedFormError::NormalizationUnderflow {
            magnitude: eta.norm(),
        });
    }
    let alpha = alpha_raw / eta;
    let tau = tau_raw / eta;
    assert!(
        alpha.im.abs() < REALITY_TOLERANCE && tau.im.abs() < REALITY_TOLERANCE,
        "normalized amplitudes must be real (Im alpha = {}, Im tau = {}): branch-cut bug",
        alpha.im,
        tau.im
    );
    Ok((alpha.re, tau.re))
}

/// Closed-form amplitudes after `k` large cycles at `theta`.
pub fn amplitudes(
    n_boxes: usize,
    small_cycles: usize,
    theta: f64,
    k: usize,
) -> Result<AmplitudePair, ClosedFormError> {
    let pp = phase_parameter(n_boxes, small_cycles, theta)?;
    let (alpha, tau) = normalized_pair(n_boxes, &pp, k)?;
    Ok(AmplitudePair { k, alpha, tau })
}

/// Survival probability after `k` large cycles, with the floor it can
/// never fall below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Survival {
    /// Probability no explosion and no dump occurred in `k` traversals.
    pub cumulative: f64,
    /// `cos^(2kM)(theta)`: the survival of `kM` consecutive passes with
    /// the photon sitting entirely on the guarded box.
    pub lower_bound: f64,
}

/// Cumulative survival `prod_i (1 - tau(i-1)^2 (1 - c^2))`.
pub fn survival(
    n_boxes: usize,
    small_cycles: usize,
    theta: f64,
    k: usize,
) -> Result<Survival, ClosedFormError> {
    let pp = phase_parameter(n_boxes, small_cycles, theta)?;
    let mut cumulative = 1.0;
    for i in 0..k {
        let (_, tau) = normalized_pair(n_boxes, &pp, i)?;
        cumulative *= 1.0 - tau * tau * (1.0 - pp.leak * pp.leak);
    }
    Ok(Survival {
        cumulative,
        lower_bound: (pp.leak * pp.leak).powi(k as i32),
    })
}

/// `survival * tau^2`: probability the run lasts `k` large cycles and the
/// final measurement lands on the guarded box.
pub fn success_probability(
    n_boxes: usize,
    small_cycles: usize,
    theta: f64,
    k: usize,
) -> Result<f64, ClosedFormError> {
    let pp = phase_parameter(n_boxes, small_cycles, theta)?;
    let mut cumulative = 1.0;
    let mut tau_prev = 0.0;
    for i in 0..=k {
        let (_, tau) = normalized_pair(n_boxes, &pp, i)?;
        if i > 0 {
            cumulative *= 1.0 - tau_prev * tau_prev * (1.0 - pp.leak * pp.leak);
        }
        tau_prev = tau;
    }
    Ok(cumulative * tau_prev * tau_prev)
}

/// One row of the closed-form evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionPoint {
    pub k: usize,
    pub alpha: f64,
    pub tau: f64,
    pub survival: f64,
    pub success: f64,
}

/// The whole table `k = 0 ..= k_max` in one pass (the survival product is
/// built incrementally, so this is linear in `k_max`).
pub fn evolution(
    n_boxes: usize,
    small_cycles: usize,
    theta: f64,
    k_max: usize,
) -> Result<Vec<EvolutionPoint>, ClosedFormError> {
    let pp = phase_parameter(n_boxes, small_cycles, theta)?;
    let loss = 1.0 - pp.leak * pp.leak;
    let mut rows = Vec::with_capacity(k_max + 1);
    let mut cumulative = 1.0;
    let mut tau_prev = 0.0;
    for k in 0..=k_max {
        let (alpha, tau) = normalized_pair(n_boxes, &pp, k)?;
        if k > 0 {
            cumulative *= 1.0 - tau_prev * tau_prev * loss;
        }
        rows.push(EvolutionPoint {
            k,
            alpha,
            tau,
            survival: cumulative,
            success: cumulative * tau * tau,
        });
        tau_prev = tau;
    }
    Ok(rows)
}
