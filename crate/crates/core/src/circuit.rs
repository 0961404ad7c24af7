//! Brute-force conditional-state simulation of the boxed-bomb search.
//!
//! The photon occupies `N` path modes, each carrying a horizontal (H) and a
//! vertical (V) polarization amplitude. Every gate in the circuit is real:
//! polarization rotations, projections from the bomb arm and the exit
//! polarizer, and inversion about the average across modes. There is
//! nothing complex-valued to simulate.
//!
//! The state is stored *unnormalized*. A bomb projection just zeroes the
//! vertical amplitude of the guarded mode, so the squared norm of the
//! stored vector is exactly the probability that the run is still alive
//! (no explosion, nothing dumped at a polarizer). Accessors renormalize on
//! the way out; nothing renormalizes in between, which keeps per-cycle
//! rounding from compounding.

use crate::params::{ParamError, SearchParams};

/// Real two-polarization amplitudes over `N` path modes, unnormalized so
/// that `survival()` is the per-run bookkeeping of conditional probability.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedState {
    h: Vec<f64>,
    v: Vec<f64>,
}

impl PolarizedState {
    /// Uniform horizontal superposition `sum_i |H_i> / sqrt(N)` the search
    /// starts from.
    pub fn uniform(n_boxes: usize) -> Result<Self, ParamError> {
        if n_boxes < 2 {
            return Err(ParamError::TooFewBoxes(n_boxes));
        }
        let amp = 1.0 / (n_boxes as f64).sqrt();
        Ok(PolarizedState {
            h: vec![amp; n_boxes],
            v: vec![0.0; n_boxes],
        })
    }

    /// Build a state from raw horizontal amplitudes (taken as-is, so pass a
    /// unit vector unless deliberately mid-run), vertical components zero.
    pub fn from_h_amplitudes(h: Vec<f64>) -> Result<Self, ParamError> {
        if h.len() < 2 {
            return Err(ParamError::TooFewBoxes(h.len()));
        }
        let v = vec![0.0; h.len()];
        Ok(PolarizedState { h, v })
    }

    pub fn n_modes(&self) -> usize {
        self.h.len()
    }

    fn norm_sqr(&self) -> f64 {
        self.h.iter().zip(&self.v).map(|(h, v)| h * h + v * v).sum()
    }

    /// Probability that the run has survived every projection so far.
    pub fn survival(&self) -> f64 {
        self.norm_sqr()
    }

    /// Normalized horizontal amplitude of mode `i` (0 for a dead state).
    pub fn h_amp(&self, i: usize) -> f64 {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.h[i] / n
        } else {
            0.0
        }
    }

    /// Normalized vertical amplitude of mode `i` (0 for a dead state).
    pub fn v_amp(&self, i: usize) -> f64 {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.v[i] / n
        } else {
            0.0
        }
    }

    /// Conditional probability of detecting the photon in each mode, were
    /// it measured right now (given survival to this point).
    pub fn mode_probabilities(&self) -> Vec<f64> {
        let n2 = self.norm_sqr();
        if n2 > 0.0 {
            self.h
                .iter()
                .zip(&self.v)
                .map(|(h, v)| (h * h + v * v) / n2)
                .collect()
        } else {
            vec![0.0; self.h.len()]
        }
    }

    /// Rotate the (H, V) pair of every mode by `angle`:
    /// `H -> cos * H + sin * V` column-wise, i.e. `|H> -> cos|H> + sin|V>`.
    pub(crate) fn rotate_all(&mut self, angle: f64) {
        let (s, c) = angle.sin_cos();
        for (h, v) in self.h.iter_mut().zip(self.v.iter_mut()) {
            let (hh, vv) = (*h, *v);
            *h = c * hh - s * vv;
            *v = s * hh + c * vv;
        }
    }

    /// Project every mode onto horizontal polarization (the exit
    /// polarizer), returning the conditional probability that the photon
    /// was dumped instead.
    pub(crate) fn project_h(&mut self) -> f64 {
        let before = self.norm_sqr();
        let dropped: f64 = self.v.iter().map(|v| v * v).sum();
        for v in self.v.iter_mut() {
            *v = 0.0;
        }
        if before > 0.0 {
            dropped / before
        } else {
            0.0
        }
    }

    /// One pass of every mode through its box: rotate all polarizations by
    /// `theta`, then let the bomb in `target` measure that mode's vertical
    /// arm. Returns the conditional explosion probability; on no explosion
    /// the vertical amplitude of the target is gone.
    pub fn small_cycle(&mut self, theta: f64, target: usize) -> f64 {
        self.rotate_all(theta);
        let before = self.norm_sqr();
        let vt = self.v[target];
        self.v[target] = 0.0;
        if before > 0.0 {
            vt * vt / before
        } else {
            0.0
        }
    }

    /// One full box traversal: `small_cycles` passes at `theta`, then a
    /// uniform repolarization by `-M * theta` that returns every bomb-free
    /// mode exactly to horizontal, then the exit polarizer.
    ///
    /// For `theta = pi/M` the repolarization also soaks up the overall pi
    /// phase the passes imprint, leaving non-target amplitudes untouched
    /// and the target scaled by `-cos^M theta`. For `theta = pi/(2M)` the
    /// surviving target amplitude arrives fully vertical and the polarizer
    /// dumps it: the absorbing-oracle limit. Returns the conditional
    /// probability that the photon survives the whole traversal.
    ///
    /// Expects a horizontally polarized input (which every large-cycle
    /// boundary guarantees).
    pub fn leaky_oracle(&mut self, small_cycles: usize, theta: f64, target: usize) -> f64 {
        debug_assert!(
            self.v.iter().all(|&v| v == 0.0),
            "box traversal expects an H-polarized input"
        );
        let before = self.norm_sqr();
        for _ in 0..small_cycles {
            self.small_cycle(theta, target);
        }
        self.rotate_all(-(small_cycles as f64) * theta);
        self.project_h();
        let after = self.norm_sqr();
        if before > 0.0 {
            after / before
        } else {
            1.0
        }
    }

    /// Grover diffusion: reflect every horizontal amplitude about the mode
    /// average. Orthogonal, norm-preserving, and its own inverse.
    pub fn inversion_about_average(&mut self) {
        debug_assert!(
            self.v.iter().all(|&v| v == 0.0),
            "diffusion acts on H-polarized states"
        );
        // Neumaier-compensated sum. Near-total oracle absorption leaves
        // amplitudes ~30 orders of magnitude apart, and the small ones —
        // which carry the whole surviving state one traversal later — would
        // be absorbed by a plain sum (for N = 2 the reflection degenerates
        // to an exact swap, which only the compensated form reproduces).
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &h in &self.h {
            let t = sum + h;
            comp += if sum.abs() >= h.abs() {
                (sum - t) + h
            } else {
                (h - t) + sum
            };
            sum = t;
        }
        let n = self.h.len() as f64;
        let two_mean_head = 2.0 * sum / n;
        let two_mean_tail = 2.0 * comp / n;
        for h in self.h.iter_mut() {
            *h = (two_mean_head - *h) + two_mean_tail;
        }
    }
}

/// State of the search at one large-cycle boundary, all quantities read
/// off the normalized state (`cycle_index` counts from 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeCycleRecord {
    pub cycle_index: usize,
    /// Normalized amplitude on the guarded box.
    pub tau: f64,
    /// Common normalized amplitude on every other box.
    pub alpha: f64,
    /// Conditional survival of this traversal alone.
    pub cycle_survival: f64,
    /// Probability the run is still alive after this many traversals.
    pub cumulative_survival: f64,
    /// Probability the run ends here *and* finds the target:
    /// `cumulative_survival * tau^2`.
    pub success_probability: f64,
}

/// Run the full search and report the state at every large-cycle boundary.
/// `large_cycles = 0` yields no records: the bare uniform state has
/// success probability `1/N`.
pub fn run_search(params: &SearchParams) -> Vec<LargeCycleRecord> {
    let mut state = PolarizedState::uniform(params.n_boxes()).expect("params are validated");
    let target = params.target();
    let n = params.n_boxes();
    let mut records = Vec::with_capacity(params.large_cycles());
    for cycle_index in 1..=params.large_cycles() {
        let cycle_survival = state.leaky_oracle(params.small_cycles(), params.theta(), target);
        state.inversion_about_average();
        let cumulative_survival = state.survival();
        let tau = state.h_amp(target);
        // Non-target modes see identical gates, so their amplitudes stay
        // bitwise equal; averaging is just insurance against future edits.
        let alpha = (0..n)
            .filter(|&i| i != target)
            .map(|i| state.h_amp(i))
            .sum::<f64>()
            / (n - 1) as f64;
        records.push(LargeCycleRecord {
            cycle_index,
            tau,
            alpha,
            cycle_survival,
            cumulative_survival,
            success_probability: cumulative_survival * tau * tau,
        });
    }
    records
}

/// Probability that measuring after the final large cycle finds the bomb:
/// the last record's success, or `1/N` for a zero-cycle run.
pub fn search_success(params: &SearchParams) -> f64 {
    run_search(params)
        .last()
        .map(|r| r.success_probability)
        .unwrap_or(1.0 / params.n_boxes() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Theta;
    use crate::tolerances::{
        CONSERVATION_TOLERANCE, INVOLUTION_TOLERANCE, NORMALIZATION_TOLERANCE,
    };
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn uniform(n: usize) -> PolarizedState {
        PolarizedState::uniform(n).unwrap()
    }

    #[test]
    fn uniform_state_is_flat_and_normalized() {
        let s = uniform(15);
        assert_abs_diff_eq!(s.survival(), 1.0, epsilon = NORMALIZATION_TOLERANCE);
        for i in 0..15 {
            assert_abs_diff_eq!(s.h_amp(i), 1.0 / 15f64.sqrt(), epsilon = 1e-15);
            assert_eq!(s.v_amp(i), 0.0);
        }
        assert!(PolarizedState::uniform(1).is_err());
    }

    #[test]
    fn rotation_convention_sends_h_to_sin_v() {
        // First column of the rotation is (cos, sin): an H photon acquires
        // a positive V component.
        let mut s = uniform(2);
        s.rotate_all(PI / 6.0);
        let a = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(s.h[0], a * (PI / 6.0).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.v[0], a * (PI / 6.0).sin(), epsilon = 1e-15);
    }

    #[test]
    fn small_cycle_on_pure_target_at_right_angle_always_explodes() {
        // All amplitude on the guarded box, theta = pi/2: the photon is
        // fully vertical when it meets the bomb.
        let mut s = PolarizedState::from_h_amplitudes(vec![1.0, 0.0]).unwrap();
        let p = s.small_cycle(FRAC_PI_2, 0);
        assert_abs_diff_eq!(p, 1.0, epsilon = NORMALIZATION_TOLERANCE);
        assert_abs_diff_eq!(s.survival(), 0.0, epsilon = NORMALIZATION_TOLERANCE);
    }

    #[test]
    fn small_cycle_off_target_never_explodes() {
        let mut s = PolarizedState::from_h_amplitudes(vec![0.0, 1.0]).unwrap();
        let p = s.small_cycle(0.7, 0);
        assert_eq!(p, 0.0);
        assert_abs_diff_eq!(s.survival(), 1.0, epsilon = NORMALIZATION_TOLERANCE);
        // The bystander mode is merely rotated.
        assert_abs_diff_eq!(s.h[1], 0.7f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.v[1], 0.7f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn small_cycle_uniform_fifteen_boxes() {
        // Uniform input, theta = pi/3: explosion probability is
        // sin^2(pi/3)/15 = (3/4)/15 = 0.05 exactly.
        let mut s = uniform(15);
        let p = s.small_cycle(PI / 3.0, 0);
        assert_abs_diff_eq!(p, 0.05, epsilon = 1e-15);
    }

    #[test]
    fn leaky_oracle_fifteen_boxes_three_passes() {
        // c = cos^3(pi/3) = 1/8; survival of the first traversal is
        // 1 - (1 - 1/64)/15 = 299/320 = 0.934375 exactly.
        let mut s = uniform(15);
        let surv = s.leaky_oracle(3, PI / 3.0, 0);
        assert_abs_diff_eq!(surv, 0.934375, epsilon = 1e-12);
        // Non-target amplitudes come back untouched, the target is scaled
        // by -c.
        let raw = 1.0 / 15f64.sqrt();
        assert_abs_diff_eq!(s.h[1], raw, epsilon = 1e-12);
        assert_abs_diff_eq!(s.h[0], -raw / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn leaky_oracle_with_no_target_amplitude_is_identity() {
        let mut s = PolarizedState::from_h_amplitudes(vec![0.0, 0.5, 0.5, 0.5, 0.5]).unwrap();
        let before = s.clone();
        let surv = s.leaky_oracle(4, PI / 4.0, 0);
        assert_abs_diff_eq!(surv, 1.0, epsilon = NORMALIZATION_TOLERANCE);
        for i in 0..5 {
            assert_abs_diff_eq!(s.h[i], before.h[i], epsilon = NORMALIZATION_TOLERANCE);
        }
    }

    #[test]
    fn absorbing_oracle_four_boxes() {
        // M = 1, theta = pi/2: the guarded mode is measured away entirely,
        // survival 3/4, leaving (|H_1> + |H_2> + |H_3>)/sqrt(3).
        let mut s = uniform(4);
        let surv = s.leaky_oracle(1, FRAC_PI_2, 0);
        assert_abs_diff_eq!(surv, 0.75, epsilon = NORMALIZATION_TOLERANCE);
        assert_abs_diff_eq!(s.h_amp(0), 0.0, epsilon = 1e-8);
        for i in 1..4 {
            assert_abs_diff_eq!(s.h_amp(i), 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn inversion_matches_hand_computed_four_box_case() {
        // (0, 1/sqrt3, 1/sqrt3, 1/sqrt3): mean = sqrt(3)/4, so the empty
        // slot becomes sqrt(3)/2 and the rest drop to 1/(2 sqrt(3)).
        let t = 1.0 / 3f64.sqrt();
        let mut s = PolarizedState::from_h_amplitudes(vec![0.0, t, t, t]).unwrap();
        s.inversion_about_average();
        assert_abs_diff_eq!(s.h[0], 3f64.sqrt() / 2.0, epsilon = 1e-15);
        for i in 1..4 {
            assert_abs_diff_eq!(s.h[i], 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(s.survival(), 1.0, epsilon = NORMALIZATION_TOLERANCE);
    }

    #[test]
    fn inversion_leaves_uniform_states_alone() {
        let mut s = uniform(8);
        s.inversion_about_average();
        for i in 0..8 {
            assert_abs_diff_eq!(s.h[i], 1.0 / 8f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn inversion_is_an_involution() {
        let mut s =
            PolarizedState::from_h_amplitudes(vec![0.1, -0.4, 0.3, 0.7, -0.2, 0.45]).unwrap();
        let orig = s.clone();
        s.inversion_about_average();
        s.inversion_about_average();
        for i in 0..6 {
            assert_abs_diff_eq!(s.h[i], orig.h[i], epsilon = INVOLUTION_TOLERANCE);
        }
    }

    #[test]
    fn four_box_single_query_search() {
        // The absorbing-oracle worked example: success probability 9/16.
        let params = SearchParams::new(4, 1, Theta::PiOver2M, 1, 0).unwrap();
        let records = run_search(&params);
        assert_eq!(records.len(), 1);
        let r = records[0];
        assert_abs_diff_eq!(r.cycle_survival, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(r.cumulative_survival, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(r.tau, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.success_probability, 0.5625, epsilon = 1e-12);
    }

    // Exact bookkeeping for N = 15, M = 3, theta = pi/3, carried out in
    // rationals (amplitudes in units of 1/sqrt(15)):
    //
    //   leak            c  = (1/2)^3 = 1/8
    //   after oracle    a = 1,       t = -1/8
    //   diffusion mean  mu = (14 - 1/8)/15 = 37/40
    //   after diffusion a' = 2mu - 1 = 17/20,  t' = 2mu + 1/8 = 79/40
    //   survival        1 - (1 - 1/64)/15 = 299/320
    //   norm^2 check    (14 (17/20)^2 + (79/40)^2)/15 = 299/320
    //   tau^2           (79/40)^2 / (15 * 299/320) = 6241/22425
    //   success         299/320 * 6241/22425 = 6241/24000 = 0.2600416...
    #[test]
    fn fifteen_box_single_cycle_matches_hand_rationals() {
        let params = SearchParams::new(15, 3, Theta::PiOverM, 1, 0).unwrap();
        let records = run_search(&params);
        let r = records[0];
        assert_abs_diff_eq!(r.cycle_survival, 299.0 / 320.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.tau * r.tau, 6241.0 / 22425.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.success_probability, 6241.0 / 24000.0, epsilon = 1e-12);
        let norm = (15.0_f64 * 299.0 / 320.0).sqrt();
        assert_abs_diff_eq!(r.alpha, (17.0 / 20.0) / norm, epsilon = 1e-12);
    }

    #[test]
    fn zero_cycle_run_reports_uniform_odds() {
        let params = SearchParams::new(15, 3, Theta::PiOverM, 0, 0).unwrap();
        assert!(run_search(&params).is_empty());
        assert_abs_diff_eq!(search_success(&params), 1.0 / 15.0, epsilon = 1e-15);
    }

    #[test]
    fn target_index_is_irrelevant_up_to_relabeling() {
        for target in [0usize, 3, 14] {
            let params = SearchParams::new(15, 3, Theta::PiOverM, 4, target).unwrap();
            let records = run_search(&params);
            let reference = run_search(&SearchParams::new(15, 3, Theta::PiOverM, 4, 0).unwrap());
            for (a, b) in records.iter().zip(&reference) {
                assert_abs_diff_eq!(a.tau, b.tau, epsilon = NORMALIZATION_TOLERANCE);
                assert_abs_diff_eq!(a.alpha, b.alpha, epsilon = NORMALIZATION_TOLERANCE);
                assert_abs_diff_eq!(
                    a.cumulative_survival,
                    b.cumulative_survival,
                    epsilon = NORMALIZATION_TOLERANCE
                );
            }
        }
    }

    #[test]
    fn non_target_amplitudes_stay_exchangeable() {
        let params = SearchParams::new(16, 4, Theta::PiOverM, 8, 5).unwrap();
        let mut state = PolarizedState::uniform(16).unwrap();
        for _ in 0..params.large_cycles() {
            state.leaky_oracle(params.small_cycles(), params.theta(), params.target());
            state.inversion_about_average();
            let witness = state.h_amp(0);
            for i in 0..16 {
                if i != params.target() {
                    assert_abs_diff_eq!(state.h_amp(i), witness, epsilon = NORMALIZATION_TOLERANCE);
                }
            }
            let n2: f64 = (0..16).map(|i| state.h_amp(i).powi(2)).sum();
            assert_abs_diff_eq!(n2, 1.0, epsilon = NORMALIZATION_TOLERANCE);
        }
    }

    #[test]
    fn drops_plus_survival_account_for_everything() {
        // Re-derive every dropped probability from the per-event
        // conditionals and check they sum back to 1 with the survivor.
        let (n, m, k, theta, target) = (10, 4, 6, PI / 4.0, 2);
        let mut state = PolarizedState::uniform(n).unwrap();
        let mut dropped = 0.0;
        for _ in 0..k {
            for _ in 0..m {
                let before = state.survival();
                let p = state.small_cycle(theta, target);
                dropped += p * before;
            }
            state.rotate_all(-(m as f64) * theta);
            let before = state.survival();
            dropped += state.project_h() * before;
            state.inversion_about_average();
        }
        assert_abs_diff_eq!(
            dropped + state.survival(),
            1.0,
            epsilon = CONSERVATION_TOLERANCE
        );
    }

    #[test]
    fn cumulative_survival_never_increases() {
        let params = SearchParams::new(32, 8, Theta::PiOverM, 20, 0).unwrap();
        let records = run_search(&params);
        let mut last = 1.0;
        for r in &records {
            assert!(r.cumulative_survival <= last + 1e-15);
            assert!(r.cycle_survival <= 1.0 + 1e-15 && r.cycle_survival >= 0.0);
            last = r.cumulative_survival;
        }
    }
}
