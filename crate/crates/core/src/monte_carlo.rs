//! Trajectory sampling over the conditional-state evolution.
//!
//! Between measurement events the photon's conditional state is
//! deterministic, so a run is fully described by the ladder of conditional
//! event probabilities: at each pass the bomb either fires or it doesn't,
//! at each traversal exit the polarizer either dumps the photon or not,
//! and a surviving run ends with a box detection. The ladder is computed
//! once with the exact simulator; each trajectory is then a walk down it.
//!
//! Trial `i` draws from a counter-based stream keyed on `(seed, i)`, so
//! the tally is independent of execution order and reproducible across
//! machines.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::PolarizedState;
use crate::params::{ParamError, SearchParams};

/// Conditional event probabilities for one box traversal.
#[derive(Debug, Clone)]
struct TraversalEvents {
    /// Explosion probability at each pass, given survival so far.
    explosion: Vec<f64>,
    /// Polarizer-dump probability at the traversal exit, given survival.
    dump: f64,
}

/// Absolute (unconditional) probabilities of every way a run can end.
/// Cycle indices count from 1, modes from 0.
#[derive(Debug, Clone)]
pub struct EventProbabilities {
    explosions: BTreeMap<(usize, usize), f64>,
    dumps: BTreeMap<usize, f64>,
    detections: Vec<f64>,
}

impl EventProbabilities {
    /// Probability the bomb fires at `(large_cycle, small_cycle)`.
    pub fn explosions(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.explosions
    }

    /// Probability the photon is dumped at the exit of `large_cycle`.
    pub fn dumps(&self) -> &BTreeMap<usize, f64> {
        &self.dumps
    }

    /// Probability the run survives and the photon lands in each box.
    pub fn detections(&self) -> &[f64] {
        &self.detections
    }
}

/// Tally of how `trials` independent runs ended. Every trial lands in
/// exactly one bucket, so the counts always sum to `trials`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeDistribution {
    trials: u64,
    explosions: BTreeMap<(usize, usize), u64>,
    dumps: BTreeMap<usize, u64>,
    detections: BTreeMap<usize, u64>,
}

impl OutcomeDistribution {
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn explosions(&self) -> &BTreeMap<(usize, usize), u64> {
        &self.explosions
    }

    pub fn dumps(&self) -> &BTreeMap<usize, u64> {
        &self.dumps
    }

    pub fn detections(&self) -> &BTreeMap<usize, u64> {
        &self.detections
    }

    pub fn explosion_total(&self) -> u64 {
        self.explosions.values().sum()
    }

    pub fn dump_total(&self) -> u64 {
        self.dumps.values().sum()
    }

    pub fn detection_count(&self, mode: usize) -> u64 {
        self.detections.get(&mode).copied().unwrap_or(0)
    }
}

fn event_ladder(params: &SearchParams) -> (Vec<TraversalEvents>, Vec<f64>) {
    let mut state = PolarizedState::uniform(params.n_boxes()).expect("params are validated");
    let m = params.small_cycles();
    let theta = params.theta();
    let mut ladder = Vec::with_capacity(params.large_cycles());
    for _ in 0..params.large_cycles() {
        let mut explosion = Vec::with_capacity(m);
        for _ in 0..m {
            explosion.push(state.small_cycle(theta, params.target()));
        }
        state.rotate_all(-(m as f64) * theta);
        let dump = state.project_h();
        state.inversion_about_average();
        ladder.push(TraversalEvents { explosion, dump });
    }
    (ladder, state.mode_probabilities())
}

/// Sample `trials` runs of the search described by `params`.
///
/// The fate of trial `i` depends only on `(seed, i)`; re-running with the
/// same arguments reproduces the tally bit for bit.
pub fn monte_carlo(
    params: &SearchParams,
    trials: u64,
    seed: u64,
) -> Result<OutcomeDistribution, ParamError> {
    if trials == 0 {
        return Err(ParamError::ZeroTrials);
    }
    let (ladder, detection) = event_ladder(params);
    // Cumulative detection distribution for the surviving trials.
    let mut detection_cdf = Vec::with_capacity(detection.len());
    let mut acc = 0.0;
    for p in &detection {
        acc += p;
        detection_cdf.push(acc);
    }

    let mut out = OutcomeDistribution {
        trials,
        explosions: BTreeMap::new(),
        dumps: BTreeMap::new(),
        detections: BTreeMap::new(),
    };
    'trial: for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        for (ci, traversal) in ladder.iter().enumerate() {
            for (si, &p) in traversal.explosion.iter().enumerate() {
                if rng.gen::<f64>() < p {
                    *out.explosions.entry((ci + 1, si + 1)).or_insert(0) += 1;
                    continue 'trial;
                }
            }
            if rng.gen::<f64>() < traversal.dump {
                *out.dumps.entry(ci + 1).or_insert(0) += 1;
                continue 'trial;
            }
        }
        let u: f64 = rng.gen();
        let mode = detection_cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(detection_cdf.len() - 1);
        *out.detections.entry(mode).or_insert(0) += 1;
    }
    debug_assert_eq!(
        out.explosion_total() + out.dump_total() + out.detections.values().sum::<u64>(),
        trials,
        "every trial lands in exactly one bucket"
    );
    Ok(out)
}

/// Exact probability of every terminal event for the run described by
/// `params`; the reference the sampler is tested against.
pub fn event_probabilities(params: &SearchParams) -> EventProbabilities {
    let (ladder, detection) = event_ladder(params);
    let mut explosions = BTreeMap::new();
    let mut dumps = BTreeMap::new();
    let mut alive = 1.0;
    for (ci, traversal) in ladder.iter().enumerate() {
        for (si, &p) in traversal.explosion.iter().enumerate() {
            explosions.insert((ci + 1, si + 1), p * alive);
            alive *= 1.0 - p;
        }
        dumps.insert(ci + 1, traversal.dump * alive);
        alive *= 1.0 - traversal.dump;
    }
    let detections = detection.iter().map(|p| p * alive).collect();
    EventProbabilities {
        explosions,
        dumps,
        detections,
    }
}
