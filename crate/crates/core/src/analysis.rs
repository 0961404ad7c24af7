//! Dataset builders on top of the two evolution routes: cross-validation
//! grids, figure curves, and parameter scans.

use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::run_search;
use crate::closed_form::{self, ClosedFormError};
use crate::params::{ParamError, SearchParams, Theta};
use crate::tolerances::{EQUIVALENCE_TOLERANCE, PLATEAU_TOLERANCE};

/// How far in `k` to tabulate for a given box count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KMaxRule {
    Fixed(usize),
    /// `ceil(scale * sqrt(N))` large cycles.
    SqrtScaled(f64),
}

impl KMaxRule {
    pub fn k_max(&self, n_boxes: usize) -> usize {
        match *self {
            KMaxRule::Fixed(k) => k,
            KMaxRule::SqrtScaled(scale) => (scale * (n_boxes as f64).sqrt()).ceil() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid axis '{0}' is empty")]
    EmptyAxis(&'static str),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("k-max rule yields zero large cycles for N = {n_boxes}")]
    DegenerateKRange { n_boxes: usize },
}

/// A rectangular `(N, M)` grid with a per-N cap on large cycles; the angle
/// preset applies to every point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    n_values: Vec<usize>,
    m_values: Vec<usize>,
    k_rule: KMaxRule,
    theta: Theta,
}

impl SweepGrid {
    pub fn new(
        n_values: Vec<usize>,
        m_values: Vec<usize>,
        k_rule: KMaxRule,
        theta: Theta,
    ) -> Result<Self, GridError> {
        if n_values.is_empty() {
            return Err(GridError::EmptyAxis("n_boxes"));
        }
        if m_values.is_empty() {
            return Err(GridError::EmptyAxis("small_cycles"));
        }
        for &n in &n_values {
            if n < 2 {
                return Err(ParamError::TooFewBoxes(n).into());
            }
            if k_rule.k_max(n) == 0 {
                return Err(GridError::DegenerateKRange { n_boxes: n });
            }
        }
        for &m in &m_values {
            // Resolving against every M also vets explicit angles.
            SearchParams::new(2, m, theta, 0, 0)?;
        }
        Ok(SweepGrid {
            n_values,
            m_values,
            k_rule,
            theta,
        })
    }

    /// The cross-validation grid used by the equivalence gate:
    /// N in {2, 4, 8, 15, 16, 32, 64} x M in {2, 3, 4, 8, 9, 12, 16, 32},
    /// k up to `ceil(2 sqrt(N))`, phase-oracle tuning.
    pub fn validation_default() -> SweepGrid {
        SweepGrid::new(
            vec![2, 4, 8, 15, 16, 32, 64],
            vec![2, 3, 4, 8, 9, 12, 16, 32],
            KMaxRule::SqrtScaled(2.0),
            Theta::PiOverM,
        )
        .expect("the default grid is well-formed")
    }

    pub fn n_values(&self) -> &[usize] {
        &self.n_values
    }

    pub fn m_values(&self) -> &[usize] {
        &self.m_values
    }

    pub fn k_rule(&self) -> KMaxRule {
        self.k_rule
    }

    pub fn theta(&self) -> Theta {
        self.theta
    }
}

/// Absolute circuit-vs-closed-form differences at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationPoint {
    pub n_boxes: usize,
    pub small_cycles: usize,
    pub k: usize,
    pub diff_tau: f64,
    pub diff_survival: f64,
}

/// A grid pair the closed form refused (with the error it gave).
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPoint {
    pub n_boxes: usize,
    pub small_cycles: usize,
    pub reason: ClosedFormError,
}

/// Outcome of running both evolution routes over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub grid: SweepGrid,
    pub points: Vec<ValidationPoint>,
    pub skipped: Vec<SkippedPoint>,
    pub max_abs_diff_tau: f64,
    pub max_abs_diff_survival: f64,
    /// `(N, M, k)` of the worst point, if any point was evaluated.
    pub worst_point: Option<(usize, usize, usize)>,
    pub passed: bool,
}

/// Evaluate the brute-force circuit and the closed form on every grid
/// point and report the differences. Closed-form failures (for example a
/// degenerate leak at M = 1) skip the pair and are listed, not raised.
pub fn validate_grid(grid: &SweepGrid) -> ValidationReport {
    let pairs: Vec<(usize, usize)> = grid
        .n_values
        .iter()
        .flat_map(|&n| grid.m_values.iter().map(move |&m| (n, m)))
        .collect();

    let per_pair: Vec<Result<Vec<ValidationPoint>, SkippedPoint>> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let theta = grid.theta.radians(m);
            let k_max = grid.k_rule.k_max(n);
            let closed =
                closed_form::evolution(n, m, theta, k_max).map_err(|reason| SkippedPoint {
                    n_boxes: n,
                    small_cycles: m,
                    reason,
                })?;
            let params = SearchParams::new(n, m, Theta::Radians(theta), k_max, 0)
                .expect("grid points are validated");
            let records = run_search(&params);
            let mut points = Vec::with_capacity(k_max + 1);
            for k in 0..=k_max {
                let (circuit_tau, circuit_survival) = if k == 0 {
                    (1.0 / (n as f64).sqrt(), 1.0)
                } else {
                    (records[k - 1].tau, records[k - 1].cumulative_survival)
                };
                points.push(ValidationPoint {
                    n_boxes: n,
                    small_cycles: m,
                    k,
                    diff_tau: (circuit_tau - closed[k].tau).abs(),
                    diff_survival: (circuit_survival - closed[k].survival).abs(),
                });
            }
            Ok(points)
        })
        .collect();

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for r in per_pair {
        match r {
            Ok(p) => points.extend(p),
            Err(s) => skipped.push(s),
        }
    }
    points.sort_by_key(|p| (p.n_boxes, p.small_cycles, p.k));
    skipped.sort_by_key(|s| (s.n_boxes, s.small_cycles));

    let mut max_abs_diff_tau = 0.0f64;
    let mut max_abs_diff_survival = 0.0f64;
    let mut worst_point = None;
    let mut worst = -1.0f64;
    for p in &points {
        max_abs_diff_tau = max_abs_diff_tau.max(p.diff_tau);
        max_abs_diff_survival = max_abs_diff_survival.max(p.diff_survival);
        let score = p.diff_tau.max(p.diff_survival);
        if score > worst {
            worst = score;
            worst_point = Some((p.n_boxes, p.small_cycles, p.k));
        }
    }
    let passed =
        max_abs_diff_tau <= EQUIVALENCE_TOLERANCE && max_abs_diff_survival <= EQUIVALENCE_TOLERANCE;
    ValidationReport {
        grid: grid.clone(),
        points,
        skipped,
        max_abs_diff_tau,
        max_abs_diff_survival,
        worst_point,
        passed,
    }
}

/// One closed-form curve sample at the phase-oracle tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig3Row {
    pub small_cycles: usize,
    pub k: usize,
    pub tau: f64,
    pub survival: f64,
    pub success: f64,
}

/// Success/survival/amplitude curves for one box count at several pass
/// counts, `k = 0 ..= k_max` each.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Dataset {
    pub n_boxes: usize,
    pub rows: Vec<Fig3Row>,
}

/// Tabulate the closed-form curves for `n_boxes` at each pass count in
/// `m_values` (angle `pi/M`). Fails if any pass count degenerates.
pub fn fig3_dataset(
    n_boxes: usize,
    m_values: &[usize],
    k_max: usize,
) -> Result<Fig3Dataset, ClosedFormError> {
    let mut rows = Vec::with_capacity(m_values.len() * (k_max + 1));
    for &m in m_values {
        let theta = std::f64::consts::PI / m as f64;
        for point in closed_form::evolution(n_boxes, m, theta, k_max)? {
            rows.push(Fig3Row {
                small_cycles: m,
                k: point.k,
                tau: point.tau,
                survival: point.survival,
                success: point.success,
            });
        }
    }
    rows.sort_by_key(|r| (r.small_cycles, r.k));
    Ok(Fig3Dataset { n_boxes, rows })
}

/// Number of large cycles that maximizes the closed-form success for
/// `n_boxes` at `small_cycles` passes (`theta = pi/M`), scanning
/// `k = 0 ..= ceil(4 sqrt(N))`. Ties and saturation plateaus resolve to
/// the smallest k within `PLATEAU_TOLERANCE` of the maximum.
pub fn optimal_k(n_boxes: usize, small_cycles: usize) -> Result<(usize, f64), ClosedFormError> {
    let k_max = KMaxRule::SqrtScaled(4.0).k_max(n_boxes);
    let theta = std::f64::consts::PI / small_cycles as f64;
    let rows = closed_form::evolution(n_boxes, small_cycles, theta, k_max)?;
    let best = rows
        .iter()
        .map(|r| r.success)
        .fold(f64::NEG_INFINITY, f64::max);
    let row = rows
        .iter()
        .find(|r| r.success >= best - PLATEAU_TOLERANCE)
        .expect("scan range is non-empty");
    Ok((row.k, row.success))
}

/// Closed-form success at fixed `(N, k)` for each pass count in
/// `m_values`: how the search improves as the oracle leak is throttled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePoint {
    pub small_cycles: usize,
    pub success: f64,
}

pub fn asymptotic_probe(
    n_boxes: usize,
    large_cycles: usize,
    m_values: &[usize],
) -> Result<Vec<ProbePoint>, ClosedFormError> {
    m_values
        .iter()
        .map(|&m| {
            let theta = std::f64::consts::PI / m as f64;
            closed_form::success_probability(n_boxes, m, theta, large_cycles).map(|success| {
                ProbePoint {
                    small_cycles: m,
                    success,
                }
            })
        })
        .collect()
}

/// One closed-form sample of a full `(N, M, k)` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n_boxes: usize,
    pub small_cycles: usize,
    pub k: usize,
    pub tau: f64,
    pub survival: f64,
    pub success: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepDataset {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedPoint>,
}

/// Closed-form curves over the whole grid, sorted by `(N, M, k)`;
/// degenerate pairs are skipped and listed.
pub fn sweep_dataset(grid: &SweepGrid) -> SweepDataset {
    let pairs: Vec<(usize, usize)> = grid
        .n_values
        .iter()
        .flat_map(|&n| grid.m_values.iter().map(move |&m| (n, m)))
        .collect();
    let per_pair: Vec<Result<Vec<SweepRow>, SkippedPoint>> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let theta = grid.theta.radians(m);
            let k_max = grid.k_rule.k_max(n);
            let rows = closed_form::evolution(n, m, theta, k_max)
                .map_err(|reason| SkippedPoint {
                    n_boxes: n,
                    small_cycles: m,
                    reason,
                })?
                .into_iter()
                .map(|p| SweepRow {
                    n_boxes: n,
                    small_cycles: m,
                    k: p.k,
                    tau: p.tau,
                    survival: p.survival,
                    success: p.success,
                })
                .collect();
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for r in per_pair {
        match r {
            Ok(p) => rows.extend(p),
            Err(s) => skipped.push(s),
        }
    }
    rows.sort_by_key(|r| (r.n_boxes, r.small_cycles, r.k));
    skipped.sort_by_key(|s| (s.n_boxes, s.small_cycles));
    SweepDataset { rows, skipped }
}
