//! Simulation and analysis of interaction-free Grover search.
//!
//! A single photon is split across N spatial modes ("boxes"), one of which
//! hides a detonating inspection device. Repeated weak polarization
//! rotations interrogate the boxes almost without triggering the device,
//! and a Grover-style inversion about the average amplifies the marked
//! mode. The crate offers two independent evaluations of the same physics:
//!
//! * [`circuit`] — a brute-force conditional-state simulation that applies
//!   every optical element in sequence and tracks the exact survival
//!   probability in the state norm, and
//! * [`closed_form`] — the spectral solution of the per-cycle linear map,
//!   valid for any leak factor where the map is non-degenerate.
//!
//! [`monte_carlo`] samples individual photon histories against the exact
//! event probabilities, [`baselines`] provides classical and ideal-Grover
//! reference curves, and [`analysis`] builds cross-validation grids and
//! figure datasets from the two routes.

pub mod analysis;
pub mod baselines;
pub mod circuit;
pub mod closed_form;
pub mod monte_carlo;
pub mod params;
pub mod tolerances;

pub use analysis::{
    fig3_dataset, optimal_k, sweep_dataset, validate_grid, KMaxRule, SweepGrid, ValidationReport,
};
pub use baselines::{classical_success, grover_success, ifm_single, query_count};
pub use circuit::{run_search, search_success, LargeCycleRecord, PolarizedState};
pub use closed_form::{
    amplitudes, phase_parameter, success_probability, survival, ClosedFormError, Regime,
};
pub use monte_carlo::{event_probabilities, monte_carlo, OutcomeDistribution};
pub use params::{ParamError, SearchParams, Theta};
