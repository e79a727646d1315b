//! Bayesian selection of stabilizing boundary-feedback gains for
//! one-dimensional hyperbolic balance laws.
//!
//! A [`Problem`] pairs a model, a feedback law and an initial state. Every
//! node of a [`ParamGrid`] runs its own closed-loop finite-volume solve, and
//! [`posterior_iteration`] damps the probability of nodes whose decay
//! indicator grows.

pub mod algorithm;
pub mod bayes;
pub mod cases;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod indicator;
pub mod model;
pub mod solver;

pub use algorithm::{
    posterior_iteration, stability_region, AlgorithmConfig, NodeReport, ParamTarget, Problem,
    RunResult, Schedule, StopReason,
};
pub use bayes::{
    likelihood, make_prior, Distribution, LikelihoodConfig, LikelihoodMode, ParamGrid, Prior,
};
pub use cases::InitialCase;
pub use diagnostics::{e_deviation, fit_power_law, threshold_map, FitResult};
pub use error::{Error, Result};
pub use grid::{Grid1D, State, XiGrid};
pub use indicator::{indicator, IndicatorConfig, IndicatorKind, WeightConvention};
pub use model::{apply_boundary, Direction, Dissipation, FeedbackLaw, LawKind, Model, ModelKind};
pub use solver::{
    advance, compute_dt, minmod, run_to_time, step_first_order, step_second_order, Advance,
    SolverConfig,
};
