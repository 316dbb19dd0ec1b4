//! Benchmark harness: fixtures, the MSE scaling experiment and the simulated
//! two-qubit reconstruction pipeline.

pub mod fixtures;
pub mod mse;
pub mod pipeline;

pub use fixtures::{fixture_observable, fixture_state, load_fixture, Fixture, FIXTURE_NAMES};
pub use mse::{
    fit_power_law, fit_scaling, mse_experiment, write_csv, Method, MseConfig, MseProblem,
    MseResult, ScalingFit,
};
pub use pipeline::{nmr_pipeline_sim, PipelineMode, PipelineReport};
