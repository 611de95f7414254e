//! Experiment orchestration: configuration, Monte-Carlo sweeps, the
//! causality demonstration and the command-line self-test.

mod causality;
mod config;
mod experiment;
mod selftest;

pub use causality::{causality_waveforms, demo_causality, CausalityDemo};
pub use config::{ExperimentConfig, ReceiverKind};
pub use experiment::{
    frame_symbols, noise_stream, optimum_csv, optimum_summary, run_cell, run_experiment, ExperimentOutput, Optimum,
    OPTIMUM_HEADER,
};
pub use selftest::{run_selftest, CheckOutcome};
