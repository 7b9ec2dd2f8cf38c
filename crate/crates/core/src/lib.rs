//! Simulation and analysis of self-switching random walks on Erdős–Rényi
//! graphs.
//!
//! A self-switching walk redraws its environment at every return to the
//! origin: a parameter comes from a prior, an Erdős–Rényi graph is sampled
//! at the induced edge probability, and the walk runs to its next return.
//! This crate provides the graph sampler and component structure
//! ([`graph`]), exact and Monte Carlo return-time machinery ([`walk`]), the
//! Poisson branching-process limit objects ([`branching`]), the state
//! process with its occupation measures and fluctuation experiment
//! ([`process`]), and an exhaustive small-graph oracle ([`oracle`]) used as
//! ground truth for everything else.

pub mod branching;
pub mod error;
pub mod exec;
pub mod graph;
pub mod oracle;
pub mod process;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{components, origin_stats, sample_er, ComponentSummary, Graph, OriginStats};
pub use process::{OccupationHistogram, Prior, PriorMode, StateTrace};
pub use walk::{exact_expected_return, simulate_return, ReturnSample, DEFAULT_STEPS_CAP};
