//! Numerical laboratory for Szegő and Poisson kernels on Grauert tubes of
//! compact Lie groups: experiment configs, caching, reports and plots.

pub mod cache;
pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod report;

pub use cache::Cache;
pub use config::{Experiment, ExperimentConfig};
pub use error::{RunError, RunResult};
pub use experiments::run;
pub use report::{CriterionResult, Report};
