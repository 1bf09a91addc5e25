//! Fitting heavy-tailed degree distributions (Pareto-Lognormal and six
//! competitors), closed-form tail predictions, and the graph experiments
//! used to check which model a degree sequence actually behaves like.

pub mod dist;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod graph;
mod quad;
pub mod sample;
pub mod special;
pub mod tail;

pub use dist::{ModelKind, ModelSpec, PlnAuxiliaries};
pub use error::{Error, Result};
pub use fit::{FitOptions, FitReport, GridConfig, RssMode};
pub use graph::Graph;
pub use sample::DegreeSample;
pub use tail::TailReport;
