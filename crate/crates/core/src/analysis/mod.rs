//! Experiments and derived quantities.

pub mod distance;
pub mod fit;
pub mod io;
pub mod locality;
pub mod rates;

pub use distance::{circuit_distance, exhaustive_distance, graph_distance, timelike_distance};
pub use fit::{teraquop_footprint, threshold_estimate, FitKind, FitResult, TERAQUOP_TARGET};
pub use rates::{logical_error_rate, wilson_interval, RateObservable, RateOptions, RatePoint};
