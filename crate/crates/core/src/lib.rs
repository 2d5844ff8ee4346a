//! Public debt dynamics with disaster stress scenarios.
//!
//! Rates, balances and debt ratios are fractions of GDP throughout the
//! library; conversion to and from percent happens at the file and report
//! boundaries.

pub mod disaster;
pub mod econometrics;
pub mod error;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};
