//! Disaster impact regressions and their use as shock generators.
//!
//! Everything in this module works in percent, the unit of the published
//! coefficient tables. Predicted paths are converted to fractions only
//! when they are turned into shock vectors.

mod coefficients;
mod linalg;
mod lp;
mod panel;
mod predict;
mod qr;
mod synthetic;

pub use coefficients::{CoefficientSet, CoefficientTable, ModelKind, Outcome, Term};
pub use lp::{lp_estimate, lp_fit, LpFit, MAX_HORIZON};
pub use panel::{Design, Panel, PanelObservation};
pub use predict::{counterfactual, predict_path, ChannelPath, Counterfactual, PredictedShockPath, PredictionInputs};
pub use qr::{pinball_loss, qr_estimate, quantile_fit, QrFit, QrOptions};
pub use synthetic::SyntheticPanel;
