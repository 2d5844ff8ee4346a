//! Loading and writing the dataset files.
//!
//! Every tabular file is comma separated with a period decimal point. The
//! first row holds column names and the second row the unit of each column.
//! A manifest (TOML) lists the files by role, maps logical column names to
//! file headers and declares the unit it expects for every numeric column;
//! a file whose units row disagrees with the manifest is rejected.

mod calibration;
mod coefficients;
mod manifest;
mod records;
mod series;
mod table;

pub use calibration::{load_calibration, parse_calibration, Calibration};
pub use coefficients::{coefficient_rows, load_coefficients, read_coefficients, write_coefficients};
pub use manifest::{FileSpec, Manifest, Role};
pub use records::{load_disasters, load_panel, plot_csv, read_plot_data, write_panel, write_plot_data, PlotPoint};
pub use series::{
    backtest, load_history, load_projections, write_history, write_projections, BacktestRow, History, Projections,
};
pub use table::{parse_number, Table, Unit};

use serde::{Deserialize, Serialize};

/// A cell filled or defaulted by a documented rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub file: String,
    pub year: Option<i32>,
    pub column: String,
    pub rule: String,
    pub value: f64,
}

/// Filled cells and non-fatal findings collected while loading.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub filled: Vec<ProvenanceEntry>,
    pub warnings: Vec<String>,
}

impl Provenance {
    pub fn merge(&mut self, other: Provenance) {
        self.filled.extend(other.filled);
        self.warnings.extend(other.warnings);
    }
}
