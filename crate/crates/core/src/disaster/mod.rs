//! Disaster shock calibration and scenario application.
//!
//! Shocks are additive deviations from baseline assumptions, one sequence
//! per channel, indexed by horizon from the first affected year. A one-off
//! scenario applies the percentile profile of the reference event once; a
//! per-period scenario draws a fresh deviation for every projection year.

mod distribution;
mod scenario;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Variable;

pub use distribution::{build_shock_vectors, EmpiricalDistribution};
pub use scenario::{apply_per_period, apply_scenario, ScenarioOutcome};

/// Transmission channel of a disaster shock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Growth,
    PrimaryBalance,
    Inflation,
    Interest,
}

impl Channel {
    pub const ALL: [Channel; 4] = [
        Channel::Growth,
        Channel::PrimaryBalance,
        Channel::Inflation,
        Channel::Interest,
    ];

    pub fn variable(self) -> Variable {
        match self {
            Channel::Growth => Variable::Growth,
            Channel::PrimaryBalance => Variable::PrimaryBalance,
            Channel::Inflation => Variable::Inflation,
            Channel::Interest => Variable::Interest,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Growth => "growth",
            Channel::PrimaryBalance => "primary_balance",
            Channel::Inflation => "inflation",
            Channel::Interest => "interest",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown channel `{s}`")))
    }
}

/// Which tail of a channel's impact distribution is adverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    LowerIsAdverse,
    HigherIsAdverse,
}

impl Orientation {
    /// Quantile level holding the adverse tail at severity `p`.
    pub fn level(self, p: f64) -> f64 {
        match self {
            Orientation::LowerIsAdverse => p,
            Orientation::HigherIsAdverse => 1.0 - p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisasterKind {
    Earthquake,
    Storm,
    Flood,
    Drought,
    Wildfire,
    ExtremeTemperature,
}

impl FromStr for DisasterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Ok(match norm.as_str() {
            "earthquake" => DisasterKind::Earthquake,
            "storm" => DisasterKind::Storm,
            "flood" => DisasterKind::Flood,
            "drought" => DisasterKind::Drought,
            "wildfire" => DisasterKind::Wildfire,
            "extreme_temperature" => DisasterKind::ExtremeTemperature,
            _ => return Err(Error::InvalidArgument(format!("unknown disaster kind `{s}`"))),
        })
    }
}

/// An observed disaster. Damage and affected population are fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisasterRecord {
    pub year: i32,
    pub kind: DisasterKind,
    pub damage_gdp: f64,
    pub affected_pop: Option<f64>,
}

impl DisasterRecord {
    pub fn new(year: i32, kind: DisasterKind, damage_gdp: f64, affected_pop: Option<f64>) -> Result<Self> {
        if !(damage_gdp.is_finite() && damage_gdp >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "damage {damage_gdp} must be a non-negative fraction"
            )));
        }
        if let Some(a) = affected_pop {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidArgument(format!(
                    "affected population {a} outside [0, 1]"
                )));
            }
        }
        Ok(DisasterRecord {
            year,
            kind,
            damage_gdp,
            affected_pop,
        })
    }
}

/// Additive deviations `s_0..s_H` for one channel, in fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockVector {
    pub channel: Channel,
    pub deviations: Vec<f64>,
}

impl ShockVector {
    pub fn new(channel: Channel, deviations: Vec<f64>) -> Result<Self> {
        if deviations.is_empty() {
            return Err(Error::InvalidArgument(format!("empty shock vector for {channel}")));
        }
        if let Some(v) = deviations.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{channel} deviation {v}")));
        }
        Ok(ShockVector { channel, deviations })
    }

    pub fn zeros(channel: Channel, len: usize) -> Self {
        ShockVector {
            channel,
            deviations: vec![0.0; len.max(1)],
        }
    }

    pub fn horizon(&self) -> usize {
        self.deviations.len() - 1
    }
}

pub type ShockSet = BTreeMap<Channel, ShockVector>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioMode {
    OneOff,
    PerPeriod,
    LocalProjection,
    QuantileRegression,
}

impl FromStr for ScenarioMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "one_off" => ScenarioMode::OneOff,
            "per_period" => ScenarioMode::PerPeriod,
            "local_projection" | "lp" => ScenarioMode::LocalProjection,
            "quantile_regression" | "qr" => ScenarioMode::QuantileRegression,
            _ => return Err(Error::InvalidArgument(format!("unknown scenario mode `{s}`"))),
        })
    }
}

/// How per-period scenarios draw their yearly shocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerPeriodDraw {
    /// One independent impact per year from the horizon-0 marginal.
    #[default]
    SingleYear,
    /// Every year starts a new event whose full horizon profile is drawn
    /// and superposed on earlier ones.
    Profile,
}

/// Scenario definition. `fb0` is a fraction of GDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub mode: ScenarioMode,
    pub percentile: f64,
    pub shock_start_year: i32,
    pub channels: BTreeSet<Channel>,
    pub fb0: f64,
    pub adaptive_capacity: f64,
    pub seed: u64,
    pub per_period_draw: PerPeriodDraw,
}

impl ScenarioSpec {
    /// Spec with the two headline channels and a 5th-percentile severity.
    pub fn new(mode: ScenarioMode, shock_start_year: i32) -> Self {
        ScenarioSpec {
            mode,
            percentile: 0.05,
            shock_start_year,
            channels: [Channel::Growth, Channel::PrimaryBalance].into_iter().collect(),
            fb0: 0.0,
            adaptive_capacity: 0.0,
            seed: 0,
            per_period_draw: PerPeriodDraw::SingleYear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.percentile > 0.0 && self.percentile < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "percentile {} outside (0, 1)",
                self.percentile
            )));
        }
        if !(0.0..=1.0).contains(&self.adaptive_capacity) {
            return Err(Error::InvalidArgument(format!(
                "adaptive capacity {} outside [0, 1]",
                self.adaptive_capacity
            )));
        }
        if !self.fb0.is_finite() {
            return Err(Error::NonFinite(format!("fb0 = {}", self.fb0)));
        }
        if self.channels.is_empty() {
            return Err(Error::InvalidArgument("scenario has no channels".into()));
        }
        Ok(())
    }
}
