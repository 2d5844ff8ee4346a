use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::disaster::Channel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "LP")]
    Lp,
    #[serde(rename = "QR")]
    Qr,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lp => "LP",
            ModelKind::Qr => "QR",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LP" => Ok(ModelKind::Lp),
            "QR" => Ok(ModelKind::Qr),
            _ => Err(Error::InvalidArgument(format!("unknown model kind `{s}`"))),
        }
    }
}

/// Regressed macro outcome, each a deviation from trend in percentage points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    GdpGrowth,
    PrimaryBalance,
    EffectiveInterestLc,
    GdpDeflator,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [
        Outcome::GdpGrowth,
        Outcome::PrimaryBalance,
        Outcome::EffectiveInterestLc,
        Outcome::GdpDeflator,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::GdpGrowth => "gdp_growth",
            Outcome::PrimaryBalance => "primary_balance",
            Outcome::EffectiveInterestLc => "effective_interest_lc",
            Outcome::GdpDeflator => "gdp_deflator",
        }
    }

    /// Debt-equation channel the outcome feeds.
    pub fn channel(self) -> Channel {
        match self {
            Outcome::GdpGrowth => Channel::Growth,
            Outcome::PrimaryBalance => Channel::PrimaryBalance,
            Outcome::EffectiveInterestLc => Channel::Interest,
            Outcome::GdpDeflator => Channel::Inflation,
        }
    }

    pub fn from_channel(c: Channel) -> Outcome {
        match c {
            Channel::Growth => Outcome::GdpGrowth,
            Channel::PrimaryBalance => Outcome::PrimaryBalance,
            Channel::Interest => Outcome::EffectiveInterestLc,
            Channel::Inflation => Outcome::GdpDeflator,
        }
    }

    /// The institutional interaction: capacity index for the real-side
    /// outcomes, the legacy framework dummy for the nominal ones.
    pub fn nd_term(self) -> Term {
        match self {
            Outcome::GdpGrowth | Outcome::PrimaryBalance => Term::OnsetNdCapacity,
            Outcome::EffectiveInterestLc | Outcome::GdpDeflator => Term::OnsetNdExtra,
        }
    }

    /// Regressors in table order, constant excluded.
    pub fn regressors(self) -> [Term; 9] {
        [
            Term::Shock,
            Term::Onset,
            Term::OnsetDamage,
            Term::OnsetAe,
            Term::LaggedOutcome,
            Term::OnsetFb,
            Term::LaggedFb,
            self.nd_term(),
            Term::LaggedExtraNd,
        ]
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown outcome `{s}`")))
    }
}

/// Named coefficient of the impact regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    /// Composite climate shock at `t + h`.
    Shock,
    Onset,
    OnsetDamage,
    OnsetAe,
    LaggedOutcome,
    OnsetFb,
    LaggedFb,
    OnsetNdCapacity,
    OnsetNdExtra,
    LaggedExtraNd,
    Constant,
}

impl Term {
    pub const ALL: [Term; 11] = [
        Term::Shock,
        Term::Onset,
        Term::OnsetDamage,
        Term::OnsetAe,
        Term::LaggedOutcome,
        Term::OnsetFb,
        Term::LaggedFb,
        Term::OnsetNdCapacity,
        Term::OnsetNdExtra,
        Term::LaggedExtraNd,
        Term::Constant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Term::Shock => "shock",
            Term::Onset => "onset",
            Term::OnsetDamage => "onset_damage",
            Term::OnsetAe => "onset_ae",
            Term::LaggedOutcome => "lagged_outcome",
            Term::OnsetFb => "onset_fb",
            Term::LaggedFb => "lagged_fb",
            Term::OnsetNdCapacity => "onset_ndcapacity",
            Term::OnsetNdExtra => "onset_ndextra",
            Term::LaggedExtraNd => "lagged_extrand1995",
            Term::Constant => "constant",
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Term::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown term `{s}`")))
    }
}

/// One fitted regression: an (outcome, horizon) cell of a coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub model_kind: ModelKind,
    pub outcome: Outcome,
    pub horizon: usize,
    pub estimates: BTreeMap<Term, f64>,
    pub standard_errors: BTreeMap<Term, f64>,
    pub prediction_se: f64,
    pub tau: Option<f64>,
    pub n_obs: Option<usize>,
    pub r_squared: Option<f64>,
    pub n_countries: Option<usize>,
}

impl CoefficientSet {
    /// Checks the structural invariants. A perfect in-sample fit may leave
    /// `prediction_se` at zero; negative or non-finite values are rejected.
    pub fn validate(&self) -> Result<()> {
        let keys_a: Vec<_> = self.estimates.keys().collect();
        let keys_b: Vec<_> = self.standard_errors.keys().collect();
        if keys_a != keys_b {
            return Err(Error::InvalidArgument(format!(
                "{} {} h={}: coefficient and standard-error terms differ",
                self.model_kind, self.outcome, self.horizon
            )));
        }
        for (t, v) in self.estimates.iter().chain(&self.standard_errors) {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "{} {} h={} {t}",
                    self.model_kind, self.outcome, self.horizon
                )));
            }
        }
        if !(self.prediction_se.is_finite() && self.prediction_se >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{} {} h={}: prediction SE {} must be non-negative",
                self.model_kind, self.outcome, self.horizon, self.prediction_se
            )));
        }
        match (self.model_kind, self.tau) {
            (ModelKind::Qr, Some(t)) if t > 0.0 && t < 1.0 => {}
            (ModelKind::Qr, _) => {
                return Err(Error::InvalidArgument(format!(
                    "QR {} h={} needs tau in (0, 1)",
                    self.outcome, self.horizon
                )))
            }
            (ModelKind::Lp, Some(_)) => {
                return Err(Error::InvalidArgument(format!(
                    "LP {} h={} carries a tau",
                    self.outcome, self.horizon
                )))
            }
            (ModelKind::Lp, None) => {}
        }
        Ok(())
    }

    /// Estimate of `term`, zero when the term is absent from the fit.
    pub fn coef(&self, term: Term) -> f64 {
        self.estimates.get(&term).copied().unwrap_or(0.0)
    }
}

/// All fitted cells of one or more tables, keyed by (kind, outcome, horizon).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CoefficientTable {
    sets: BTreeMap<(ModelKind, Outcome, usize), CoefficientSet>,
}

impl CoefficientTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a validated set; a duplicate key is an error.
    pub fn insert(&mut self, set: CoefficientSet) -> Result<()> {
        set.validate()?;
        let key = (set.model_kind, set.outcome, set.horizon);
        if self.sets.contains_key(&key) {
            return Err(Error::InvalidArgument(format!(
                "duplicate coefficients for {} {} h={}",
                key.0, key.1, key.2
            )));
        }
        self.sets.insert(key, set);
        Ok(())
    }

    pub fn get(&self, kind: ModelKind, outcome: Outcome, horizon: usize) -> Option<&CoefficientSet> {
        self.sets.get(&(kind, outcome, horizon))
    }

    pub fn iter(&self) -> impl Iterator<Item = &CoefficientSet> {
        self.sets.values()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Merges `other` into `self`, rejecting overlapping cells.
    pub fn extend(&mut self, other: CoefficientTable) -> Result<()> {
        for s in other.sets.into_values() {
            self.insert(s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> CoefficientSet {
        let est: BTreeMap<Term, f64> = [(Term::Shock, 1.0), (Term::Constant, 0.5)].into();
        CoefficientSet {
            model_kind: ModelKind::Lp,
            outcome: Outcome::GdpGrowth,
            horizon: 0,
            standard_errors: est.keys().map(|k| (*k, 0.1)).collect(),
            estimates: est,
            prediction_se: 0.7,
            tau: None,
            n_obs: Some(10),
            r_squared: Some(0.2),
            n_countries: Some(2),
        }
    }

    #[test]
    fn names_round_trip() {
        for t in Term::ALL {
            assert_eq!(t.as_str().parse::<Term>().unwrap(), t);
        }
        for o in Outcome::ALL {
            assert_eq!(o.as_str().parse::<Outcome>().unwrap(), o);
            assert_eq!(Outcome::from_channel(o.channel()), o);
        }
        assert_eq!("qr".parse::<ModelKind>().unwrap(), ModelKind::Qr);
    }

    #[test]
    fn key_sets_must_match() {
        let mut s = set();
        s.standard_errors.remove(&Term::Shock);
        assert!(s.validate().is_err());
    }

    #[test]
    fn tau_only_for_quantile_models() {
        let mut s = set();
        s.tau = Some(0.95);
        assert!(s.validate().is_err());
        s.model_kind = ModelKind::Qr;
        assert!(s.validate().is_ok());
        s.tau = Some(1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn duplicates_are_rejected() {
        let mut t = CoefficientTable::new();
        t.insert(set()).unwrap();
        assert!(t.insert(set()).is_err());
        assert_eq!(
            t.get(ModelKind::Lp, Outcome::GdpGrowth, 0).unwrap().coef(Term::OnsetAe),
            0.0
        );
    }
}
