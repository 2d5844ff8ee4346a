use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Outcome, Term};
use crate::error::{Error, Result};

/// One country-year of the impact panel. Outcomes and `fb` are in percent;
/// an outcome may be missing where the source does not cover it. Lags are
/// not stored: they are read from the same country's previous year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelObservation {
    pub country: String,
    pub year: i32,
    pub gdp_growth: Option<f64>,
    pub primary_balance: Option<f64>,
    pub effective_interest_lc: Option<f64>,
    pub gdp_deflator: Option<f64>,
    pub lcompshock: f64,
    pub onset: bool,
    pub damage: f64,
    pub ae: bool,
    pub nd_capacity: f64,
    pub fb: f64,
    pub extra_nd1995: bool,
}

impl PanelObservation {
    pub fn outcome(&self, o: Outcome) -> Option<f64> {
        match o {
            Outcome::GdpGrowth => self.gdp_growth,
            Outcome::PrimaryBalance => self.primary_balance,
            Outcome::EffectiveInterestLc => self.effective_interest_lc,
            Outcome::GdpDeflator => self.gdp_deflator,
        }
    }

    fn check(&self) -> Result<()> {
        let mut vals = vec![self.lcompshock, self.damage, self.nd_capacity, self.fb];
        vals.extend(Outcome::ALL.iter().filter_map(|o| self.outcome(*o)));
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("panel row {} {}", self.country, self.year)));
        }
        Ok(())
    }
}

fn b(v: bool) -> f64 {
    if v {
        1.0
    } else {
        0.0
    }
}

/// Regression inputs for one (outcome, horizon): dependent vector, regressor
/// matrix without constant, and the country index of every row.
#[derive(Debug, Clone)]
pub struct Design {
    pub y: Vec<f64>,
    pub x: DMatrix<f64>,
    pub columns: Vec<Term>,
    pub groups: Vec<usize>,
    pub n_groups: usize,
}

/// Country-year panel, sorted by country then year, one row per pair.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Panel {
    rows: Vec<PanelObservation>,
}

impl Panel {
    pub fn new(mut rows: Vec<PanelObservation>) -> Result<Self> {
        for r in &rows {
            r.check()?;
        }
        rows.sort_by(|a, b| a.country.cmp(&b.country).then(a.year.cmp(&b.year)));
        for w in rows.windows(2) {
            if w[0].country == w[1].country && w[0].year == w[1].year {
                return Err(Error::InvalidArgument(format!(
                    "duplicate panel row {} {}",
                    w[0].country, w[0].year
                )));
            }
        }
        Ok(Panel { rows })
    }

    pub fn rows(&self) -> &[PanelObservation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn countries(&self) -> BTreeSet<&str> {
        self.rows.iter().map(|r| r.country.as_str()).collect()
    }

    /// Rows for `y_{t+h} - y_{t-1}` on the impact regressors. A country-year
    /// enters only when `t-1` and `t+h` exist with the outcome observed.
    pub fn design(&self, outcome: Outcome, horizon: usize) -> Result<Design> {
        let columns = outcome.regressors().to_vec();
        let mut by_country: BTreeMap<&str, BTreeMap<i32, &PanelObservation>> = BTreeMap::new();
        for r in &self.rows {
            by_country.entry(&r.country).or_default().insert(r.year, r);
        }
        let mut y = Vec::new();
        let mut data = Vec::new();
        let mut groups = Vec::new();
        let mut n_groups = 0;
        for years in by_country.values() {
            let mut used = false;
            for (&t, cur) in years {
                let (Some(prev), Some(lead)) = (years.get(&(t - 1)), years.get(&(t + horizon as i32))) else {
                    continue;
                };
                let (Some(y_lag), Some(y_lead)) = (prev.outcome(outcome), lead.outcome(outcome)) else {
                    continue;
                };
                let onset = b(cur.onset);
                for term in &columns {
                    data.push(match term {
                        Term::Shock => lead.lcompshock,
                        Term::Onset => onset,
                        Term::OnsetDamage => onset * cur.damage,
                        Term::OnsetAe => onset * b(cur.ae),
                        Term::LaggedOutcome => y_lag,
                        Term::OnsetFb => onset * cur.fb,
                        Term::LaggedFb => prev.fb,
                        Term::OnsetNdCapacity => onset * cur.nd_capacity,
                        Term::OnsetNdExtra => onset * b(cur.extra_nd1995),
                        Term::LaggedExtraNd => b(prev.extra_nd1995),
                        Term::Constant => unreachable!("constant is not a regressor column"),
                    });
                }
                y.push(y_lead - y_lag);
                groups.push(n_groups);
                used = true;
            }
            if used {
                n_groups += 1;
            }
        }
        if y.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no usable {outcome} rows at horizon {horizon}"
            )));
        }
        let x = DMatrix::from_row_slice(y.len(), columns.len(), &data);
        Ok(Design {
            y,
            x,
            columns,
            groups,
            n_groups,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(c: &str, year: i32, g: f64) -> PanelObservation {
        PanelObservation {
            country: c.into(),
            year,
            gdp_growth: Some(g),
            primary_balance: None,
            effective_interest_lc: None,
            gdp_deflator: None,
            lcompshock: year as f64 / 100.0,
            onset: year % 2 == 0,
            damage: 3.0,
            ae: true,
            nd_capacity: 0.5,
            fb: -1.0,
            extra_nd1995: false,
        }
    }

    #[test]
    fn design_uses_lead_and_lag() {
        let p = Panel::new(vec![
            row("A", 2002, 3.0),
            row("A", 2000, 1.0),
            row("A", 2001, 2.0),
            row("B", 2000, 5.0),
        ])
        .unwrap();
        let d = p.design(Outcome::GdpGrowth, 1).unwrap();
        // only A-2001 has both 2000 and 2002
        assert_eq!(d.y, vec![2.0]);
        assert_eq!(d.x[(0, 0)], 20.02);
        assert_eq!(d.x[(0, 4)], 1.0);
        assert_eq!(d.n_groups, 1);
        assert!(p.design(Outcome::PrimaryBalance, 0).is_err());
    }

    #[test]
    fn duplicate_rows_rejected() {
        assert!(Panel::new(vec![row("A", 2000, 1.0), row("A", 2000, 1.0)]).is_err());
    }
}
