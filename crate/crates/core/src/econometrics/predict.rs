use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lp::MAX_HORIZON;
use super::{CoefficientSet, CoefficientTable, ModelKind, Outcome, Term};
use crate::disaster::{Channel, DisasterRecord, ScenarioMode, ScenarioSpec, ShockSet, ShockVector};
use crate::error::{Error, Result};

/// Scenario covariates that do not come from the scenario spec or the
/// event, with the horizon-extension rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionInputs {
    /// Composite shock intensity of the scenario event.
    pub lcompshock: f64,
    /// Legacy disaster-framework dummy, 0 or 1.
    pub extra_nd1995: f64,
    /// Advanced-economy dummy, 0 or 1.
    pub ae: f64,
    /// Yearly factor applied to the last estimated horizon to extend the path.
    pub decay: f64,
    /// Path length in years, at least `MAX_HORIZON + 1`.
    pub horizons: usize,
    /// Band half-width in prediction SEs; local projections only.
    pub band_z: f64,
}

impl Default for PredictionInputs {
    fn default() -> Self {
        PredictionInputs {
            lcompshock: 0.0,
            extra_nd1995: 0.0,
            ae: 1.0,
            decay: 0.5,
            horizons: 6,
            band_z: 1.96,
        }
    }
}

/// Predicted deviation of one channel per horizon, in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPath {
    pub point: Vec<f64>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedShockPath {
    pub model_kind: ModelKind,
    pub channels: BTreeMap<Channel, ChannelPath>,
    /// Covariates outside the range the coefficients were fitted on.
    pub warnings: Vec<String>,
}

impl PredictedShockPath {
    /// Point paths as shock vectors in fractions.
    pub fn to_shock_set(&self) -> Result<ShockSet> {
        self.channels
            .iter()
            .map(|(c, p)| Ok((*c, ShockVector::new(*c, p.point.iter().map(|v| v / 100.0).collect())?)))
            .collect()
    }
}

fn kind_of(spec: &ScenarioSpec) -> Result<ModelKind> {
    match spec.mode {
        ScenarioMode::LocalProjection => Ok(ModelKind::Lp),
        ScenarioMode::QuantileRegression => Ok(ModelKind::Qr),
        m => Err(Error::InvalidArgument(format!(
            "{m:?} scenarios are not regression based"
        ))),
    }
}

/// Disaster-driven part of the fitted equation: every term that switches on
/// with the event. Persistence, lagged-balance and constant terms take the
/// same value with and without the disaster and cancel in the deviation.
fn impact(c: &CoefficientSet, damage_pct: f64, fb_pct: f64, ac: f64, inputs: &PredictionInputs) -> f64 {
    let nd = match c.outcome.nd_term() {
        Term::OnsetNdExtra => c.coef(Term::OnsetNdExtra) * inputs.extra_nd1995,
        _ => c.coef(Term::OnsetNdCapacity) * ac,
    };
    c.coef(Term::Shock) * inputs.lcompshock
        + c.coef(Term::Onset)
        + c.coef(Term::OnsetDamage) * damage_pct
        + c.coef(Term::OnsetAe) * inputs.ae
        + c.coef(Term::OnsetFb) * fb_pct
        + nd
}

/// Deviation path implied by fitted impact regressions for the scenario
/// event: onset switched on, damage from the event, fiscal balance and
/// adaptive capacity from the spec. Horizons past the estimated ones decay
/// geometrically from the last estimate.
pub fn predict_path(
    table: &CoefficientTable,
    spec: &ScenarioSpec,
    event: &DisasterRecord,
    inputs: &PredictionInputs,
) -> Result<PredictedShockPath> {
    spec.validate()?;
    let kind = kind_of(spec)?;
    if inputs.horizons <= MAX_HORIZON {
        return Err(Error::InvalidArgument(format!(
            "path length {} shorter than the estimated horizons",
            inputs.horizons
        )));
    }
    if !(inputs.decay.is_finite() && (0.0..=1.0).contains(&inputs.decay)) {
        return Err(Error::InvalidArgument(format!(
            "decay factor {} outside [0, 1]",
            inputs.decay
        )));
    }
    let damage_pct = event.damage_gdp * 100.0;
    let fb_pct = spec.fb0 * 100.0;
    let ac = spec.adaptive_capacity;

    let mut warnings = Vec::new();
    if damage_pct > 100.0 {
        warnings.push(format!("damage {damage_pct:.2}% of GDP is beyond observed disasters"));
    }
    if fb_pct.abs() > 15.0 {
        warnings.push(format!(
            "fiscal balance {fb_pct:.2}% of GDP is outside the usual panel range"
        ));
    }
    for (name, v) in [("onset*AE", inputs.ae), ("extraND1995", inputs.extra_nd1995)] {
        if v != 0.0 && v != 1.0 {
            warnings.push(format!("{name} dummy set to non-binary value {v}"));
        }
    }

    let mut channels = BTreeMap::new();
    for &channel in &spec.channels {
        let outcome = Outcome::from_channel(channel);
        let mut point = Vec::with_capacity(inputs.horizons);
        let mut half = Vec::with_capacity(inputs.horizons);
        for h in 0..=MAX_HORIZON {
            let c = table
                .get(kind, outcome, h)
                .ok_or_else(|| Error::Missing(format!("{kind} coefficients for {outcome} at horizon {h}")))?;
            point.push(impact(c, damage_pct, fb_pct, ac, inputs));
            half.push(inputs.band_z * c.prediction_se);
        }
        for h in MAX_HORIZON + 1..inputs.horizons {
            let f = inputs.decay.powi((h - MAX_HORIZON) as i32);
            point.push(point[MAX_HORIZON] * f);
            half.push(half[MAX_HORIZON] * f);
        }
        let (lower, upper) = match kind {
            ModelKind::Lp => (
                Some(point.iter().zip(&half).map(|(p, w)| p - w).collect()),
                Some(point.iter().zip(&half).map(|(p, w)| p + w).collect()),
            ),
            ModelKind::Qr => (None, None),
        };
        channels.insert(channel, ChannelPath { point, lower, upper });
    }
    Ok(PredictedShockPath {
        model_kind: kind,
        channels,
        warnings,
    })
}

/// Predicted paths under two scenario specs and their per-horizon
/// difference `b - a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterfactual {
    pub a: PredictedShockPath,
    pub b: PredictedShockPath,
    pub difference: BTreeMap<Channel, Vec<f64>>,
}

pub fn counterfactual(
    table: &CoefficientTable,
    spec_a: &ScenarioSpec,
    spec_b: &ScenarioSpec,
    event: &DisasterRecord,
    inputs: &PredictionInputs,
) -> Result<Counterfactual> {
    if spec_a.mode != spec_b.mode || spec_a.channels != spec_b.channels {
        return Err(Error::InvalidArgument(
            "counterfactual specs must share mode and channels".into(),
        ));
    }
    let a = predict_path(table, spec_a, event, inputs)?;
    let b = predict_path(table, spec_b, event, inputs)?;
    let difference = a
        .channels
        .iter()
        .map(|(c, pa)| {
            let pb = &b.channels[c];
            (*c, pb.point.iter().zip(&pa.point).map(|(y, x)| y - x).collect())
        })
        .collect();
    Ok(Counterfactual { a, b, difference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disaster::DisasterKind;

    fn table(scale: f64) -> CoefficientTable {
        let mut t = CoefficientTable::new();
        for o in Outcome::ALL {
            for h in 0..=MAX_HORIZON {
                let est: BTreeMap<Term, f64> = o
                    .regressors()
                    .into_iter()
                    .chain([Term::Constant])
                    .enumerate()
                    .map(|(j, term)| (term, scale * (j as f64 + 1.0) * (h as f64 + 1.0)))
                    .collect();
                t.insert(CoefficientSet {
                    model_kind: ModelKind::Lp,
                    outcome: o,
                    horizon: h,
                    standard_errors: est.keys().map(|k| (*k, 0.1)).collect(),
                    estimates: est,
                    prediction_se: 0.5,
                    tau: None,
                    n_obs: None,
                    r_squared: None,
                    n_countries: None,
                })
                .unwrap();
            }
        }
        t
    }

    fn event(d: f64) -> DisasterRecord {
        DisasterRecord::new(2020, DisasterKind::Earthquake, d, None).unwrap()
    }

    fn spec() -> ScenarioSpec {
        let mut s = ScenarioSpec::new(ScenarioMode::LocalProjection, 2026);
        s.fb0 = -0.011;
        s.adaptive_capacity = 0.438;
        s
    }

    #[test]
    fn zero_coefficients_give_zero_path() {
        let p = predict_path(&table(0.0), &spec(), &event(0.1169), &PredictionInputs::default()).unwrap();
        for c in p.channels.values() {
            assert!(c.point.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn damage_term_is_linear() {
        let inp = PredictionInputs::default();
        let t = table(1.0);
        let p0 = predict_path(&t, &spec(), &event(0.0), &inp).unwrap();
        let p1 = predict_path(&t, &spec(), &event(0.05), &inp).unwrap();
        let p2 = predict_path(&t, &spec(), &event(0.10), &inp).unwrap();
        for c in p0.channels.keys() {
            for h in 0..6 {
                let m1 = p1.channels[c].point[h] - p0.channels[c].point[h];
                let m2 = p2.channels[c].point[h] - p0.channels[c].point[h];
                assert!((m2 - 2.0 * m1).abs() < 1e-9, "{m1} {m2}");
            }
        }
    }

    #[test]
    fn extension_decays_and_bands_bracket() {
        let p = predict_path(&table(1.0), &spec(), &event(0.1), &PredictionInputs::default()).unwrap();
        let g = &p.channels[&Channel::Growth];
        assert_eq!(g.point.len(), 6);
        assert_eq!(g.point[3], g.point[2] * 0.5);
        assert_eq!(g.point[5], g.point[2] * 0.125);
        let (lo, hi) = (g.lower.as_ref().unwrap(), g.upper.as_ref().unwrap());
        for h in 0..6 {
            assert!(lo[h] <= g.point[h] && g.point[h] <= hi[h]);
        }
        assert!((hi[0] - g.point[0] - 1.96 * 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_specs_have_zero_difference() {
        let cf = counterfactual(&table(1.0), &spec(), &spec(), &event(0.1), &PredictionInputs::default()).unwrap();
        assert!(cf.difference.values().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn missing_horizon_is_reported() {
        let mut t = CoefficientTable::new();
        t.insert(table(1.0).get(ModelKind::Lp, Outcome::GdpGrowth, 0).unwrap().clone())
            .unwrap();
        assert!(matches!(
            predict_path(&t, &spec(), &event(0.1), &PredictionInputs::default()),
            Err(Error::Missing(_))
        ));
    }

    #[test]
    fn out_of_support_warns() {
        let mut s = spec();
        s.fb0 = 0.4;
        let p = predict_path(&table(1.0), &s, &event(1.5), &PredictionInputs::default()).unwrap();
        assert_eq!(p.warnings.len(), 2);
    }
}
