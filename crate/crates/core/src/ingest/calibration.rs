use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse_number, Manifest, Role, Unit};
use crate::disaster::{
    Channel, DisasterKind, DisasterRecord, EmpiricalDistribution, Orientation, PerPeriodDraw, ScenarioMode,
    ScenarioSpec,
};
use crate::econometrics::PredictionInputs;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Anchor {
    year: i32,
    kind: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDefaults {
    /// Pre-disaster fiscal balance in the file's units.
    fb0: f64,
    adaptive_capacity: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    per_period_draw: PerPeriodDraw,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationFile {
    units: Unit,
    percentile: f64,
    shock_start_year: i32,
    anchor: Anchor,
    scenario: ScenarioDefaults,
    #[serde(default)]
    orientation: BTreeMap<Channel, Orientation>,
    samples: BTreeMap<Channel, BTreeMap<String, Vec<f64>>>,
    prediction: PredictionInputs,
}

/// Scenario calibration: impact samples of the reference event and the
/// scenario defaults, with shares in fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub distribution: EmpiricalDistribution,
    pub percentile: f64,
    pub shock_start_year: i32,
    pub anchor_year: i32,
    pub anchor_kind: DisasterKind,
    pub fb0: f64,
    pub adaptive_capacity: f64,
    pub seed: u64,
    pub per_period_draw: PerPeriodDraw,
    pub prediction: PredictionInputs,
}

impl Calibration {
    /// Scenario spec of `mode` with the calibrated defaults.
    pub fn spec(&self, mode: ScenarioMode) -> ScenarioSpec {
        let mut s = ScenarioSpec::new(mode, self.shock_start_year);
        s.percentile = self.percentile;
        s.fb0 = self.fb0;
        s.adaptive_capacity = self.adaptive_capacity;
        s.seed = self.seed;
        s.per_period_draw = self.per_period_draw;
        s
    }

    /// The largest recorded event of the anchor year and kind.
    pub fn anchor_event<'a>(&self, disasters: &'a [DisasterRecord]) -> Result<&'a DisasterRecord> {
        disasters
            .iter()
            .filter(|d| d.year == self.anchor_year && d.kind == self.anchor_kind)
            .max_by(|a, b| a.damage_gdp.total_cmp(&b.damage_gdp))
            .ok_or_else(|| {
                Error::Missing(format!(
                    "no {:?} in {} among the disaster records",
                    self.anchor_kind, self.anchor_year
                ))
            })
    }
}

/// Converts a share to a fraction through its shortest decimal form, so
/// `-5.2` percent becomes exactly the double nearest `-0.052`.
fn to_fraction(v: f64, unit: Unit) -> Result<f64> {
    match unit {
        Unit::Fraction => Ok(v),
        Unit::Percent => {
            parse_number(&v.to_string(), -2).ok_or_else(|| Error::NonFinite(format!("calibration value {v}")))
        }
        other => Err(Error::InvalidArgument(format!(
            "calibration units must be percent or fraction, not {other}"
        ))),
    }
}

pub fn parse_calibration(text: &str, file: &str) -> Result<Calibration> {
    let c: CalibrationFile = toml::from_str(text).map_err(|e| Error::Parse {
        file: file.to_string(),
        msg: e.to_string(),
    })?;
    let mut dist = EmpiricalDistribution::new();
    for (channel, per_h) in &c.samples {
        let mut hs: Vec<(usize, &Vec<f64>)> = per_h
            .iter()
            .map(|(k, v)| {
                k.strip_prefix('h')
                    .and_then(|n| n.parse().ok())
                    .map(|h| (h, v))
                    .ok_or_else(|| Error::Parse {
                        file: file.to_string(),
                        msg: format!("sample key `{k}` is not of the form h<horizon>"),
                    })
            })
            .collect::<Result<_>>()?;
        hs.sort_by_key(|(h, _)| *h);
        for (h, v) in hs {
            let xs = v.iter().map(|x| to_fraction(*x, c.units)).collect::<Result<Vec<_>>>()?;
            dist.insert(*channel, h, xs)?;
        }
    }
    for (ch, o) in c.orientation {
        dist.set_orientation(ch, o);
    }
    let cal = Calibration {
        distribution: dist,
        percentile: c.percentile,
        shock_start_year: c.shock_start_year,
        anchor_year: c.anchor.year,
        anchor_kind: c.anchor.kind.parse()?,
        fb0: to_fraction(c.scenario.fb0, c.units)?,
        adaptive_capacity: c.scenario.adaptive_capacity,
        seed: c.scenario.seed,
        per_period_draw: c.scenario.per_period_draw,
        prediction: c.prediction,
    };
    cal.spec(ScenarioMode::OneOff).validate()?;
    Ok(cal)
}

pub fn load_calibration(manifest: &Manifest) -> Result<Calibration> {
    let spec = manifest.require(Role::Calibration)?;
    read_calibration(&spec.path)
}

pub(crate) fn read_calibration(path: &Path) -> Result<Calibration> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_calibration(&text, &path.display().to_string())
}
