//! Runs the engines on a loaded dataset: the path shared by the command
//! line and the replication checks.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::disaster::{
    apply_per_period, apply_scenario, build_shock_vectors, Channel, PerPeriodDraw, ScenarioMode, ScenarioOutcome,
    ScenarioSpec,
};
use crate::econometrics::{
    counterfactual, predict_path, CoefficientTable, Counterfactual, ModelKind, PredictedShockPath, PredictionInputs,
};
use crate::error::{Error, Result};
use crate::ingest::{
    load_calibration, load_coefficients, load_disasters, load_history, load_projections, parse_number, Calibration,
    History, Manifest, Provenance, Unit,
};
use crate::model::{project_path, DebtPath, MacroAssumptions};
use crate::stochastic::{estimate_distribution, simulate_fan, FanChart, FanOptions, ShockDistribution};

/// Overrides of the calibrated scenario defaults. Shares follow the
/// enclosing file's `units`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOverrides {
    pub percentile: Option<f64>,
    pub shock_start_year: Option<i32>,
    pub fb0: Option<f64>,
    pub adaptive_capacity: Option<f64>,
    pub seed: Option<u64>,
    pub per_period_draw: Option<PerPeriodDraw>,
    pub channels: Option<BTreeSet<Channel>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionOverrides {
    pub lcompshock: Option<f64>,
    pub extra_nd1995: Option<f64>,
    pub ae: Option<f64>,
    pub decay: Option<f64>,
    pub horizons: Option<usize>,
    pub band_z: Option<f64>,
}

fn default_units() -> Unit {
    Unit::Percent
}

/// One scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: ScenarioMode,
    /// Manifest key of the coefficient file; regression modes only.
    #[serde(default)]
    pub coefficients: Option<String>,
    #[serde(default = "default_units")]
    pub units: Unit,
    /// Last projection year; later years repeat the final assumptions.
    #[serde(default)]
    pub horizon_end: Option<i32>,
    /// Adds the inflation and interest channels.
    #[serde(default)]
    pub four_channel: bool,
    #[serde(default)]
    pub scenario: SpecOverrides,
    #[serde(default)]
    pub prediction: PredictionOverrides,
}

/// Two regression scenarios sharing one coefficient file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterfactualConfig {
    pub mode: ScenarioMode,
    #[serde(default)]
    pub coefficients: Option<String>,
    #[serde(default = "default_units")]
    pub units: Unit,
    #[serde(default)]
    pub horizon_end: Option<i32>,
    #[serde(default)]
    pub four_channel: bool,
    #[serde(default)]
    pub prediction: PredictionOverrides,
    #[serde(default)]
    pub a: SpecOverrides,
    #[serde(default)]
    pub b: SpecOverrides,
}

fn parse_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        file: path.display().to_string(),
        msg: e.to_string(),
    })
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        parse_toml(path)
    }

    pub fn new(mode: ScenarioMode) -> Self {
        ScenarioConfig {
            mode,
            coefficients: None,
            units: Unit::Percent,
            horizon_end: None,
            four_channel: false,
            scenario: SpecOverrides::default(),
            prediction: PredictionOverrides::default(),
        }
    }
}

impl CounterfactualConfig {
    pub fn load(path: &Path) -> Result<Self> {
        parse_toml(path)
    }

    fn side(&self, overrides: &SpecOverrides) -> ScenarioConfig {
        ScenarioConfig {
            mode: self.mode,
            coefficients: self.coefficients.clone(),
            units: self.units,
            horizon_end: self.horizon_end,
            four_channel: self.four_channel,
            scenario: overrides.clone(),
            prediction: self.prediction.clone(),
        }
    }
}

fn share(v: f64, unit: Unit) -> Result<f64> {
    match unit {
        Unit::Fraction => Ok(v),
        Unit::Percent => parse_number(&v.to_string(), -2).ok_or_else(|| Error::NonFinite(format!("share {v}"))),
        other => Err(Error::InvalidArgument(format!(
            "config units must be percent or fraction, not {other}"
        ))),
    }
}

fn resolve_spec(cal: &Calibration, cfg: &ScenarioConfig) -> Result<ScenarioSpec> {
    let o = &cfg.scenario;
    let mut s = cal.spec(cfg.mode);
    if let Some(v) = o.percentile {
        s.percentile = v;
    }
    if let Some(v) = o.shock_start_year {
        s.shock_start_year = v;
    }
    if let Some(v) = o.fb0 {
        s.fb0 = share(v, cfg.units)?;
    }
    if let Some(v) = o.adaptive_capacity {
        s.adaptive_capacity = v;
    }
    if let Some(v) = o.seed {
        s.seed = v;
    }
    if let Some(v) = o.per_period_draw {
        s.per_period_draw = v;
    }
    if let Some(v) = &o.channels {
        s.channels = v.clone();
    }
    if cfg.four_channel {
        s.channels.extend([Channel::Inflation, Channel::Interest]);
    }
    s.validate()?;
    Ok(s)
}

fn resolve_inputs(cal: &Calibration, o: &PredictionOverrides) -> PredictionInputs {
    let mut p = cal.prediction;
    p.lcompshock = o.lcompshock.unwrap_or(p.lcompshock);
    p.extra_nd1995 = o.extra_nd1995.unwrap_or(p.extra_nd1995);
    p.ae = o.ae.unwrap_or(p.ae);
    p.decay = o.decay.unwrap_or(p.decay);
    p.horizons = o.horizons.unwrap_or(p.horizons);
    p.band_z = o.band_z.unwrap_or(p.band_z);
    p
}

/// Observed history, the projection window and the debt path over it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRun {
    pub history: History,
    pub assumptions: MacroAssumptions,
    pub anchor_year: i32,
    pub d0: f64,
    pub path: DebtPath,
    pub provenance: Provenance,
}

/// Baseline from the anchor year before the first projection year, with
/// the window optionally extended to `horizon_end`.
pub fn run_baseline(manifest: &Manifest, horizon_end: Option<i32>) -> Result<BaselineRun> {
    let history = load_history(manifest)?;
    let proj = load_projections(manifest)?;
    let mut assumptions = proj.assumptions;
    if let Some(end) = horizon_end {
        if end < assumptions.first_year() {
            return Err(Error::InvalidArgument(format!(
                "horizon end {end} precedes the first projection year {}",
                assumptions.first_year()
            )));
        }
        assumptions = if end <= assumptions.last_year() {
            assumptions.window(assumptions.first_year(), end)?
        } else {
            assumptions.extend_flat(end)
        };
    }
    let anchor_year = assumptions.first_year() - 1;
    let d0 = history.debt.get(anchor_year).ok_or_else(|| Error::MissingYear {
        what: "observed debt".into(),
        year: anchor_year,
    })?;
    let path = project_path(d0, &assumptions)?;
    let mut provenance = history.provenance.clone();
    provenance.merge(proj.provenance);
    Ok(BaselineRun {
        history,
        assumptions,
        anchor_year,
        d0,
        path,
        provenance,
    })
}

/// Result of one scenario against its baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRun {
    pub spec: ScenarioSpec,
    pub inputs: Option<PredictionInputs>,
    pub baseline: BaselineRun,
    pub outcome: ScenarioOutcome,
    pub predicted: Option<PredictedShockPath>,
    pub warnings: Vec<String>,
}

fn coefficient_table(
    manifest: &Manifest,
    key: Option<&str>,
    kind: ModelKind,
) -> Result<(CoefficientTable, Provenance)> {
    let spec = match key {
        Some(k) => manifest
            .coefficients
            .get(k)
            .ok_or_else(|| Error::Missing(format!("manifest has no coefficient file `{k}`")))?,
        None => {
            let default = match kind {
                ModelKind::Lp => "lp",
                ModelKind::Qr => "qr",
            };
            manifest
                .coefficients
                .get(default)
                .ok_or_else(|| Error::Missing(format!("manifest has no coefficient file `{default}`")))?
        }
    };
    let (table, log) = load_coefficients(spec)?;
    if !table.iter().any(|c| c.model_kind == kind) {
        return Err(Error::Missing(format!(
            "{} holds no {kind} coefficients",
            spec.path.display()
        )));
    }
    Ok((table, log))
}

fn model_kind(mode: ScenarioMode) -> Result<ModelKind> {
    match mode {
        ScenarioMode::LocalProjection => Ok(ModelKind::Lp),
        ScenarioMode::QuantileRegression => Ok(ModelKind::Qr),
        m => Err(Error::InvalidArgument(format!("{m:?} is not a regression mode"))),
    }
}

pub fn run_scenario(manifest: &Manifest, cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    let baseline = run_baseline(manifest, cfg.horizon_end)?;
    let cal = load_calibration(manifest)?;
    let spec = resolve_spec(&cal, cfg)?;
    let mut warnings = baseline.provenance.warnings.clone();
    let (outcome, predicted, inputs) = match cfg.mode {
        ScenarioMode::OneOff => {
            let vectors = build_shock_vectors(&cal.distribution, &spec)?;
            (
                apply_scenario(&baseline.assumptions, baseline.d0, &spec, &vectors)?,
                None,
                None,
            )
        }
        ScenarioMode::PerPeriod => (
            apply_per_period(&baseline.assumptions, baseline.d0, &spec, &cal.distribution)?,
            None,
            None,
        ),
        ScenarioMode::LocalProjection | ScenarioMode::QuantileRegression => {
            let (table, log) = coefficient_table(manifest, cfg.coefficients.as_deref(), model_kind(cfg.mode)?)?;
            warnings.extend(log.warnings);
            let (disasters, dlog) = load_disasters(manifest)?;
            warnings.extend(dlog.warnings);
            let event = cal.anchor_event(&disasters)?;
            let inputs = resolve_inputs(&cal, &cfg.prediction);
            let predicted = predict_path(&table, &spec, event, &inputs)?;
            warnings.extend(predicted.warnings.iter().cloned());
            let vectors = predicted.to_shock_set()?;
            let outcome = apply_scenario(&baseline.assumptions, baseline.d0, &spec, &vectors)?;
            (outcome, Some(predicted), Some(inputs))
        }
    };
    if outcome.path.negative_warning {
        warnings.push("shocked path turns negative".into());
    }
    Ok(ScenarioRun {
        spec,
        inputs,
        baseline,
        outcome,
        predicted,
        warnings,
    })
}

/// Two regression scenarios on one coefficient file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualRun {
    pub a: ScenarioRun,
    pub b: ScenarioRun,
    pub paths: Counterfactual,
}

pub fn run_counterfactual(manifest: &Manifest, cfg: &CounterfactualConfig) -> Result<CounterfactualRun> {
    let kind = model_kind(cfg.mode)?;
    let ca = cfg.side(&cfg.a);
    let cb = cfg.side(&cfg.b);
    let a = run_scenario(manifest, &ca)?;
    let b = run_scenario(manifest, &cb)?;
    let (table, _) = coefficient_table(manifest, cfg.coefficients.as_deref(), kind)?;
    let (disasters, _) = load_disasters(manifest)?;
    let cal = load_calibration(manifest)?;
    let event = cal.anchor_event(&disasters)?;
    let inputs = a.inputs.expect("regression runs carry prediction inputs");
    let paths = counterfactual(&table, &a.spec, &b.spec, event, &inputs)?;
    Ok(CounterfactualRun { a, b, paths })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanRun {
    pub baseline: BaselineRun,
    pub distribution: ShockDistribution,
    pub chart: FanChart,
}

/// Fan chart around the baseline, with shocks estimated from the history.
pub fn run_fan(manifest: &Manifest, opts: &FanOptions, horizon_end: Option<i32>) -> Result<FanRun> {
    let baseline = run_baseline(manifest, horizon_end)?;
    let distribution = estimate_distribution(&baseline.history.assumptions)?;
    let chart = simulate_fan(baseline.d0, &baseline.assumptions, &distribution, opts)?;
    Ok(FanRun {
        baseline,
        distribution,
        chart,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    #[serde(default)]
    pub horizon_end: Option<i32>,
}

impl BaselineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        parse_toml(path)
    }
}

/// Fan-chart run settings; unset fields take the simulation defaults.
/// Thresholds are fractions of GDP.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanConfig {
    pub iterations: Option<usize>,
    pub seed: Option<u64>,
    pub levels: Option<Vec<f64>>,
    pub ar1: Option<f64>,
    pub thresholds: Option<Vec<f64>>,
    pub horizon_end: Option<i32>,
}

impl FanConfig {
    pub fn load(path: &Path) -> Result<Self> {
        parse_toml(path)
    }

    pub fn options(&self) -> FanOptions {
        let d = FanOptions::default();
        FanOptions {
            iterations: self.iterations.unwrap_or(d.iterations),
            seed: self.seed.unwrap_or(d.seed),
            levels: self.levels.clone().unwrap_or(d.levels),
            ar1: self.ar1.unwrap_or(d.ar1),
        }
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.thresholds
            .clone()
            .unwrap_or_else(|| vec![crate::report::MAASTRICHT_THRESHOLD])
    }
}

impl CounterfactualConfig {
    /// Pairs two scenario configs; they must agree on everything except
    /// the scenario overrides.
    pub fn from_pair(a: &ScenarioConfig, b: &ScenarioConfig) -> Result<Self> {
        let same = a.mode == b.mode
            && a.coefficients == b.coefficients
            && a.units == b.units
            && a.four_channel == b.four_channel
            && a.prediction == b.prediction;
        if !same {
            return Err(Error::InvalidArgument(
                "paired configs differ in mode, coefficients, units, channels or prediction inputs".into(),
            ));
        }
        Ok(CounterfactualConfig {
            mode: a.mode,
            coefficients: a.coefficients.clone(),
            units: a.units,
            horizon_end: a.horizon_end.max(b.horizon_end),
            four_channel: a.four_channel,
            prediction: a.prediction.clone(),
            a: a.scenario.clone(),
            b: b.scenario.clone(),
        })
    }
}
