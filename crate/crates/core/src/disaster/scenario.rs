use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{Channel, EmpiricalDistribution, PerPeriodDraw, ScenarioMode, ScenarioSpec, ShockSet};
use crate::error::{Error, Result};
use crate::model::{project_path, DebtPath, MacroAssumptions};

/// Shocked assumptions, their debt path and the per-year deviations that
/// were added (zero outside the affected years).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub shocked: MacroAssumptions,
    pub path: DebtPath,
    pub deviations: BTreeMap<Channel, Vec<f64>>,
}

fn start_index(baseline: &MacroAssumptions, spec: &ScenarioSpec) -> Result<usize> {
    baseline.index_of(spec.shock_start_year).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "shock start year {} outside projection window {}-{}",
            spec.shock_start_year,
            baseline.first_year(),
            baseline.last_year()
        ))
    })
}

fn finish(
    baseline: &MacroAssumptions,
    d0: f64,
    start_year: i32,
    deviations: BTreeMap<Channel, Vec<f64>>,
) -> Result<ScenarioOutcome> {
    let start = baseline.index_of(start_year).expect("start year checked by caller");
    let mut shocked = baseline.clone();
    for (channel, devs) in &deviations {
        shocked = shocked.with_added(channel.variable(), start_year, &devs[start..])?;
    }
    let path = project_path(d0, &shocked)?;
    Ok(ScenarioOutcome {
        shocked,
        path,
        deviations,
    })
}

/// Adds each channel's deviation sequence to the baseline once, with `s_0`
/// on `spec.shock_start_year`, and projects the shocked path. Horizons
/// past the window end are dropped.
pub fn apply_scenario(
    baseline: &MacroAssumptions,
    d0: f64,
    spec: &ScenarioSpec,
    vectors: &ShockSet,
) -> Result<ScenarioOutcome> {
    spec.validate()?;
    let start = start_index(baseline, spec)?;
    let n = baseline.len();
    let mut deviations = BTreeMap::new();
    for &channel in &spec.channels {
        let v = vectors
            .get(&channel)
            .ok_or_else(|| Error::Missing(format!("no shock vector for channel {channel}")))?;
        if v.channel != channel {
            return Err(Error::InvalidArgument(format!(
                "vector keyed {channel} carries channel {}",
                v.channel
            )));
        }
        let mut full = vec![0.0; n];
        for (slot, dev) in full[start..].iter_mut().zip(&v.deviations) {
            *slot = *dev;
        }
        deviations.insert(channel, full);
    }
    finish(baseline, d0, spec.shock_start_year, deviations)
}

/// Per-period scenario: from the start year onwards every year receives a
/// draw from the empirical impact distribution, seeded by `spec.seed`.
///
/// A single uniform level is drawn per year and shared by all channels, so
/// a severe growth year is also a severe fiscal year; the level is mapped
/// onto each channel's adverse tail through its orientation.
pub fn apply_per_period(
    baseline: &MacroAssumptions,
    d0: f64,
    spec: &ScenarioSpec,
    dist: &EmpiricalDistribution,
) -> Result<ScenarioOutcome> {
    spec.validate()?;
    if spec.mode != ScenarioMode::PerPeriod {
        return Err(Error::InvalidArgument(format!(
            "{:?} is not a per-period scenario",
            spec.mode
        )));
    }
    let start = start_index(baseline, spec)?;
    let n = baseline.len();
    for &c in &spec.channels {
        if dist.horizons(c) == 0 {
            return Err(Error::Missing(format!("calibration has no samples for channel {c}")));
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut deviations: BTreeMap<Channel, Vec<f64>> = spec.channels.iter().map(|c| (*c, vec![0.0; n])).collect();
    for t in start..n {
        let u: f64 = rng.random();
        for (&channel, devs) in deviations.iter_mut() {
            match spec.per_period_draw {
                PerPeriodDraw::SingleYear => {
                    devs[t] = dist.draw_at(channel, 0, u)?;
                }
                PerPeriodDraw::Profile => {
                    for h in 0..dist.horizons(channel) {
                        if t + h >= n {
                            break;
                        }
                        devs[t + h] += dist.draw_at(channel, h, u)?;
                    }
                }
            }
        }
    }
    finish(baseline, d0, spec.shock_start_year, deviations)
}
