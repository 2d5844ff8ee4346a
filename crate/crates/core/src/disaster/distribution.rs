use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Channel, Orientation, ScenarioMode, ScenarioSpec, ShockSet, ShockVector};
use crate::error::{Error, Result};
use crate::stats::{quantile_sorted, sorted_finite};

/// Observed impact samples per channel and horizon, in fractions, with the
/// adverse direction of each channel.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    samples: BTreeMap<Channel, Vec<Vec<f64>>>,
    orientation: BTreeMap<Channel, Orientation>,
}

impl EmpiricalDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers the samples of `channel` at `horizon`. Horizons must be
    /// added contiguously from 0.
    pub fn insert(&mut self, channel: Channel, horizon: usize, samples: Vec<f64>) -> Result<()> {
        let sorted = sorted_finite(&samples)?;
        let per_h = self.samples.entry(channel).or_default();
        if horizon > per_h.len() {
            return Err(Error::InvalidArgument(format!(
                "{channel}: horizon {horizon} added before horizon {}",
                per_h.len()
            )));
        }
        if horizon == per_h.len() {
            per_h.push(sorted);
        } else {
            per_h[horizon] = sorted;
        }
        Ok(())
    }

    pub fn set_orientation(&mut self, channel: Channel, orientation: Orientation) {
        self.orientation.insert(channel, orientation);
    }

    /// Adverse direction; growth-like channels default to lower-is-adverse.
    pub fn orientation(&self, channel: Channel) -> Orientation {
        self.orientation.get(&channel).copied().unwrap_or(match channel {
            Channel::Interest => Orientation::HigherIsAdverse,
            _ => Orientation::LowerIsAdverse,
        })
    }

    pub fn channels(&self) -> impl Iterator<Item = Channel> + '_ {
        self.samples.keys().copied()
    }

    /// Number of horizons (H + 1) available for `channel`.
    pub fn horizons(&self, channel: Channel) -> usize {
        self.samples.get(&channel).map_or(0, Vec::len)
    }

    /// Sorted samples at one horizon.
    pub fn samples(&self, channel: Channel, horizon: usize) -> Result<&[f64]> {
        self.samples
            .get(&channel)
            .and_then(|h| h.get(horizon))
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Missing(format!("no samples for {channel} at horizon {horizon}")))
    }

    /// Deviation at severity `p` on the adverse side of the channel.
    pub fn adverse_quantile(&self, channel: Channel, horizon: usize, p: f64) -> Result<f64> {
        let s = self.samples(channel, horizon)?;
        Ok(quantile_sorted(s, self.orientation(channel).level(p)))
    }

    /// Quantile at raw level `u` in [0, 1], adverse tail first.
    pub(crate) fn draw_at(&self, channel: Channel, horizon: usize, u: f64) -> Result<f64> {
        self.adverse_quantile(channel, horizon, u)
    }
}

/// Percentile profile of the reference event for a one-off scenario.
///
/// Per-period draws happen when the scenario is applied, and the
/// econometric modes obtain their vectors from fitted coefficients, so
/// only [`ScenarioMode::OneOff`] is accepted here.
pub fn build_shock_vectors(dist: &EmpiricalDistribution, spec: &ScenarioSpec) -> Result<ShockSet> {
    spec.validate()?;
    if spec.mode != ScenarioMode::OneOff {
        return Err(Error::InvalidArgument(format!(
            "{:?} scenarios do not use a fixed percentile profile",
            spec.mode
        )));
    }
    let mut out = ShockSet::new();
    for &channel in &spec.channels {
        let n = dist.horizons(channel);
        if n == 0 {
            return Err(Error::Missing(format!(
                "calibration has no samples for channel {channel}"
            )));
        }
        let deviations = (0..n)
            .map(|h| dist.adverse_quantile(channel, h, spec.percentile))
            .collect::<Result<Vec<_>>>()?;
        out.insert(channel, ShockVector::new(channel, deviations)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ScenarioSpec {
        ScenarioSpec::new(ScenarioMode::OneOff, 2026)
    }

    #[test]
    fn zero_distribution_gives_zero_vectors() {
        let mut d = EmpiricalDistribution::new();
        for c in [Channel::Growth, Channel::PrimaryBalance] {
            for h in 0..6 {
                d.insert(c, h, vec![0.0; 9]).unwrap();
            }
        }
        let v = build_shock_vectors(&d, &spec()).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.values().all(|s| s.deviations == vec![0.0; 6]));
    }

    #[test]
    fn orientation_picks_adverse_tail() {
        let mut d = EmpiricalDistribution::new();
        let xs: Vec<f64> = (0..=20).map(|k| k as f64 / 1000.0).collect();
        d.insert(Channel::Interest, 0, xs.clone()).unwrap();
        d.insert(Channel::Growth, 0, xs).unwrap();
        let mut s = spec();
        s.channels = [Channel::Interest, Channel::Growth].into_iter().collect();
        let v = build_shock_vectors(&d, &s).unwrap();
        assert_eq!(v[&Channel::Growth].deviations, vec![0.001]);
        assert!((v[&Channel::Interest].deviations[0] - 0.019).abs() < 1e-15);
    }

    #[test]
    fn missing_channel_is_an_error() {
        let mut d = EmpiricalDistribution::new();
        d.insert(Channel::Growth, 0, vec![0.0]).unwrap();
        assert!(matches!(build_shock_vectors(&d, &spec()), Err(Error::Missing(_))));
    }

    #[test]
    fn horizons_must_be_contiguous() {
        let mut d = EmpiricalDistribution::new();
        assert!(d.insert(Channel::Growth, 1, vec![0.0]).is_err());
        assert!(d.insert(Channel::Growth, 0, vec![]).is_err());
    }

    #[test]
    fn other_modes_are_rejected() {
        let d = EmpiricalDistribution::new();
        let s = ScenarioSpec::new(ScenarioMode::LocalProjection, 2026);
        assert!(build_shock_vectors(&d, &s).is_err());
    }
}
