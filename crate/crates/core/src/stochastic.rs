//! Monte Carlo fan charts of the debt ratio.
//!
//! Yearly shocks to `(g, i, pi, pb)` are drawn from a zero-mean
//! multivariate normal with the historical covariance and added to the
//! baseline assumptions. Iteration `k` draws from its own ChaCha20 stream
//! (`seed`, stream `k`), so results do not depend on thread scheduling.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{debt_step, MacroAssumptions, Variable};
use crate::stats::quantile_sorted;

/// Simulated variables in their fixed order.
pub const SHOCK_VARIABLES: [Variable; 4] = [
    Variable::Growth,
    Variable::Interest,
    Variable::Inflation,
    Variable::PrimaryBalance,
];

pub const DEFAULT_LEVELS: [f64; 5] = [0.10, 0.25, 0.50, 0.75, 0.90];

/// Minimum number of annual observations for a covariance estimate.
pub const MIN_OBSERVATIONS: usize = 5;

/// Historical mean and covariance of `(g, i, pi, pb)`, in fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockDistribution {
    pub mu: [f64; 4],
    pub sigma: [[f64; 4]; 4],
    /// True when negative eigenvalues were clipped.
    pub repaired: bool,
}

impl ShockDistribution {
    /// Zero-mean distribution with covariance `sigma`, repaired if needed.
    pub fn from_covariance(sigma: [[f64; 4]; 4]) -> Result<Self> {
        if sigma.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariance entry".into()));
        }
        let (sigma, repaired) = repair_psd(sigma);
        Ok(ShockDistribution {
            mu: [0.0; 4],
            sigma,
            repaired,
        })
    }

    fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|r, c| self.sigma[r][c])
    }
}

/// Symmetrizes and clips negative eigenvalues to zero.
fn repair_psd(sigma: [[f64; 4]; 4]) -> ([[f64; 4]; 4], bool) {
    let m = Matrix4::from_fn(|r, c| 0.5 * (sigma[r][c] + sigma[c][r]));
    let eig = SymmetricEigen::new(m);
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    if eig.eigenvalues.iter().all(|l| *l >= -1e-12 * scale) {
        return (to_array(&m), false);
    }
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let r = eig.eigenvectors * Matrix4::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let r = 0.5 * (r + r.transpose());
    (to_array(&r), true)
}

fn to_array(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m[(r, c)];
        }
    }
    out
}

/// Sample mean and covariance (denominator `n - 1`) of the yearly
/// `(g, i, pi, pb)` observations in `history`.
pub fn estimate_distribution(history: &MacroAssumptions) -> Result<ShockDistribution> {
    let n = history.len();
    if n < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "{n} annual observations, need at least {MIN_OBSERVATIONS}"
        )));
    }
    let cols: Vec<&[f64]> = SHOCK_VARIABLES.iter().map(|v| history.series(*v)).collect();
    if cols.iter().flat_map(|c| c.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("history entry".into()));
    }
    let mut mu = [0.0; 4];
    for (m, c) in mu.iter_mut().zip(&cols) {
        // shifted by the first value so a constant series has an exact mean
        *m = c[0] + c.iter().map(|v| v - c[0]).sum::<f64>() / n as f64;
    }
    let mut sigma = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            sigma[a][b] = (0..n).map(|t| (cols[a][t] - mu[a]) * (cols[b][t] - mu[b])).sum::<f64>() / (n - 1) as f64;
        }
    }
    let mut d = ShockDistribution::from_covariance(sigma)?;
    d.mu = mu;
    Ok(d)
}

/// Maps standard normal vectors to draws with covariance `sigma` and mean zero.
#[derive(Debug, Clone)]
pub struct ShockSampler {
    factor: Matrix4<f64>,
}

impl ShockSampler {
    /// Cholesky factor when `sigma` is positive definite; otherwise the
    /// symmetric square root from the eigen-decomposition, which also
    /// covers singular and zero covariances.
    pub fn new(dist: &ShockDistribution) -> Result<Self> {
        let m = dist.matrix();
        if let Some(c) = m.cholesky() {
            return Ok(ShockSampler { factor: c.l() });
        }
        let eig = SymmetricEigen::new(m);
        let scale = eig.eigenvalues.amax();
        if eig
            .eigenvalues
            .iter()
            .any(|l| *l < -1e-10 * scale.max(f64::MIN_POSITIVE))
        {
            return Err(Error::Factorization("covariance is not positive semidefinite".into()));
        }
        let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        let factor = eig.eigenvectors * Matrix4::from_diagonal(&root);
        if factor.iter().any(|v| !v.is_finite()) {
            return Err(Error::Factorization("non-finite covariance factor".into()));
        }
        Ok(ShockSampler { factor })
    }

    /// One zero-mean deviation vector in `(g, i, pi, pb)` order.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> [f64; 4] {
        let z = Vector4::from_fn(|_, _| StandardNormal.sample(rng));
        let d = self.factor * z;
        [d[0], d[1], d[2], d[3]]
    }
}

/// Simulation controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanOptions {
    pub iterations: usize,
    pub seed: u64,
    /// Percentile levels in (0, 1).
    pub levels: Vec<f64>,
    /// Persistence of shocks from one year to the next; 0 draws them
    /// independently across years.
    pub ar1: f64,
}

impl Default for FanOptions {
    fn default() -> Self {
        FanOptions {
            iterations: 10_000,
            seed: 0,
            levels: DEFAULT_LEVELS.to_vec(),
            ar1: 0.0,
        }
    }
}

/// Per-year percentile bands of simulated debt ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanChart {
    pub years: Vec<i32>,
    pub levels: Vec<f64>,
    /// `bands[l][t]` is level `levels[l]` in year `years[t]`.
    pub bands: Vec<Vec<f64>>,
    /// Deterministic path without shocks.
    pub baseline: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
    /// Simulated paths, one per iteration; kept for exceedance counts and
    /// audit dumps, not serialized with the chart.
    #[serde(skip)]
    pub paths: Vec<Vec<f64>>,
}

impl FanChart {
    pub fn band(&self, level: f64) -> Option<&[f64]> {
        self.levels
            .iter()
            .position(|l| (l - level).abs() < 1e-12)
            .map(|i| self.bands[i].as_slice())
    }

    pub fn value(&self, level: f64, year: i32) -> Option<f64> {
        let t = self.years.iter().position(|y| *y == year)?;
        self.band(level).map(|b| b[t])
    }
}

fn project(d0: f64, baseline: &MacroAssumptions, devs: &[[f64; 4]]) -> Result<Vec<f64>> {
    let mut d = d0;
    let mut out = Vec::with_capacity(baseline.len());
    for (k, dev) in devs.iter().enumerate() {
        let mut r = baseline.rates(k);
        r.g += dev[0];
        r.i += dev[1];
        r.pi += dev[2];
        r.pb += dev[3];
        d = debt_step(d, &r).map_err(|e| e.at_year(baseline.years()[k]))?;
        out.push(d);
    }
    Ok(out)
}

/// Simulates `opts.iterations` shocked debt paths from `d0` over the
/// baseline years and summarizes them by percentile.
pub fn simulate_fan(
    d0: f64,
    baseline: &MacroAssumptions,
    dist: &ShockDistribution,
    opts: &FanOptions,
) -> Result<FanChart> {
    if opts.iterations == 0 {
        return Err(Error::InvalidArgument("fan chart needs at least one iteration".into()));
    }
    if opts.levels.is_empty() || opts.levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(Error::InvalidArgument("percentile levels must lie in (0, 1)".into()));
    }
    if !(opts.ar1.is_finite() && opts.ar1.abs() < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "AR(1) coefficient {} outside (-1, 1)",
            opts.ar1
        )));
    }
    let sampler = ShockSampler::new(dist)?;
    let n_years = baseline.len();
    let zero = vec![[0.0; 4]; n_years];
    let base_path = project(d0, baseline, &zero)?;

    let paths: Vec<Vec<f64>> = (0..opts.iterations)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let mut devs = Vec::with_capacity(n_years);
            let mut prev = [0.0; 4];
            for _ in 0..n_years {
                let e = sampler.sample(&mut rng);
                let mut cur = e;
                if opts.ar1 != 0.0 {
                    for j in 0..4 {
                        cur[j] += opts.ar1 * prev[j];
                    }
                }
                devs.push(cur);
                prev = cur;
            }
            project(d0, baseline, &devs)
        })
        .collect::<Result<_>>()?;

    let mut levels = opts.levels.clone();
    levels.sort_by(f64::total_cmp);
    let mut bands = vec![Vec::with_capacity(n_years); levels.len()];
    let mut column = Vec::with_capacity(opts.iterations);
    for t in 0..n_years {
        column.clear();
        column.extend(paths.iter().map(|p| p[t]));
        column.sort_by(f64::total_cmp);
        for (b, l) in bands.iter_mut().zip(&levels) {
            b.push(quantile_sorted(&column, *l));
        }
    }
    Ok(FanChart {
        years: baseline.years().to_vec(),
        levels,
        bands,
        baseline: base_path,
        iterations: opts.iterations,
        seed: opts.seed,
        paths,
    })
}

/// Share of simulated paths strictly above one threshold, per year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exceedance {
    pub threshold: f64,
    pub years: Vec<i32>,
    pub probability: Vec<f64>,
}

/// Per-year share of paths above each threshold.
pub fn band_summary(fan: &FanChart, thresholds: &[f64]) -> Result<Vec<Exceedance>> {
    if let Some(t) = thresholds.iter().find(|t| !t.is_finite()) {
        return Err(Error::NonFinite(format!("threshold {t}")));
    }
    if fan.paths.is_empty() {
        return Err(Error::Missing("fan chart carries no simulated paths".into()));
    }
    let n = fan.paths.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&th| Exceedance {
            threshold: th,
            years: fan.years.clone(),
            probability: (0..fan.years.len())
                .map(|t| fan.paths.iter().filter(|p| p[t] > th).count() as f64 / n)
                .collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{project_path, Rates};

    fn baseline() -> MacroAssumptions {
        let r = Rates {
            g: 0.025,
            pi: 0.02,
            i: 0.03,
            pb: 0.0,
            of: 0.0,
        };
        MacroAssumptions::from_rates(2025, &[r; 7]).unwrap()
    }

    fn small() -> ShockDistribution {
        let mut s = [[0.0; 4]; 4];
        for (k, v) in [1e-4, 4e-5, 4e-5, 1e-4].iter().enumerate() {
            s[k][k] = *v;
        }
        s[0][3] = 5e-5;
        s[3][0] = 5e-5;
        ShockDistribution::from_covariance(s).unwrap()
    }

    #[test]
    fn constant_history_has_zero_covariance() {
        let d = estimate_distribution(&baseline()).unwrap();
        assert!(d.sigma.iter().flatten().all(|v| *v == 0.0));
        assert_eq!(d.mu[0], 0.025);
    }

    #[test]
    fn perfectly_correlated_series() {
        let rates: Vec<Rates> = (0..6)
            .map(|k| {
                let x = k as f64 * 0.01;
                Rates {
                    g: x,
                    pi: 0.02,
                    i: 0.03,
                    pb: 3.0 * x,
                    of: 0.0,
                }
            })
            .collect();
        let h = MacroAssumptions::from_rates(2000, &rates).unwrap();
        let d = estimate_distribution(&h).unwrap();
        let sd_g = d.sigma[0][0].sqrt();
        let sd_pb = d.sigma[3][3].sqrt();
        assert!((d.sigma[0][3] - sd_g * sd_pb).abs() < 1e-15);
    }

    #[test]
    fn too_few_years() {
        let h = baseline().window(2025, 2028).unwrap();
        assert!(matches!(estimate_distribution(&h), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn indefinite_covariance_is_repaired() {
        let mut s = [[0.0; 4]; 4];
        s[0][0] = 1.0;
        s[1][1] = 1.0;
        s[0][1] = 2.0;
        s[1][0] = 2.0;
        let d = ShockDistribution::from_covariance(s).unwrap();
        assert!(d.repaired);
        let eig = SymmetricEigen::new(d.matrix());
        assert!(eig.eigenvalues.iter().all(|l| *l > -1e-12));
        assert!(ShockSampler::new(&d).is_ok());
    }

    #[test]
    fn zero_covariance_collapses_to_baseline() {
        let b = baseline();
        let d = ShockDistribution::from_covariance([[0.0; 4]; 4]).unwrap();
        let opts = FanOptions {
            iterations: 50,
            ..FanOptions::default()
        };
        let fan = simulate_fan(0.58, &b, &d, &opts).unwrap();
        let det = project_path(0.58, &b).unwrap();
        for band in &fan.bands {
            assert_eq!(band, &det.d);
        }
        assert_eq!(fan.baseline, det.d);
    }

    #[test]
    fn bands_are_monotone_and_reproducible() {
        let opts = FanOptions {
            iterations: 2000,
            seed: 7,
            ..FanOptions::default()
        };
        let a = simulate_fan(0.58, &baseline(), &small(), &opts).unwrap();
        let b = simulate_fan(0.58, &baseline(), &small(), &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.paths, b.paths);
        for t in 0..a.years.len() {
            for l in 1..a.levels.len() {
                assert!(a.bands[l - 1][t] <= a.bands[l][t]);
            }
        }
    }

    #[test]
    fn sampler_moments() {
        let d = small();
        let s = ShockSampler::new(&d).unwrap();
        let n = 40_000;
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let draws: Vec<[f64; 4]> = (0..n).map(|_| s.sample(&mut rng)).collect();
        for a in 0..4 {
            let m = draws.iter().map(|x| x[a]).sum::<f64>() / n as f64;
            assert!(m.abs() < 4.0 * (d.sigma[a][a] / n as f64).sqrt(), "mean {a}: {m}");
            for b in 0..4 {
                let c = draws.iter().map(|x| x[a] * x[b]).sum::<f64>() / n as f64;
                let tol = 0.05 * (d.sigma[a][a] * d.sigma[b][b]).sqrt();
                assert!((c - d.sigma[a][b]).abs() < tol, "cov {a}{b}: {c} vs {}", d.sigma[a][b]);
            }
        }
    }

    #[test]
    fn exceedance_extremes() {
        let opts = FanOptions {
            iterations: 500,
            ..FanOptions::default()
        };
        let fan = simulate_fan(0.58, &baseline(), &small(), &opts).unwrap();
        let s = band_summary(&fan, &[-1.0, 10.0, 0.58]).unwrap();
        assert!(s[0].probability.iter().all(|p| *p == 1.0));
        assert!(s[1].probability.iter().all(|p| *p == 0.0));
        assert!(s[2].probability.iter().all(|p| *p > 0.0 && *p < 1.0));
        assert!(band_summary(&fan, &[f64::NAN]).is_err());
    }

    #[test]
    fn rejects_bad_options() {
        let d = small();
        let mut o = FanOptions::default();
        o.iterations = 0;
        assert!(simulate_fan(0.5, &baseline(), &d, &o).is_err());
        o.iterations = 10;
        o.levels = vec![1.0];
        assert!(simulate_fan(0.5, &baseline(), &d, &o).is_err());
    }
}
