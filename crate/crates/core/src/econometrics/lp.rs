use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::linalg::ols;
use super::{CoefficientSet, ModelKind, Outcome, Panel, Term};
use crate::error::{Error, Result};

/// Highest horizon of the impact regressions; later years come from the
/// decay rule of the prediction step.
pub const MAX_HORIZON: usize = 2;

/// Fixed-effects local projection of `outcome` at `horizon`.
///
/// Country effects are removed by within-demeaning. Standard errors are
/// conventional, with `n - k - countries` residual degrees of freedom. The
/// reported constant is the average fixed effect, `mean(y) - mean(x)·b`.
/// The prediction SE is the root mean squared residual and R² is the
/// within R².
pub fn lp_estimate(panel: &Panel, outcome: Outcome, horizon: usize) -> Result<CoefficientSet> {
    lp_fit(panel, outcome, horizon).map(|f| f.set)
}

/// Fit together with the demeaned design and its residuals.
#[derive(Debug, Clone)]
pub struct LpFit {
    pub set: CoefficientSet,
    pub within_x: DMatrix<f64>,
    pub residuals: Vec<f64>,
}

pub fn lp_fit(panel: &Panel, outcome: Outcome, horizon: usize) -> Result<LpFit> {
    if horizon > MAX_HORIZON {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} above {MAX_HORIZON}; later horizons are extrapolated, not estimated"
        )));
    }
    let d = panel.design(outcome, horizon)?;
    let (n, k) = d.x.shape();
    let dof = n as i64 - k as i64 - d.n_groups as i64;
    if dof <= 0 {
        return Err(Error::InsufficientData(format!(
            "{n} rows for {k} regressors and {} country effects",
            d.n_groups
        )));
    }

    let mut count = vec![0.0; d.n_groups];
    let mut y_mean = vec![0.0; d.n_groups];
    let mut x_mean = DMatrix::<f64>::zeros(d.n_groups, k);
    for (r, &g) in d.groups.iter().enumerate() {
        count[g] += 1.0;
        y_mean[g] += d.y[r];
        for j in 0..k {
            x_mean[(g, j)] += d.x[(r, j)];
        }
    }
    for g in 0..d.n_groups {
        y_mean[g] /= count[g];
        for j in 0..k {
            x_mean[(g, j)] /= count[g];
        }
    }
    let mut wy = DVector::<f64>::zeros(n);
    let mut wx = DMatrix::<f64>::zeros(n, k);
    for (r, &g) in d.groups.iter().enumerate() {
        wy[r] = d.y[r] - y_mean[g];
        for j in 0..k {
            wx[(r, j)] = d.x[(r, j)] - x_mean[(g, j)];
        }
    }
    let tss = wy.norm_squared();
    if tss == 0.0 {
        return Err(Error::InvalidSeries(format!(
            "{outcome} at horizon {horizon} has no within-country variation"
        )));
    }

    let names: Vec<String> = d.columns.iter().map(|t| t.to_string()).collect();
    let (beta, xtx_inv) = ols(&wx, &wy, &names)?;
    let resid = &wy - &wx * &beta;
    let rss = resid.norm_squared();
    let s2 = rss / dof as f64;
    let cov = &xtx_inv * s2;

    let nf = n as f64;
    let ybar = d.y.iter().sum::<f64>() / nf;
    let xbar = DVector::from_iterator(k, (0..k).map(|j| d.x.column(j).sum() / nf));
    let constant = ybar - xbar.dot(&beta);
    let const_var = s2 / nf + (xbar.transpose() * &cov * &xbar)[(0, 0)];

    let mut estimates = BTreeMap::new();
    let mut ses = BTreeMap::new();
    for (j, t) in d.columns.iter().enumerate() {
        estimates.insert(*t, beta[j]);
        ses.insert(*t, cov[(j, j)].max(0.0).sqrt());
    }
    estimates.insert(Term::Constant, constant);
    ses.insert(Term::Constant, const_var.max(0.0).sqrt());

    let set = CoefficientSet {
        model_kind: ModelKind::Lp,
        outcome,
        horizon,
        estimates,
        standard_errors: ses,
        prediction_se: (rss / nf).sqrt(),
        tau: None,
        n_obs: Some(n),
        r_squared: Some(1.0 - rss / tss),
        n_countries: Some(d.n_groups),
    };
    set.validate()?;
    Ok(LpFit {
        set,
        within_x: wx,
        residuals: resid.iter().copied().collect(),
    })
}
