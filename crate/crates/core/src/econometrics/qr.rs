use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::linalg::collinear_columns;
use super::lp::MAX_HORIZON;
use super::{CoefficientSet, ModelKind, Outcome, Panel, Term};
use crate::error::{Error, Result};
use crate::stats::quantile_sorted;

/// Solver controls for [`quantile_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrOptions {
    /// Reweighting passes per smoothing level.
    pub irls_iterations: usize,
    /// Smoothing levels, each ten times tighter than the last.
    pub smoothing_levels: usize,
    /// Cap on exact vertex-to-vertex moves after the smoothed start.
    pub max_pivots: usize,
}

impl Default for QrOptions {
    fn default() -> Self {
        QrOptions {
            irls_iterations: 30,
            smoothing_levels: 6,
            max_pivots: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QrFit {
    pub beta: Vec<f64>,
    pub loss: f64,
    pub residuals: Vec<f64>,
    /// Rows interpolated exactly by the solution.
    pub basis: Vec<usize>,
    pub pivots: usize,
}

fn check_loss(r: f64, tau: f64) -> f64 {
    if r >= 0.0 {
        tau * r
    } else {
        (tau - 1.0) * r
    }
}

/// Pinball loss `Σ ρ_τ(y - x·b)` of coefficients `beta` on row-major data.
pub fn pinball_loss(rows: &[Vec<f64>], y: &[f64], beta: &[f64], tau: f64) -> f64 {
    rows.iter()
        .zip(y)
        .map(|(x, yi)| {
            let fit: f64 = x.iter().zip(beta).map(|(a, b)| a * b).sum();
            check_loss(yi - fit, tau)
        })
        .sum()
}

/// Linear quantile regression of `y` on the rows of `rows` (include a column
/// of ones for an intercept).
///
/// A smoothed reweighted least-squares pass gets close to the optimum, then
/// exact descent along the edges of the loss polyhedron moves between
/// basic solutions until no edge lowers the loss. The result interpolates
/// `k` observations, so it is an exact minimizer up to rounding.
pub fn quantile_fit(rows: &[Vec<f64>], y: &[f64], tau: f64, opts: &QrOptions) -> Result<QrFit> {
    let k = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != k) || rows.len() != y.len() {
        return Err(Error::InvalidArgument("ragged quantile-regression input".into()));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let x = DMatrix::from_row_slice(rows.len(), k, &flat);
    let names: Vec<String> = (0..k).map(|j| format!("x{j}")).collect();
    fit_matrix(&x, y, tau, opts, &names)
}

pub(crate) fn fit_matrix(x: &DMatrix<f64>, y: &[f64], tau: f64, opts: &QrOptions, names: &[String]) -> Result<QrFit> {
    let (n, k) = x.shape();
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidArgument(format!("tau {tau} outside (0, 1)")));
    }
    if k == 0 || n < k {
        return Err(Error::InsufficientData(format!("{n} observations for {k} regressors")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("quantile-regression data".into()));
    }
    let bad = collinear_columns(x, names);
    if !bad.is_empty() {
        return Err(Error::RankDeficient { columns: bad });
    }
    let yv = DVector::from_column_slice(y);
    let start = smoothed_start(x, &yv, tau, opts);
    let basis = initial_basis(x, &yv, &start)?;
    simplex_polish(x, &yv, tau, basis, opts.max_pivots)
}

/// Reweighted least squares on a smoothed check loss.
fn smoothed_start(x: &DMatrix<f64>, y: &DVector<f64>, tau: f64, opts: &QrOptions) -> DVector<f64> {
    let xt = x.transpose();
    let mut beta = match (&xt * x).cholesky() {
        Some(c) => c.solve(&(&xt * y)),
        None => DVector::zeros(x.ncols()),
    };
    let mut r = y - x * &beta;
    let scale = r.iter().map(|v| v.abs()).sum::<f64>() / r.len() as f64 + f64::MIN_POSITIVE;
    let mut eps = 0.1 * scale;
    for _ in 0..opts.smoothing_levels {
        for _ in 0..opts.irls_iterations {
            let w = DVector::from_iterator(
                r.len(),
                r.iter().map(|ri| {
                    let side = if *ri >= 0.0 { tau } else { 1.0 - tau };
                    side / ri.abs().max(eps)
                }),
            );
            let xw = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * w[i]);
            let Some(c) = (xw.transpose() * x).cholesky() else {
                break;
            };
            let next = c.solve(&(xw.transpose() * y));
            let step = (&next - &beta).amax();
            beta = next;
            r = y - x * &beta;
            if step <= 1e-10 * (1.0 + beta.amax()) {
                break;
            }
        }
        eps *= 0.1;
    }
    beta
}

/// `k` linearly independent rows with the smallest residuals at `beta`.
fn initial_basis(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> Result<Vec<usize>> {
    let k = x.ncols();
    let r = y - x * beta;
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    order.sort_by(|a, b| r[*a].abs().total_cmp(&r[*b].abs()));
    let mut basis = Vec::with_capacity(k);
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(k);
    for i in order {
        let row = x.row(i).transpose();
        let n0 = row.norm();
        if n0 == 0.0 {
            continue;
        }
        let mut v = row;
        for u in &q {
            let c = u.dot(&v);
            v.axpy(-c, u, 1.0);
        }
        let nv = v.norm();
        if nv > 1e-8 * n0 {
            q.push(v / nv);
            basis.push(i);
            if basis.len() == k {
                return Ok(basis);
            }
        }
    }
    Err(Error::RankDeficient {
        columns: vec!["design rows span fewer than k directions".into()],
    })
}

fn basis_solve(x: &DMatrix<f64>, y: &DVector<f64>, basis: &[usize]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let k = basis.len();
    let xb = DMatrix::from_fn(k, k, |a, j| x[(basis[a], j)]);
    let yb = DVector::from_iterator(k, basis.iter().map(|&i| y[i]));
    let inv = xb
        .try_inverse()
        .ok_or_else(|| Error::Factorization("singular quantile-regression basis".into()))?;
    let beta = &inv * yb;
    Ok((beta, inv))
}

fn simplex_polish(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    tau: f64,
    mut basis: Vec<usize>,
    max_pivots: usize,
) -> Result<QrFit> {
    let (n, k) = x.shape();
    let yscale = y.amax().max(1.0);
    let mut in_basis = vec![false; n];
    for &i in &basis {
        in_basis[i] = true;
    }
    let mut pivots = 0;
    loop {
        let (beta, inv) = basis_solve(x, y, &basis)?;
        let r = y - x * &beta;
        let loss: f64 = r.iter().map(|ri| check_loss(*ri, tau)).sum();
        let zero_tol = 1e-12 * yscale;

        // steepest improving edge: release basis row j to the side s
        let mut best: Option<(f64, usize, f64, DVector<f64>)> = None;
        for j in 0..k {
            for s in [1.0, -1.0] {
                let d = inv.column(j) * -s;
                let a = x * &d;
                let mut slope = if s > 0.0 { tau } else { 1.0 - tau };
                for i in 0..n {
                    if in_basis[i] {
                        continue;
                    }
                    slope += if r[i] > zero_tol {
                        -tau * a[i]
                    } else if r[i] < -zero_tol {
                        (1.0 - tau) * a[i]
                    } else {
                        tau * (-a[i]).max(0.0) + (1.0 - tau) * a[i].max(0.0)
                    };
                }
                let norm = d.norm();
                let rate = slope / norm;
                if slope < -1e-12 * (1.0 + loss) && best.as_ref().is_none_or(|b| rate < b.0) {
                    best = Some((rate, j, slope, a));
                }
            }
        }
        let Some((_, j, mut slope, a)) = best else {
            return Ok(QrFit {
                beta: beta.iter().copied().collect(),
                loss,
                residuals: r.iter().copied().collect(),
                basis,
                pivots,
            });
        };
        if pivots >= max_pivots {
            return Err(Error::NonConvergence {
                iterations: pivots,
                loss,
            });
        }

        // exact line search: walk the breakpoints until the slope turns;
        // rows already at zero entered the starting slope one-sided
        let mut bps: Vec<(f64, usize)> = (0..n)
            .filter(|&i| !in_basis[i] && a[i] != 0.0 && r[i].abs() > zero_tol)
            .map(|i| (r[i] / a[i], i))
            .filter(|(t, _)| *t > 0.0)
            .collect();
        bps.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut entering = None;
        for (_, i) in bps {
            slope += a[i].abs();
            if slope >= 0.0 {
                entering = Some(i);
                break;
            }
        }
        let Some(i_in) = entering else {
            return Err(Error::NonConvergence {
                iterations: pivots,
                loss,
            });
        };
        in_basis[basis[j]] = false;
        in_basis[i_in] = true;
        basis[j] = i_in;
        pivots += 1;
    }
}

/// Quantile impact regression of `outcome` at `horizon` and level `tau`,
/// pooled with a single intercept.
///
/// Standard errors assume iid errors, with the sparsity estimated from
/// residual quantiles at the Hall-Sheather bandwidth. The prediction SE is
/// the root mean squared residual and R² is the pseudo-R²
/// `1 - loss / loss(intercept only)`.
pub fn qr_estimate(panel: &Panel, outcome: Outcome, horizon: usize, tau: f64) -> Result<CoefficientSet> {
    if horizon > MAX_HORIZON {
        return Err(Error::InvalidArgument(format!("horizon {horizon} above {MAX_HORIZON}")));
    }
    let d = panel.design(outcome, horizon)?;
    let (n, k0) = d.x.shape();
    let k = k0 + 1;
    if n < 2 * k {
        return Err(Error::InsufficientData(format!("{n} rows for {k} coefficients")));
    }
    let x = DMatrix::from_fn(n, k, |i, j| if j < k0 { d.x[(i, j)] } else { 1.0 });
    let mut terms = d.columns.clone();
    terms.push(Term::Constant);
    let names: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
    let fit = fit_matrix(&x, &d.y, tau, &QrOptions::default(), &names)?;

    let mut sorted_y = d.y.clone();
    sorted_y.sort_by(f64::total_cmp);
    let q = quantile_sorted(&sorted_y, tau);
    let loss0: f64 = d.y.iter().map(|v| check_loss(v - q, tau)).sum();

    let cov = sparsity_covariance(&x, &fit.residuals, tau)?;
    let mut estimates = BTreeMap::new();
    let mut ses = BTreeMap::new();
    for (j, t) in terms.iter().enumerate() {
        estimates.insert(*t, fit.beta[j]);
        ses.insert(*t, cov[(j, j)].max(0.0).sqrt());
    }
    let nf = n as f64;
    let set = CoefficientSet {
        model_kind: ModelKind::Qr,
        outcome,
        horizon,
        estimates,
        standard_errors: ses,
        prediction_se: (fit.residuals.iter().map(|r| r * r).sum::<f64>() / nf).sqrt(),
        tau: Some(tau),
        n_obs: Some(n),
        r_squared: Some(if loss0 > 0.0 { 1.0 - fit.loss / loss0 } else { 0.0 }),
        n_countries: Some(d.n_groups),
    };
    set.validate()?;
    Ok(set)
}

fn sparsity_covariance(x: &DMatrix<f64>, resid: &[f64], tau: f64) -> Result<DMatrix<f64>> {
    let n = resid.len() as f64;
    let std = Normal::standard();
    let z = std.inverse_cdf(0.975);
    let qt = std.inverse_cdf(tau);
    let dens = std.pdf(qt);
    let mut h = n.powf(-1.0 / 3.0) * z.powf(2.0 / 3.0) * (1.5 * dens * dens / (2.0 * qt * qt + 1.0)).powf(1.0 / 3.0);
    h = h.min(tau.min(1.0 - tau) * 0.999);
    let mut sorted = resid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sparsity = (quantile_sorted(&sorted, tau + h) - quantile_sorted(&sorted, tau - h)) / (2.0 * h);
    let xtx_inv = (x.transpose() * x)
        .try_inverse()
        .ok_or_else(|| Error::Factorization("singular cross-product matrix".into()))?;
    Ok(xtx_inv * (tau * (1.0 - tau) * sparsity * sparsity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ones(y: &[f64]) -> Vec<Vec<f64>> {
        y.iter().map(|_| vec![1.0]).collect()
    }

    /// Minimum loss over all solutions interpolating two rows.
    fn exhaustive(rows: &[Vec<f64>], y: &[f64], tau: f64) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                let det = rows[a][0] * rows[b][1] - rows[a][1] * rows[b][0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let b0 = (y[a] * rows[b][1] - rows[a][1] * y[b]) / det;
                let b1 = (rows[a][0] * y[b] - y[a] * rows[b][0]) / det;
                best = best.min(pinball_loss(rows, y, &[b0, b1], tau));
            }
        }
        best
    }

    #[test]
    fn intercept_only_median() {
        let y = [1.0, 2.0, 3.0];
        let f = quantile_fit(&ones(&y), &y, 0.5, &QrOptions::default()).unwrap();
        assert!((f.beta[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn flat_minimum_returns_a_minimizer() {
        let y = [1.0, 2.0, 3.0, 4.0];
        let f = quantile_fit(&ones(&y), &y, 0.5, &QrOptions::default()).unwrap();
        assert!((f.loss - 2.0).abs() < 1e-12, "{}", f.loss);
        assert!((2.0..=3.0).contains(&f.beta[0]));
    }

    #[test]
    fn rejects_collinear_design() {
        let rows = vec![vec![1.0, 2.0]; 5];
        assert!(matches!(
            quantile_fit(&rows, &[1.0, 2.0, 3.0, 4.0, 5.0], 0.5, &QrOptions::default()),
            Err(Error::RankDeficient { .. })
        ));
        assert!(quantile_fit(&ones(&[1.0]), &[1.0], 1.0, &QrOptions::default()).is_err());
    }

    #[test]
    fn iteration_cap_reports_loss() {
        let y: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64).collect();
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![1.0, i as f64]).collect();
        let opts = QrOptions {
            irls_iterations: 0,
            smoothing_levels: 0,
            max_pivots: 0,
        };
        match quantile_fit(&rows, &y, 0.9, &opts) {
            Err(Error::NonConvergence { loss, .. }) => assert!(loss.is_finite()),
            Ok(f) => assert_eq!(f.pivots, 0),
            Err(e) => panic!("{e}"),
        }
    }

    proptest! {
        #[test]
        fn matches_exhaustive_oracle(
            pts in prop::collection::vec((-5.0f64..5.0, -10.0f64..10.0), 3..=12),
            tau in prop::sample::select(vec![0.1, 0.25, 0.5, 0.75, 0.95]),
        ) {
            let rows: Vec<Vec<f64>> = pts.iter().map(|(x, _)| vec![1.0, *x]).collect();
            let y: Vec<f64> = pts.iter().map(|(_, y)| *y).collect();
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            prop_assume!(xs.iter().any(|x| (x - xs[0]).abs() > 1e-6));
            let f = quantile_fit(&rows, &y, tau, &QrOptions::default()).unwrap();
            let oracle = exhaustive(&rows, &y, tau);
            prop_assert!(f.loss <= oracle * (1.0 + 1e-6) + 1e-12, "{} vs {}", f.loss, oracle);
            // no coordinate nudge improves the loss
            for j in 0..2 {
                for s in [1e-6, -1e-6] {
                    let mut b = f.beta.clone();
                    b[j] += s;
                    prop_assert!(pinball_loss(&rows, &y, &b, tau) >= f.loss - 1e-12);
                }
            }
            let n = y.len() as f64;
            let below = f.residuals.iter().filter(|r| **r < -1e-9).count() as f64 / n;
            prop_assert!(below >= tau - 2.0 / n - 1e-12 && below <= tau + 2.0 / n + 1e-12);
        }
    }
}
