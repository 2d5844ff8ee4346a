use std::collections::BTreeMap;

use debtsim::econometrics::{
    lp_estimate, lp_fit, pinball_loss, quantile_fit, ModelKind, Outcome, QrOptions, SyntheticPanel, Term,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

fn lp_truth() -> BTreeMap<Term, f64> {
    [
        (Term::Shock, 1.5),
        (Term::Onset, -0.8),
        (Term::OnsetDamage, -0.05),
        (Term::OnsetAe, 0.4),
        (Term::LaggedOutcome, -0.7),
        (Term::OnsetFb, 0.1),
        (Term::LaggedFb, 0.03),
        (Term::OnsetNdCapacity, 0.6),
        (Term::LaggedExtraNd, 0.5),
        (Term::Constant, 0.2),
    ]
    .into_iter()
    .collect()
}

fn lp_panel(seed: u64) -> debtsim::econometrics::Panel {
    SyntheticPanel::new(150, 30, seed)
        .with_outcome(Outcome::GdpGrowth, lp_truth())
        .generate()
        .unwrap()
}

#[test]
fn lp_recovers_known_coefficients_within_two_se() {
    let set = lp_estimate(&lp_panel(1), Outcome::GdpGrowth, 0).unwrap();
    assert_eq!(set.model_kind, ModelKind::Lp);
    assert_eq!(set.n_countries, Some(150));
    for (term, truth) in lp_truth() {
        let (b, se) = (set.coef(term), set.standard_errors[&term]);
        assert!(se > 0.0, "{term}: se {se}");
        assert!((b - truth).abs() <= 2.0 * se, "{term}: {b} vs {truth} (se {se})");
    }
}

// Across independent panels the standardized errors should look standard
// normal: roughly 95% inside two SEs and no drift in either direction.
#[test]
fn lp_standardized_errors_are_calibrated() {
    let truth = lp_truth();
    let mut z = Vec::new();
    for seed in 100..112 {
        let set = lp_estimate(&lp_panel(seed), Outcome::GdpGrowth, 0).unwrap();
        z.extend(truth.iter().map(|(t, v)| (set.coef(*t) - v) / set.standard_errors[t]));
    }
    let n = z.len() as f64;
    let inside = z.iter().filter(|v| v.abs() <= 2.0).count() as f64 / n;
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(inside >= 0.9, "share inside 2 SE: {inside}");
    assert!(mean.abs() < 0.3, "mean z {mean}");
    assert!((0.6..1.5).contains(&var), "var z {var}");
}

#[test]
fn lp_residuals_are_orthogonal_to_demeaned_regressors() {
    let fit = lp_fit(&lp_panel(11), Outcome::GdpGrowth, 0).unwrap();
    let scale = fit.residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
    for j in 0..fit.within_x.ncols() {
        let col = fit.within_x.column(j);
        let dot: f64 = col.iter().zip(&fit.residuals).map(|(x, e)| x * e).sum();
        assert!(dot.abs() <= 1e-8 * scale * col.norm().max(1.0), "column {j}: {dot}");
    }
}

#[test]
fn lp_prediction_se_tracks_noise() {
    let mut s = SyntheticPanel::new(60, 25, 3).with_outcome(Outcome::GdpGrowth, lp_truth());
    s.noise_sd = 0.5;
    let set = lp_estimate(&s.generate().unwrap(), Outcome::GdpGrowth, 0).unwrap();
    assert!((set.prediction_se - 0.5).abs() < 0.05, "{}", set.prediction_se);
}

#[test]
fn lp_rejects_horizons_beyond_estimation_range() {
    assert!(lp_estimate(&lp_panel(1), Outcome::GdpGrowth, 3).is_err());
}

fn hetero_sample(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let std = Normal::new(0.0, 1.0).unwrap();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.random_range(0.0..4.0);
        rows.push(vec![1.0, x]);
        y.push(1.0 + 2.0 * x + (0.5 + 0.5 * x) * std.sample(&mut rng));
    }
    (rows, y)
}

#[test]
fn qr_slope_under_heteroskedasticity() {
    // y = 1 + 2x + (0.5 + 0.5x)e, so the tau-quantile line is
    // (1 + 0.5 q) + (2 + 0.5 q) x with q the normal quantile.
    let (rows, y) = hetero_sample(10_000, 5);
    for (tau, q) in [(0.5, 0.0), (0.95, 1.644_853_626_951_472_2)] {
        let fit = quantile_fit(&rows, &y, tau, &QrOptions::default()).unwrap();
        let slope = 2.0 + 0.5 * q;
        assert!(
            (fit.beta[1] - slope).abs() <= 0.05 * slope,
            "tau {tau}: slope {}",
            fit.beta[1]
        );
        let below = fit.residuals.iter().filter(|r| **r < 0.0).count() as f64 / y.len() as f64;
        assert!((below - tau).abs() < 0.01, "tau {tau}: share below {below}");
    }
}

#[test]
fn qr_solution_is_a_local_minimum() {
    let (rows, y) = hetero_sample(400, 9);
    let fit = quantile_fit(&rows, &y, 0.95, &QrOptions::default()).unwrap();
    let best = pinball_loss(&rows, &y, &fit.beta, 0.95);
    assert!((best - fit.loss).abs() <= 1e-9 * best.max(1.0));
    for j in 0..2 {
        for step in [1e-3, -1e-3] {
            let mut b = fit.beta.clone();
            b[j] += step;
            assert!(pinball_loss(&rows, &y, &b, 0.95) >= best - 1e-9);
        }
    }
}
