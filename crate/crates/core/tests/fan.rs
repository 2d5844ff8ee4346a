use std::path::Path;
use std::time::Instant;

use debtsim::ingest::{load_projections, Manifest};
use debtsim::model::{project_path, MacroAssumptions};
use debtsim::stochastic::{band_summary, simulate_fan, FanOptions, ShockDistribution};
use proptest::prelude::*;

fn baseline() -> MacroAssumptions {
    let m = Manifest::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/manifest.toml")).unwrap();
    load_projections(&m).unwrap().assumptions.extend_flat(2031)
}

fn diag(sd: [f64; 4]) -> ShockDistribution {
    let mut s = [[0.0; 4]; 4];
    for k in 0..4 {
        s[k][k] = sd[k] * sd[k];
    }
    ShockDistribution::from_covariance(s).unwrap()
}

fn opts(iterations: usize, seed: u64) -> FanOptions {
    FanOptions {
        iterations,
        seed,
        ..FanOptions::default()
    }
}

const D0: f64 = 0.58;

#[test]
fn zero_covariance_is_the_deterministic_path() {
    let b = baseline();
    let fan = simulate_fan(D0, &b, &diag([0.0; 4]), &opts(500, 3)).unwrap();
    let det = project_path(D0, &b).unwrap();
    assert_eq!(fan.baseline, det.d);
    for band in &fan.bands {
        assert_eq!(band, &det.d);
    }
}

#[test]
fn same_seed_serializes_identically() {
    let b = baseline();
    let dist = diag([0.02, 0.005, 0.01, 0.01]);
    let a = serde_json::to_string(&simulate_fan(D0, &b, &dist, &opts(2_000, 42)).unwrap()).unwrap();
    let c = serde_json::to_string(&simulate_fan(D0, &b, &dist, &opts(2_000, 42)).unwrap()).unwrap();
    let other = serde_json::to_string(&simulate_fan(D0, &b, &dist, &opts(2_000, 43)).unwrap()).unwrap();
    assert_eq!(a, c);
    assert_ne!(a, other);
}

#[test]
fn median_tracks_baseline_for_small_shocks() {
    let b = baseline();
    let fan = simulate_fan(D0, &b, &diag([0.002, 0.0005, 0.001, 0.001]), &opts(10_000, 1)).unwrap();
    let med = fan.band(0.5).unwrap();
    for (m, d) in med.iter().zip(&fan.baseline) {
        assert!((m - d).abs() < 5e-4, "{m} vs {d}");
    }
}

#[test]
fn bands_converge_with_iterations() {
    let b = baseline();
    let dist = diag([0.02, 0.005, 0.01, 0.01]);
    let small = simulate_fan(D0, &b, &dist, &opts(10_000, 8)).unwrap();
    let large = simulate_fan(D0, &b, &dist, &opts(100_000, 9)).unwrap();
    for (s, l) in small.bands.iter().zip(&large.bands) {
        for (x, y) in s.iter().zip(l) {
            assert!((x - y).abs() < 0.003, "{x} vs {y}");
        }
    }
}

#[test]
fn exceedance_is_monotone_in_threshold() {
    let b = baseline();
    let fan = simulate_fan(D0, &b, &diag([0.02, 0.005, 0.01, 0.01]), &opts(5_000, 2)).unwrap();
    let ex = band_summary(&fan, &[0.5, 0.6, 0.7]).unwrap();
    for t in 0..fan.years.len() {
        assert!(ex[0].probability[t] >= ex[1].probability[t]);
        assert!(ex[1].probability[t] >= ex[2].probability[t]);
    }
}

#[test]
fn ten_thousand_paths_are_fast() {
    let b = baseline();
    let dist = diag([0.02, 0.005, 0.01, 0.01]);
    let t = Instant::now();
    simulate_fan(D0, &b, &dist, &opts(10_000, 5)).unwrap();
    let secs = t.elapsed().as_secs_f64();
    assert!(secs < 1.0, "{secs} s");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bands_are_ordered_every_year(
        seed in any::<u64>(),
        sd in prop::array::uniform4(0.0f64..0.04),
        ar1 in 0.0f64..0.9,
    ) {
        let fan = simulate_fan(D0, &baseline(), &diag(sd), &FanOptions { ar1, ..opts(400, seed) }).unwrap();
        for w in fan.bands.windows(2) {
            for (lo, hi) in w[0].iter().zip(&w[1]) {
                prop_assert!(lo <= hi);
            }
        }
    }
}
