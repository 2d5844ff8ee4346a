//! Writes the demonstration impact panel shipped under `data/`.
//!
//! Usage: cargo run -p debtsim-core --example synthetic_panel -- data/panel.csv

use std::collections::BTreeMap;
use std::path::PathBuf;

use debtsim::econometrics::{Outcome, SyntheticPanel, Term};
use debtsim::ingest::write_panel;

fn coefs(pairs: &[(Term, f64)]) -> BTreeMap<Term, f64> {
    pairs.iter().copied().collect()
}

fn main() -> debtsim::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data/panel.csv".into())
        .into();
    let growth = coefs(&[
        (Term::Shock, 1.5),
        (Term::Onset, -0.8),
        (Term::OnsetDamage, -0.05),
        (Term::OnsetAe, 0.4),
        (Term::LaggedOutcome, -0.7),
        (Term::OnsetFb, 0.1),
        (Term::LaggedFb, 0.03),
        (Term::OnsetNdCapacity, 0.6),
        (Term::LaggedExtraNd, 0.5),
        (Term::Constant, 1.0),
    ]);
    let balance = coefs(&[
        (Term::Shock, 0.8),
        (Term::Onset, -0.6),
        (Term::OnsetDamage, -0.08),
        (Term::OnsetAe, 0.2),
        (Term::LaggedOutcome, -0.4),
        (Term::OnsetFb, 0.15),
        (Term::LaggedFb, -0.2),
        (Term::OnsetNdCapacity, 0.5),
        (Term::LaggedExtraNd, 0.3),
        (Term::Constant, -0.5),
    ]);
    let mut spec = SyntheticPanel::new(40, 25, 1995)
        .with_outcome(Outcome::GdpGrowth, growth)
        .with_outcome(Outcome::PrimaryBalance, balance);
    spec.noise_sd = 0.5;
    let panel = spec.generate()?;
    write_panel(&out, &panel)?;
    eprintln!("wrote {} rows to {}", panel.len(), out.display());
    Ok(())
}
