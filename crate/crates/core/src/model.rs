//! Debt accounting: the exact annual recursion, its additive driver
//! decomposition and the linearized diagnostic.
//!
//! All rates and ratios are fractions (0.03 is three percent). The
//! recursion for the debt-to-GDP ratio `d` is
//!
//! ```text
//! d_t = d_{t-1} + (i - (1+g)·pi)/((1+g)(1+pi))·d_{t-1}
//!               - g/((1+g)(1+pi))·d_{t-1} - pb + of
//! ```
//!
//! which is algebraically `d_{t-1}·(1+i)/((1+g)(1+pi)) - pb + of`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// One macro-fiscal variable of the assumptions table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Growth,
    Inflation,
    Interest,
    PrimaryBalance,
    OtherFlows,
}

impl Variable {
    pub const ALL: [Variable; 5] = [
        Variable::Growth,
        Variable::Inflation,
        Variable::Interest,
        Variable::PrimaryBalance,
        Variable::OtherFlows,
    ];

    /// Column name used in tabular files.
    pub fn column(self) -> &'static str {
        match self {
            Variable::Growth => "g",
            Variable::Inflation => "pi",
            Variable::Interest => "i",
            Variable::PrimaryBalance => "pb",
            Variable::OtherFlows => "of",
        }
    }
}

/// Rates for a single year.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rates {
    pub g: f64,
    pub pi: f64,
    pub i: f64,
    pub pb: f64,
    pub of: f64,
}

impl Rates {
    fn check_finite(&self) -> Result<()> {
        ensure_finite("g", self.g)?;
        ensure_finite("pi", self.pi)?;
        ensure_finite("i", self.i)?;
        ensure_finite("pb", self.pb)?;
        ensure_finite("of", self.of)
    }

    /// `(1+g)(1+pi)`, the nominal growth factor.
    pub fn nominal_factor(&self) -> f64 {
        (1.0 + self.g) * (1.0 + self.pi)
    }
}

/// Year-indexed baseline assumptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroAssumptions {
    years: Vec<i32>,
    g: Vec<f64>,
    pi: Vec<f64>,
    i: Vec<f64>,
    pb: Vec<f64>,
    of: Vec<f64>,
}

impl MacroAssumptions {
    pub fn new(years: Vec<i32>, g: Vec<f64>, pi: Vec<f64>, i: Vec<f64>, pb: Vec<f64>, of: Vec<f64>) -> Result<Self> {
        let a = MacroAssumptions {
            years,
            g,
            pi,
            i,
            pb,
            of,
        };
        a.validate()?;
        Ok(a)
    }

    /// Builds assumptions from per-year records.
    pub fn from_rates(first_year: i32, rates: &[Rates]) -> Result<Self> {
        let years = (0..rates.len()).map(|k| first_year + k as i32).collect();
        Self::new(
            years,
            rates.iter().map(|r| r.g).collect(),
            rates.iter().map(|r| r.pi).collect(),
            rates.iter().map(|r| r.i).collect(),
            rates.iter().map(|r| r.pb).collect(),
            rates.iter().map(|r| r.of).collect(),
        )
    }

    fn validate(&self) -> Result<()> {
        let n = self.years.len();
        if n == 0 {
            return Err(Error::InvalidSeries("assumptions cover no years".into()));
        }
        for v in Variable::ALL {
            if self.series(v).len() != n {
                return Err(Error::InvalidSeries(format!(
                    "series `{}` has {} entries, expected {n}",
                    v.column(),
                    self.series(v).len()
                )));
            }
        }
        for w in self.years.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(Error::InvalidSeries(format!(
                    "years not consecutive: {} followed by {}",
                    w[0], w[1]
                )));
            }
        }
        for k in 0..n {
            let r = self.rates(k);
            r.check_finite().map_err(|e| e.at_year(self.years[k]))?;
            let f = r.nominal_factor();
            if f <= 0.0 {
                return Err(Error::DegenerateEconomy { factor: f }.at_year(self.years[k]));
            }
        }
        Ok(())
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn first_year(&self) -> i32 {
        self.years[0]
    }

    pub fn last_year(&self) -> i32 {
        *self.years.last().expect("validated non-empty")
    }

    pub fn index_of(&self, year: i32) -> Option<usize> {
        let k = year.checked_sub(self.first_year())?;
        (k >= 0 && (k as usize) < self.len()).then_some(k as usize)
    }

    pub fn series(&self, v: Variable) -> &[f64] {
        match v {
            Variable::Growth => &self.g,
            Variable::Inflation => &self.pi,
            Variable::Interest => &self.i,
            Variable::PrimaryBalance => &self.pb,
            Variable::OtherFlows => &self.of,
        }
    }

    fn series_mut(&mut self, v: Variable) -> &mut Vec<f64> {
        match v {
            Variable::Growth => &mut self.g,
            Variable::Inflation => &mut self.pi,
            Variable::Interest => &mut self.i,
            Variable::PrimaryBalance => &mut self.pb,
            Variable::OtherFlows => &mut self.of,
        }
    }

    /// Rates of the year at position `k`.
    pub fn rates(&self, k: usize) -> Rates {
        Rates {
            g: self.g[k],
            pi: self.pi[k],
            i: self.i[k],
            pb: self.pb[k],
            of: self.of[k],
        }
    }

    /// Returns a copy with `deviations[k]` added to variable `v` in year
    /// `start_year + k`. Deviations past the last year are dropped.
    pub fn with_added(&self, v: Variable, start_year: i32, deviations: &[f64]) -> Result<Self> {
        let start = self.index_of(start_year).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "year {start_year} outside assumptions window {}-{}",
                self.first_year(),
                self.last_year()
            ))
        })?;
        let mut out = self.clone();
        let s = out.series_mut(v);
        for (slot, dev) in s[start..].iter_mut().zip(deviations) {
            *slot += dev;
        }
        out.validate()?;
        Ok(out)
    }

    /// Sub-window `[first, last]`, inclusive.
    pub fn window(&self, first: i32, last: i32) -> Result<Self> {
        let a = self.index_of(first).ok_or_else(|| Error::MissingYear {
            what: "assumptions".into(),
            year: first,
        })?;
        let b = self.index_of(last).ok_or_else(|| Error::MissingYear {
            what: "assumptions".into(),
            year: last,
        })?;
        if b < a {
            return Err(Error::InvalidArgument(format!("empty window {first}-{last}")));
        }
        let take = |s: &[f64]| s[a..=b].to_vec();
        Self::new(
            self.years[a..=b].to_vec(),
            take(&self.g),
            take(&self.pi),
            take(&self.i),
            take(&self.pb),
            take(&self.of),
        )
    }

    /// Extends the table to `last_year` by repeating the final year.
    pub fn extend_flat(&self, last_year: i32) -> Self {
        let mut out = self.clone();
        let tail = self.rates(self.len() - 1);
        let mut y = self.last_year();
        while y < last_year {
            y += 1;
            out.years.push(y);
            out.g.push(tail.g);
            out.pi.push(tail.pi);
            out.i.push(tail.i);
            out.pb.push(tail.pb);
            out.of.push(tail.of);
        }
        out
    }
}

/// Projected or observed debt ratio per year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebtPath {
    pub years: Vec<i32>,
    pub d: Vec<f64>,
    /// Set when a projection crossed below zero.
    pub negative_warning: bool,
}

impl DebtPath {
    /// Observed debt series; negative values are rejected.
    pub fn observed(years: Vec<i32>, d: Vec<f64>) -> Result<Self> {
        if years.len() != d.len() {
            return Err(Error::InvalidSeries("debt series length mismatch".into()));
        }
        for (y, v) in years.iter().zip(&d) {
            ensure_finite("d", *v).map_err(|e| e.at_year(*y))?;
            if *v < 0.0 {
                return Err(Error::InvalidSeries(format!("negative debt ratio {v} in {y}")));
            }
        }
        Ok(DebtPath {
            years,
            d,
            negative_warning: false,
        })
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        self.years.iter().position(|y| *y == year).map(|k| self.d[k])
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Path with `(year, d0)` prepended.
    pub fn anchored(&self, year: i32, d0: f64) -> DebtPath {
        let mut years = vec![year];
        years.extend_from_slice(&self.years);
        let mut d = vec![d0];
        d.extend_from_slice(&self.d);
        DebtPath {
            years,
            d,
            negative_warning: self.negative_warning,
        }
    }

    /// First year whose ratio is below `threshold` while the previous year
    /// was at or above it.
    pub fn crossing_below(&self, threshold: f64) -> Option<i32> {
        self.d
            .windows(2)
            .position(|w| w[0] >= threshold && w[1] < threshold)
            .map(|k| self.years[k + 1])
    }
}

/// Per-year additive contributions to the change in the debt ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub year: i32,
    pub interest: f64,
    pub inflation: f64,
    pub growth: f64,
    pub primary_balance: f64,
    pub other_flows: f64,
    pub delta_d: f64,
}

impl Contribution {
    pub fn sum(&self) -> f64 {
        self.interest + self.inflation + self.growth + self.primary_balance + self.other_flows
    }

    /// Sum of absolute contributions; the scale for additivity checks.
    pub fn magnitude(&self) -> f64 {
        self.interest.abs()
            + self.inflation.abs()
            + self.growth.abs()
            + self.primary_balance.abs()
            + self.other_flows.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub records: Vec<Contribution>,
}

fn check_step(d_prev: f64, r: &Rates) -> Result<f64> {
    ensure_finite("d_prev", d_prev)?;
    r.check_finite()?;
    let f = r.nominal_factor();
    if f <= 0.0 {
        return Err(Error::DegenerateEconomy { factor: f });
    }
    Ok(f)
}

/// Splits one year's change into its drivers. The `g·pi` cross term sits
/// in the inflation contribution through its `pi·(1+g)` numerator.
pub fn contributions(d_prev: f64, r: &Rates) -> Result<Contribution> {
    let f = check_step(d_prev, r)?;
    let interest = r.i / f * d_prev;
    let inflation = -(r.pi * (1.0 + r.g)) / f * d_prev;
    let growth = -r.g / f * d_prev;
    Ok(Contribution {
        year: 0,
        interest,
        inflation,
        growth,
        primary_balance: -r.pb,
        other_flows: r.of,
        delta_d: (interest + inflation + growth) - r.pb + r.of,
    })
}

/// One step of the debt recursion.
pub fn debt_step(d_prev: f64, r: &Rates) -> Result<f64> {
    let f = check_step(d_prev, r)?;
    let rate_term = (r.i - (1.0 + r.g) * r.pi) / f * d_prev;
    let growth_term = r.g / f * d_prev;
    Ok(d_prev + rate_term - growth_term - r.pb + r.of)
}

/// Folds [`debt_step`] over the assumptions, starting from `d0` in the year
/// before the first assumptions year.
pub fn project_path(d0: f64, assumptions: &MacroAssumptions) -> Result<DebtPath> {
    ensure_finite("d0", d0)?;
    if d0 < 0.0 {
        return Err(Error::InvalidArgument(format!("initial debt ratio {d0} is negative")));
    }
    let mut d = Vec::with_capacity(assumptions.len());
    let mut prev = d0;
    let mut negative = false;
    for (k, year) in assumptions.years().iter().enumerate() {
        prev = debt_step(prev, &assumptions.rates(k)).map_err(|e| e.at_year(*year))?;
        negative |= prev < 0.0;
        d.push(prev);
    }
    Ok(DebtPath {
        years: assumptions.years().to_vec(),
        d,
        negative_warning: negative,
    })
}

/// Driver decomposition of the projected path.
pub fn decompose(d0: f64, assumptions: &MacroAssumptions) -> Result<Decomposition> {
    let path = project_path(d0, assumptions)?;
    let mut prev = d0;
    let mut records = Vec::with_capacity(path.len());
    for (k, year) in assumptions.years().iter().enumerate() {
        let mut c = contributions(prev, &assumptions.rates(k)).map_err(|e| e.at_year(*year))?;
        c.year = *year;
        c.delta_d = path.d[k] - prev;
        prev = path.d[k];
        records.push(c);
    }
    Ok(Decomposition { records })
}

/// `i - pi - g`, the debt stock amplification term.
pub fn amplification(i: f64, pi: f64, g: f64) -> f64 {
    i - pi - g
}

/// Linearized change `(i - pi - g)·d_prev - pb + of`. Diagnostic only;
/// projections always use the exact recursion.
pub fn approx_step(d_prev: f64, r: &Rates) -> Result<f64> {
    ensure_finite("d_prev", d_prev)?;
    r.check_finite()?;
    Ok(amplification(r.i, r.pi, r.g) * d_prev - r.pb + r.of)
}

/// Amplification term per year.
pub fn amplification_path(assumptions: &MacroAssumptions) -> Vec<(i32, f64)> {
    (0..assumptions.len())
        .map(|k| {
            let r = assumptions.rates(k);
            (assumptions.years()[k], amplification(r.i, r.pi, r.g))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rates(g: f64, pi: f64, i: f64, pb: f64, of: f64) -> Rates {
        Rates { g, pi, i, pb, of }
    }

    fn closed_form(d_prev: f64, r: &Rates) -> f64 {
        d_prev * (1.0 + r.i) / ((1.0 + r.g) * (1.0 + r.pi)) - r.pb + r.of
    }

    #[test]
    fn zero_rates_leave_debt_unchanged() {
        assert_eq!(debt_step(1.0, &Rates::default()).unwrap(), 1.0);
    }

    #[test]
    fn neutral_interest_leaves_only_primary_and_flows() {
        let d = debt_step(0.70, &rates(0.02, 0.02, 0.0404, 0.01, 0.0)).unwrap();
        assert!((d - 0.69).abs() < 1e-15, "{d}");
    }

    #[test]
    fn step_matches_exact_rational_oracle() {
        // 18643/32375, evaluated in exact rational arithmetic
        let d = debt_step(0.58, &rates(0.03, 0.036, 0.03, -0.011, 0.005)).unwrap();
        assert!((d - 18643.0 / 32375.0).abs() < 1e-15, "{d}");
        assert!((d - 0.5758).abs() < 5e-5);
    }

    #[test]
    fn rejects_degenerate_and_non_finite() {
        assert!(matches!(
            debt_step(0.5, &rates(-1.0, 0.0, 0.0, 0.0, 0.0)),
            Err(Error::DegenerateEconomy { .. })
        ));
        assert!(matches!(
            debt_step(f64::NAN, &Rates::default()),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            debt_step(0.5, &rates(0.0, f64::INFINITY, 0.0, 0.0, 0.0)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn zero_series_keep_debt_constant() {
        let a = MacroAssumptions::from_rates(2025, &[Rates::default(); 5]).unwrap();
        let p = project_path(0.5, &a).unwrap();
        assert_eq!(p.years, vec![2025, 2026, 2027, 2028, 2029]);
        assert!(p.d.iter().all(|d| *d == 0.5));
    }

    #[test]
    fn projection_error_names_year() {
        let mut r = [Rates::default(); 3];
        r[2].g = 0.01;
        let a = MacroAssumptions::from_rates(2030, &r).unwrap();
        // valid table; now corrupt the starting ratio instead
        assert!(project_path(-0.1, &a).is_err());
        let err = MacroAssumptions::new(
            vec![2030, 2031],
            vec![0.0, -1.2],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap_err();
        assert!(err.to_string().contains("2031"), "{err}");
    }

    #[test]
    fn assumptions_reject_gaps_and_ragged_series() {
        assert!(MacroAssumptions::new(
            vec![2020, 2022],
            vec![0.0; 2],
            vec![0.0; 2],
            vec![0.0; 2],
            vec![0.0; 2],
            vec![0.0; 2]
        )
        .is_err());
        assert!(MacroAssumptions::new(
            vec![2020, 2021],
            vec![0.0; 2],
            vec![0.0; 1],
            vec![0.0; 2],
            vec![0.0; 2],
            vec![0.0; 2]
        )
        .is_err());
    }

    #[test]
    fn negative_projection_sets_warning() {
        let a = MacroAssumptions::from_rates(2025, &[rates(0.0, 0.0, 0.0, 0.3, 0.0), rates(0.0, 0.0, 0.0, 0.3, 0.0)])
            .unwrap();
        let p = project_path(0.4, &a).unwrap();
        assert!(p.negative_warning);
        assert!(p.d[1] < 0.0);
    }

    #[test]
    fn zero_rate_year_has_zero_contributions() {
        let c = contributions(0.8, &Rates::default()).unwrap();
        assert_eq!(c.sum(), 0.0);
        assert_eq!(c.magnitude(), 0.0);
    }

    #[test]
    fn decomposition_adds_up_to_step() {
        let r = rates(0.03, 0.036, 0.03, -0.011, 0.005);
        let c = contributions(0.58, &r).unwrap();
        let oracle = debt_step(0.58, &r).unwrap() - 0.58;
        assert!((c.sum() - oracle).abs() <= 1e-12 * c.magnitude());
    }

    #[test]
    fn other_flows_carry_stock_flow_residual() {
        // 2020-style year: deficit-driven rise with a 2.6 pp residual
        let r = rates(-0.083, 0.004, 0.026, -0.072, 0.026);
        let c = contributions(0.716, &r).unwrap();
        assert_eq!(c.other_flows, 0.026);
        assert_eq!(c.primary_balance, 0.072);
    }

    #[test]
    fn amplification_examples() {
        assert!((amplification(0.03, 0.036, 0.03) + 0.036).abs() < 1e-15);
        let d = approx_step(0.9, &rates(0.01, 0.02, 0.03, 0.004, 0.001)).unwrap();
        assert!((d - (-0.004 + 0.001)).abs() < 1e-15);
        // exact minus approximate at g = pi = 0.02, i = 0.04, d = 1
        let r = rates(0.02, 0.02, 0.04, 0.0, 0.0);
        let gap = (debt_step(1.0, &r).unwrap() - 1.0) - approx_step(1.0, &r).unwrap();
        assert!((gap + 3.844675124951942e-4).abs() < 1e-15, "{gap}");
    }

    #[test]
    fn window_and_extension() {
        let a = MacroAssumptions::from_rates(2020, &[rates(0.01, 0.02, 0.03, 0.0, 0.0); 4]).unwrap();
        let w = a.window(2021, 2022).unwrap();
        assert_eq!(w.years(), &[2021, 2022]);
        let e = a.extend_flat(2026);
        assert_eq!(e.last_year(), 2026);
        assert_eq!(e.rates(6), a.rates(3));
        assert!(a.window(2019, 2021).is_err());
    }

    #[test]
    fn crossing_year() {
        let p = DebtPath::observed(vec![2022, 2023, 2024, 2025], vec![0.69, 0.625, 0.58, 0.57]).unwrap();
        assert_eq!(p.crossing_below(0.60), Some(2024));
        assert_eq!(p.crossing_below(0.50), None);
        assert!(DebtPath::observed(vec![2020], vec![-0.1]).is_err());
    }

    fn rate() -> impl Strategy<Value = f64> {
        -0.5f64..0.5
    }

    fn realistic() -> impl Strategy<Value = f64> {
        -0.2f64..0.2
    }

    proptest! {
        #[test]
        fn additivity(d in 0.0f64..3.0, g in rate(), pi in rate(), i in rate(),
                      pb in -0.2f64..0.2, of in -0.2f64..0.2) {
            let r = rates(g, pi, i, pb, of);
            let c = contributions(d, &r).unwrap();
            let delta = debt_step(d, &r).unwrap() - d;
            prop_assert!((c.sum() - delta).abs() <= 1e-12 * c.magnitude().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn algebraic_forms_agree(d in 0.0f64..3.0, g in rate(), pi in rate(), i in rate(),
                                 pb in -0.2f64..0.2, of in -0.2f64..0.2) {
            let r = rates(g, pi, i, pb, of);
            let a = debt_step(d, &r).unwrap();
            let b = closed_form(d, &r);
            let scale = (d * (1.0 + i) / r.nominal_factor()).abs() + pb.abs() + of.abs();
            prop_assert!((a - b).abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE), "{a} vs {b}");
        }

        #[test]
        fn monotone_in_primary_balance_and_interest(d in 0.01f64..3.0, g in rate(), pi in rate(),
                                                   i in rate(), pb in -0.2f64..0.2, bump in 0.0f64..0.1) {
            let base = debt_step(d, &rates(g, pi, i, pb, 0.0)).unwrap();
            let more_pb = debt_step(d, &rates(g, pi, i, pb + bump, 0.0)).unwrap();
            let more_i = debt_step(d, &rates(g, pi, i + bump, pb, 0.0)).unwrap();
            prop_assert!(more_pb <= base);
            prop_assert!(more_i >= base);
        }

        #[test]
        fn neutrality(d in 0.0f64..3.0, g in realistic(), pi in realistic(),
                      pb in -0.2f64..0.2, of in -0.2f64..0.2) {
            let i = (1.0 + g) * (1.0 + pi) - 1.0;
            prop_assume!(1.0 + i == (1.0 + g) * (1.0 + pi));
            let delta = debt_step(d, &rates(g, pi, i, pb, of)).unwrap() - d;
            prop_assert!((delta - (of - pb)).abs() <= 1e-15 * (1.0 + d));
        }

        // |exact - approx| is bounded by C·(g² + pi² + |g·pi| + |i·g| + |i·pi|)·d;
        // the gap carries squared terms, so a bound on cross terms alone is false.
        #[test]
        fn linearization_error_bound(d in 0.0f64..3.0, g in rate(), pi in rate(), i in rate()) {
            let r = rates(g, pi, i, 0.0, 0.0);
            let gap = ((debt_step(d, &r).unwrap() - d) - approx_step(d, &r).unwrap()).abs();
            let scale = g * g + pi * pi + (g * pi).abs() + (i * g).abs() + (i * pi).abs();
            prop_assert!(gap <= LINEARIZATION_BOUND * scale * d + 1e-15);
        }
    }

    /// Bound constant: the gap equals d·[g² + pi² + g·pi − i·g − i·pi + g·pi·(g+pi−i)]
    /// divided by (1+g)(1+pi) ≥ 0.25 for rates in [−0.5, 0.5]; the cubic term is
    /// at most 1.5·|g·pi|, giving 2.5 / 0.25.
    const LINEARIZATION_BOUND: f64 = 10.0;

    #[test]
    fn linearization_bound_is_tight_enough() {
        // brute-force grid: the worst observed ratio stays under the bound
        let mut worst: f64 = 0.0;
        let grid: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.05).collect();
        for &g in &grid {
            for &pi in &grid {
                for &i in &grid {
                    let r = rates(g, pi, i, 0.0, 0.0);
                    let gap = ((debt_step(1.0, &r).unwrap() - 1.0) - approx_step(1.0, &r).unwrap()).abs();
                    let scale = g * g + pi * pi + (g * pi).abs() + (i * g).abs() + (i * pi).abs();
                    if scale > 0.0 {
                        worst = worst.max(gap / scale);
                    }
                }
            }
        }
        assert!(worst <= LINEARIZATION_BOUND, "{worst}");
        assert!(worst > 1.0);
    }
}
