//! Report assembly and plain-text rendering.
//!
//! Reports are plain data: the CLI serializes them as JSON or renders them
//! as tables. Every report carries the manifest digest, the settings that
//! produced it and the seed, if any.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::disaster::{Channel, ScenarioMode, ScenarioOutcome};
use crate::error::Result;
use crate::ingest::{BacktestRow, PlotPoint, Provenance, Table, Unit};
use crate::model::{decompose, DebtPath, Decomposition, MacroAssumptions};
use crate::stochastic::{Exceedance, FanChart};

/// Reference debt ceiling of the EU fiscal rules.
pub const MAASTRICHT_THRESHOLD: f64 = 0.60;

/// Note attached to reports that include the inflation and interest-rate
/// channels.
pub const FOUR_CHANNEL_CAUTION: &str = "Caution: the inflation and interest-rate responses come from \
cross-country estimates whose signs and fit are weak for a single euro-area economy. Treat the \
four-channel results as indicative and cross-check them with national estimates or simple \
sensitivity runs.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool_version: String,
    pub manifest_digest: String,
    pub seed: Option<u64>,
    /// Effective settings, including the text of any config file.
    pub settings: BTreeMap<String, String>,
}

impl ReportMeta {
    pub fn new(manifest_digest: String, seed: Option<u64>, settings: BTreeMap<String, String>) -> Self {
        ReportMeta {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            manifest_digest,
            seed,
            settings,
        }
    }
}

/// Highest ratio from `from_year` on; ties resolve to the earliest year.
pub fn peak_after(path: &DebtPath, from_year: i32) -> Option<(i32, f64)> {
    path.years
        .iter()
        .zip(&path.d)
        .filter(|(y, _)| **y >= from_year)
        .map(|(y, d)| (*y, *d))
        .reduce(|best, cur| if cur.1 > best.1 { cur } else { best })
}

/// First year from `from_year` on in which debt does not increase, counted
/// once the path has risen at least once; a path that never rises is
/// stable from the start.
pub fn stabilization_year(path: &DebtPath, from_year: i32) -> Option<i32> {
    let mut risen = false;
    for k in 1..path.years.len() {
        let y = path.years[k];
        if y < from_year {
            continue;
        }
        if path.d[k] > path.d[k - 1] {
            risen = true;
        } else if risen {
            return Some(y);
        }
    }
    (!risen).then_some(from_year)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub meta: ReportMeta,
    /// Anchor year and observed ratio the projection starts from.
    pub anchor: (i32, f64),
    pub path: DebtPath,
    pub decomposition: Decomposition,
    /// `i - pi - g` per projection year.
    pub amplification: Vec<(i32, f64)>,
    pub threshold: f64,
    /// First year below the threshold, over history and projection.
    pub crossing_year: Option<i32>,
    pub provenance: Provenance,
}

/// Baseline report from the observed history and the projection.
pub fn baseline_report(
    meta: ReportMeta,
    observed: &DebtPath,
    projection: &MacroAssumptions,
    provenance: Provenance,
) -> Result<BaselineReport> {
    let anchor_year = projection.first_year() - 1;
    let d0 = observed.get(anchor_year).ok_or_else(|| crate::Error::MissingYear {
        what: "observed debt".into(),
        year: anchor_year,
    })?;
    let path = crate::model::project_path(d0, projection)?;
    let mut joined = DebtPath {
        years: observed
            .years
            .iter()
            .copied()
            .filter(|y| *y < projection.first_year())
            .collect(),
        d: Vec::new(),
        negative_warning: false,
    };
    joined.d = joined.years.iter().filter_map(|y| observed.get(*y)).collect();
    joined.years.extend(&path.years);
    joined.d.extend(&path.d);
    Ok(BaselineReport {
        meta,
        anchor: (anchor_year, d0),
        decomposition: decompose(d0, projection)?,
        amplification: crate::model::amplification_path(projection),
        threshold: MAASTRICHT_THRESHOLD,
        crossing_year: joined.crossing_below(MAASTRICHT_THRESHOLD),
        path,
        provenance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub meta: ReportMeta,
    pub mode: ScenarioMode,
    pub baseline: DebtPath,
    pub shocked: DebtPath,
    /// Shocked minus baseline, per year.
    pub delta: Vec<(i32, f64)>,
    /// Yearly change of the shocked path minus that of the baseline.
    pub annual_increase: Vec<(i32, f64)>,
    pub decomposition: Decomposition,
    pub deviations: BTreeMap<Channel, Vec<f64>>,
    pub warnings: Vec<String>,
    pub caution: Option<String>,
}

pub fn scenario_report(
    meta: ReportMeta,
    mode: ScenarioMode,
    d0: f64,
    baseline: &DebtPath,
    outcome: &ScenarioOutcome,
    warnings: Vec<String>,
    four_channel: bool,
) -> Result<ScenarioReport> {
    let delta: Vec<(i32, f64)> = baseline
        .years
        .iter()
        .zip(baseline.d.iter().zip(&outcome.path.d))
        .map(|(y, (b, s))| (*y, s - b))
        .collect();
    let annual_increase = (0..delta.len())
        .map(|k| (delta[k].0, delta[k].1 - if k == 0 { 0.0 } else { delta[k - 1].1 }))
        .collect();
    Ok(ScenarioReport {
        meta,
        mode,
        baseline: baseline.clone(),
        shocked: outcome.path.clone(),
        delta,
        annual_increase,
        decomposition: decompose(d0, &outcome.shocked)?,
        deviations: outcome.deviations.clone(),
        warnings,
        caution: four_channel.then(|| FOUR_CHANNEL_CAUTION.to_string()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualReport {
    pub meta: ReportMeta,
    pub start_year: i32,
    pub path_a: DebtPath,
    pub path_b: DebtPath,
    pub peak_a: Option<(i32, f64)>,
    pub peak_b: Option<(i32, f64)>,
    /// Peak of `a` minus peak of `b`.
    pub peak_reduction: Option<f64>,
    pub stabilization_a: Option<i32>,
    pub stabilization_b: Option<i32>,
    /// Years by which `b` stabilizes earlier than `a`.
    pub stabilization_gain: Option<i32>,
    pub deviation_difference: BTreeMap<Channel, Vec<f64>>,
    pub caution: Option<String>,
}

pub fn counterfactual_report(
    meta: ReportMeta,
    start_year: i32,
    path_a: DebtPath,
    path_b: DebtPath,
    deviation_difference: BTreeMap<Channel, Vec<f64>>,
    four_channel: bool,
) -> CounterfactualReport {
    let peak_a = peak_after(&path_a, start_year);
    let peak_b = peak_after(&path_b, start_year);
    let stabilization_a = stabilization_year(&path_a, start_year);
    let stabilization_b = stabilization_year(&path_b, start_year);
    CounterfactualReport {
        meta,
        start_year,
        peak_reduction: peak_a.zip(peak_b).map(|(a, b)| a.1 - b.1),
        stabilization_gain: stabilization_a.zip(stabilization_b).map(|(a, b)| a - b),
        path_a,
        path_b,
        peak_a,
        peak_b,
        stabilization_a,
        stabilization_b,
        deviation_difference,
        caution: four_channel.then(|| FOUR_CHANNEL_CAUTION.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanReport {
    pub meta: ReportMeta,
    pub anchor: (i32, f64),
    pub chart: FanChart,
    pub exceedance: Vec<Exceedance>,
}

impl FanReport {
    /// Plot triples, one per (year, level), plus the anchor at every level.
    pub fn plot_points(&self) -> Vec<PlotPoint> {
        let mut out = Vec::new();
        for level in &self.chart.levels {
            out.push(PlotPoint {
                year: self.anchor.0,
                level: *level,
                value: self.anchor.1,
            });
        }
        for (t, year) in self.chart.years.iter().enumerate() {
            for (l, level) in self.chart.levels.iter().enumerate() {
                out.push(PlotPoint {
                    year: *year,
                    level: *level,
                    value: self.chart.bands[l][t],
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub meta: ReportMeta,
    pub rows: Vec<BacktestRow>,
}

fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

fn meta_lines(out: &mut String, m: &ReportMeta) {
    let _ = writeln!(out, "# debtsim {}", m.tool_version);
    let _ = writeln!(out, "# manifest sha256: {}", m.manifest_digest);
    if let Some(s) = m.seed {
        let _ = writeln!(out, "# seed: {s}");
    }
    for (k, v) in &m.settings {
        if !v.contains('\n') {
            let _ = writeln!(out, "# {k}: {v}");
        }
    }
}

/// Renders a list of rows as an aligned text table.
pub fn text_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut w: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (j, c) in r.iter().enumerate() {
            w[j] = w[j].max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let s: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(j, c)| format!("{c:>width$}", width = w[j]))
            .collect();
        let _ = writeln!(out, "{}", s.join("  "));
    };
    line(&mut out, headers.to_vec());
    for r in rows {
        line(&mut out, r.iter().map(String::as_str).collect());
    }
    out
}

impl BaselineReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        meta_lines(&mut out, &self.meta);
        let _ = writeln!(
            out,
            "\nBaseline debt path (% of GDP), anchored at {} = {}",
            self.anchor.0,
            pct(self.anchor.1)
        );
        let rows: Vec<Vec<String>> = self
            .decomposition
            .records
            .iter()
            .zip(&self.path.d)
            .map(|(c, d)| {
                vec![
                    c.year.to_string(),
                    pct(*d),
                    pct(c.delta_d),
                    pct(c.interest),
                    pct(c.inflation),
                    pct(c.growth),
                    pct(c.primary_balance),
                    pct(c.other_flows),
                ]
            })
            .collect();
        out += &text_table(
            &[
                "year",
                "debt",
                "change",
                "interest",
                "inflation",
                "growth",
                "primary",
                "other",
            ],
            &rows,
        );
        match self.crossing_year {
            Some(y) => {
                let _ = writeln!(out, "\nFirst year below {}% of GDP: {y}", pct(self.threshold));
            }
            None => {
                let _ = writeln!(
                    out,
                    "\nDebt does not fall below {}% of GDP in the window",
                    pct(self.threshold)
                );
            }
        }
        for e in &self.provenance.filled {
            let _ = writeln!(
                out,
                "filled {} {} = {} ({})",
                e.column,
                e.year.map_or(String::new(), |y| y.to_string()),
                pct(e.value),
                e.rule
            );
        }
        for w in &self.provenance.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

impl ScenarioReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        meta_lines(&mut out, &self.meta);
        let _ = writeln!(out, "\n{:?} scenario (% of GDP)", self.mode);
        let rows: Vec<Vec<String>> = self
            .baseline
            .years
            .iter()
            .enumerate()
            .map(|(k, y)| {
                vec![
                    y.to_string(),
                    pct(self.baseline.d[k]),
                    pct(self.shocked.d[k]),
                    pct(self.delta[k].1),
                    pct(self.annual_increase[k].1),
                ]
            })
            .collect();
        out += &text_table(&["year", "baseline", "shocked", "delta", "annual"], &rows);
        let _ = writeln!(out, "\nApplied deviations (percentage points)");
        let channels: Vec<&Channel> = self.deviations.keys().collect();
        let mut headers = vec!["year"];
        headers.extend(channels.iter().map(|c| c.as_str()));
        let rows: Vec<Vec<String>> = self
            .baseline
            .years
            .iter()
            .enumerate()
            .map(|(k, y)| {
                let mut r = vec![y.to_string()];
                r.extend(channels.iter().map(|c| pct(self.deviations[*c][k])));
                r
            })
            .collect();
        out += &text_table(&headers, &rows);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        if let Some(c) = &self.caution {
            let _ = writeln!(out, "\n{c}");
        }
        out
    }
}

impl CounterfactualReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        meta_lines(&mut out, &self.meta);
        let _ = writeln!(out, "\nCounterfactual debt paths (% of GDP)");
        let rows: Vec<Vec<String>> = self
            .path_a
            .years
            .iter()
            .enumerate()
            .map(|(k, y)| {
                vec![
                    y.to_string(),
                    pct(self.path_a.d[k]),
                    pct(self.path_b.d[k]),
                    pct(self.path_a.d[k] - self.path_b.d[k]),
                ]
            })
            .collect();
        out += &text_table(&["year", "a", "b", "a - b"], &rows);
        let fmt_peak = |p: Option<(i32, f64)>| p.map_or("none".into(), |(y, d)| format!("{} in {y}", pct(d)));
        let fmt_year = |y: Option<i32>| y.map_or("not within window".into(), |y| y.to_string());
        let _ = writeln!(out, "\npeak a: {}", fmt_peak(self.peak_a));
        let _ = writeln!(out, "peak b: {}", fmt_peak(self.peak_b));
        if let Some(r) = self.peak_reduction {
            let _ = writeln!(out, "peak reduction: {} pp", pct(r));
        }
        let _ = writeln!(out, "stabilization a: {}", fmt_year(self.stabilization_a));
        let _ = writeln!(out, "stabilization b: {}", fmt_year(self.stabilization_b));
        if let Some(g) = self.stabilization_gain {
            let _ = writeln!(out, "stabilization gain: {g} years");
        }
        if let Some(c) = &self.caution {
            let _ = writeln!(out, "\n{c}");
        }
        out
    }
}

impl FanReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        meta_lines(&mut out, &self.meta);
        let _ = writeln!(out, "\nFan chart, {} iterations (% of GDP)", self.chart.iterations);
        let labels: Vec<String> = self
            .chart
            .levels
            .iter()
            .map(|l| format!("p{}", (l * 100.0).round()))
            .collect();
        let mut headers = vec!["year", "baseline"];
        headers.extend(labels.iter().map(String::as_str));
        let rows: Vec<Vec<String>> = self
            .chart
            .years
            .iter()
            .enumerate()
            .map(|(t, y)| {
                let mut r = vec![y.to_string(), pct(self.chart.baseline[t])];
                r.extend(self.chart.bands.iter().map(|b| pct(b[t])));
                r
            })
            .collect();
        out += &text_table(&headers, &rows);
        for e in &self.exceedance {
            let _ = writeln!(out, "\nProbability of debt above {}% of GDP", pct(e.threshold));
            let rows: Vec<Vec<String>> = e
                .years
                .iter()
                .zip(&e.probability)
                .map(|(y, p)| vec![y.to_string(), format!("{p:.3}")])
                .collect();
            out += &text_table(&["year", "probability"], &rows);
        }
        out
    }
}

impl BacktestReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        meta_lines(&mut out, &self.meta);
        let _ = writeln!(out, "\nAccounting backtest (% of GDP)");
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.year.to_string(),
                    pct(r.observed_change),
                    pct(r.predicted_change),
                    pct(r.implied_sfa),
                    pct(r.reported_of),
                ]
            })
            .collect();
        out += &text_table(&["year", "observed", "predicted", "implied sfa", "reported of"], &rows);
        out
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn frac_table(headers: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut units = vec![Unit::Year];
    units.resize(headers.len(), Unit::Fraction);
    Table {
        file: String::new(),
        headers,
        units,
        rows,
    }
    .to_csv_string()
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl BaselineReport {
    pub fn to_csv(&self) -> String {
        let rows = self
            .decomposition
            .records
            .iter()
            .zip(&self.path.d)
            .map(|(c, d)| {
                vec![
                    c.year.to_string(),
                    num(*d),
                    num(c.delta_d),
                    num(c.interest),
                    num(c.inflation),
                    num(c.growth),
                    num(c.primary_balance),
                    num(c.other_flows),
                ]
            })
            .collect();
        let h = names(&["year", "d", "delta_d", "interest", "inflation", "growth", "pb", "of"]);
        csv_with_header(&self.meta, &frac_table(h, rows))
    }
}

impl ScenarioReport {
    pub fn to_csv(&self) -> String {
        let mut h = names(&["year", "baseline", "shocked", "delta", "annual_increase"]);
        h.extend(self.deviations.keys().map(|c| format!("dev_{c}")));
        let rows = (0..self.baseline.len())
            .map(|k| {
                let mut r = vec![
                    self.baseline.years[k].to_string(),
                    num(self.baseline.d[k]),
                    num(self.shocked.d[k]),
                    num(self.delta[k].1),
                    num(self.annual_increase[k].1),
                ];
                r.extend(self.deviations.values().map(|v| num(v[k])));
                r
            })
            .collect();
        csv_with_header(&self.meta, &frac_table(h, rows))
    }
}

impl CounterfactualReport {
    pub fn to_csv(&self) -> String {
        let rows = (0..self.path_a.len())
            .map(|k| {
                vec![
                    self.path_a.years[k].to_string(),
                    num(self.path_a.d[k]),
                    num(self.path_b.d[k]),
                    num(self.path_a.d[k] - self.path_b.d[k]),
                ]
            })
            .collect();
        csv_with_header(&self.meta, &frac_table(names(&["year", "a", "b", "a_minus_b"]), rows))
    }
}

impl FanReport {
    pub fn to_csv(&self) -> String {
        let mut h = names(&["year", "baseline"]);
        h.extend(
            self.chart
                .levels
                .iter()
                .map(|l| format!("p{}", (l * 1e8).round() / 1e6)),
        );
        h.extend(self.exceedance.iter().map(|e| format!("above_{}", num(e.threshold))));
        let rows = (0..self.chart.years.len())
            .map(|t| {
                let mut r = vec![self.chart.years[t].to_string(), num(self.chart.baseline[t])];
                r.extend(self.chart.bands.iter().map(|b| num(b[t])));
                r.extend(self.exceedance.iter().map(|e| num(e.probability[t])));
                r
            })
            .collect();
        csv_with_header(&self.meta, &frac_table(h, rows))
    }
}

impl BacktestReport {
    pub fn to_csv(&self) -> String {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.year.to_string(),
                    num(r.observed_change),
                    num(r.predicted_change),
                    num(r.implied_sfa),
                    num(r.reported_of),
                ]
            })
            .collect();
        let h = names(&[
            "year",
            "observed_change",
            "predicted_change",
            "implied_sfa",
            "reported_of",
        ]);
        csv_with_header(&self.meta, &frac_table(h, rows))
    }
}

/// Metadata header plus a comma-separated table.
pub fn csv_with_header(meta: &ReportMeta, body: &str) -> String {
    let mut out = String::new();
    meta_lines(&mut out, meta);
    out.push_str(body);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(d: &[f64]) -> DebtPath {
        DebtPath {
            years: (2025..2025 + d.len() as i32).collect(),
            d: d.to_vec(),
            negative_warning: false,
        }
    }

    #[test]
    fn stabilization_after_rise() {
        let p = path(&[0.58, 0.60, 0.63, 0.64, 0.64, 0.63]);
        assert_eq!(stabilization_year(&p, 2026), Some(2029));
        assert_eq!(peak_after(&p, 2026), Some((2028, 0.64)));
    }

    #[test]
    fn declining_path_is_stable_at_once() {
        let p = path(&[0.58, 0.57, 0.56]);
        assert_eq!(stabilization_year(&p, 2026), Some(2026));
    }

    #[test]
    fn still_rising_has_no_year() {
        let p = path(&[0.58, 0.59, 0.60]);
        assert_eq!(stabilization_year(&p, 2026), None);
    }

    #[test]
    fn table_alignment() {
        let t = text_table(&["a", "bb"], &[vec!["100".into(), "1".into()]]);
        assert_eq!(t, "  a  bb\n100   1\n");
    }
}
