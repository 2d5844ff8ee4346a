use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::table::Bound;
use super::{FileSpec, Manifest, Provenance, ProvenanceEntry, Role, Table, Unit};
use crate::error::{Error, Result};
use crate::model::{debt_step, DebtPath, MacroAssumptions, Rates, Variable};

const RATE_COLUMNS: [&str; 5] = ["g", "pi", "i", "pb", "of"];

/// Historical assumptions with the observed debt ratio of the same years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub assumptions: MacroAssumptions,
    pub debt: DebtPath,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projections {
    pub assumptions: MacroAssumptions,
    pub provenance: Provenance,
}

struct Parsed {
    years: Vec<i32>,
    rates: Vec<Rates>,
    debt: Option<Vec<f64>>,
}

/// Reads year-indexed rate columns, sorting by year and enforcing a gapless
/// range. Blank `of` cells take the mean of the observed `of` values of
/// earlier years (zero when there are none); any other blank is an error.
fn read_series(spec: &FileSpec, with_debt: bool, log: &mut Provenance) -> Result<Parsed> {
    let mut used = vec!["year"];
    used.extend(RATE_COLUMNS);
    if with_debt {
        used.push("d");
    }
    let b = Bound::open(spec, &used, log)?;
    let file = b.table.file.clone();
    let year_col = b.column("year")?.0;
    let cols: Vec<_> = RATE_COLUMNS.iter().map(|c| b.column(c)).collect::<Result<_>>()?;
    let d_col = if with_debt { Some(b.column("d")?) } else { None };

    let mut by_year: BTreeMap<i32, (Vec<Option<f64>>, Option<f64>)> = BTreeMap::new();
    for row in &b.table.rows {
        let year = b.year(row, year_col)?;
        let vals = cols
            .iter()
            .map(|c| b.number(row, *c, Unit::Fraction))
            .collect::<Result<Vec<_>>>()?;
        let d = match d_col {
            Some(c) => Some(
                b.number(row, c, Unit::Fraction)?
                    .ok_or_else(|| Error::Missing(format!("{file}: blank `d` in {year}")))?,
            ),
            None => None,
        };
        if by_year.insert(year, (vals, d)).is_some() {
            return Err(Error::Parse {
                file: file.clone(),
                msg: format!("duplicate year {year}"),
            });
        }
    }
    let (Some(&first), Some(&last)) = (by_year.keys().next(), by_year.keys().last()) else {
        return Err(Error::Parse {
            file,
            msg: "no data rows".into(),
        });
    };
    // the data range and the declared coverage must both be gapless
    let (need_first, need_last) = spec.coverage.map_or((first, last), |[a, z]| (a, z));
    if let Some(y) = (need_first.min(first)..=need_last.max(last)).find(|y| !by_year.contains_key(y)) {
        return Err(Error::MissingYear { what: file, year: y });
    }

    let mut years = Vec::new();
    let mut rates = Vec::new();
    let mut debt = Vec::new();
    let mut of_seen = Vec::new();
    for (year, (vals, d)) in by_year {
        for (name, v) in RATE_COLUMNS.iter().zip(&vals).take(4) {
            if v.is_none() {
                return Err(Error::Missing(format!("{file}: blank `{name}` in {year}")));
            }
        }
        let of = match vals[4] {
            Some(v) => {
                of_seen.push(v);
                v
            }
            None => {
                let fill = if of_seen.is_empty() {
                    0.0
                } else {
                    of_seen.iter().sum::<f64>() / of_seen.len() as f64
                };
                log.filled.push(ProvenanceEntry {
                    file: file.clone(),
                    year: Some(year),
                    column: "of".into(),
                    rule: if of_seen.is_empty() {
                        "no earlier observation; set to zero".into()
                    } else {
                        format!("average of previous years ({} values)", of_seen.len())
                    },
                    value: fill,
                });
                fill
            }
        };
        years.push(year);
        rates.push(Rates {
            g: vals[0].unwrap_or_default(),
            pi: vals[1].unwrap_or_default(),
            i: vals[2].unwrap_or_default(),
            pb: vals[3].unwrap_or_default(),
            of,
        });
        if let Some(d) = d {
            debt.push(d);
        }
    }
    Ok(Parsed {
        years,
        rates,
        debt: with_debt.then_some(debt),
    })
}

fn assumptions(p: &Parsed) -> Result<MacroAssumptions> {
    MacroAssumptions::from_rates(p.years[0], &p.rates)
}

/// Historical series and observed debt from the manifest's history entry.
pub fn load_history(manifest: &Manifest) -> Result<History> {
    let spec = manifest.require(Role::History)?;
    let mut provenance = Provenance::default();
    let p = read_series(spec, true, &mut provenance)?;
    let debt = DebtPath::observed(p.years.clone(), p.debt.clone().unwrap_or_default())?;
    Ok(History {
        assumptions: assumptions(&p)?,
        debt,
        provenance,
    })
}

/// Projected assumptions from the manifest's projections entry.
pub fn load_projections(manifest: &Manifest) -> Result<Projections> {
    let spec = manifest.require(Role::Projections)?;
    let mut provenance = Provenance::default();
    let p = read_series(spec, false, &mut provenance)?;
    Ok(Projections {
        assumptions: assumptions(&p)?,
        provenance,
    })
}

fn series_table(a: &MacroAssumptions, debt: Option<&DebtPath>) -> Result<Table> {
    let mut headers: Vec<String> = ["year"]
        .iter()
        .chain(RATE_COLUMNS.iter())
        .map(|s| s.to_string())
        .collect();
    let mut units = vec![Unit::Year];
    units.extend([Unit::Fraction; 5]);
    if debt.is_some() {
        headers.push("d".into());
        units.push(Unit::Fraction);
    }
    let vars = [
        Variable::Growth,
        Variable::Inflation,
        Variable::Interest,
        Variable::PrimaryBalance,
        Variable::OtherFlows,
    ];
    let mut rows = Vec::new();
    for (k, year) in a.years().iter().enumerate() {
        let mut r = vec![year.to_string()];
        r.extend(vars.iter().map(|v| format!("{:?}", a.series(*v)[k])));
        if let Some(d) = debt {
            let v = d.get(*year).ok_or_else(|| Error::MissingYear {
                what: "debt path".into(),
                year: *year,
            })?;
            r.push(format!("{v:?}"));
        }
        rows.push(r);
    }
    Ok(Table {
        file: String::new(),
        headers,
        units,
        rows,
    })
}

fn fraction_spec(path: &Path, with_debt: bool) -> FileSpec {
    let mut units: BTreeMap<String, Unit> = RATE_COLUMNS.iter().map(|c| (c.to_string(), Unit::Fraction)).collect();
    if with_debt {
        units.insert("d".into(), Unit::Fraction);
    }
    FileSpec {
        path: path.to_path_buf(),
        source: None,
        columns: BTreeMap::new(),
        units,
        coverage: None,
    }
}

/// Writes a history file in fractions and returns a manifest entry that
/// reads it back.
pub fn write_history(path: &Path, history: &History) -> Result<FileSpec> {
    series_table(&history.assumptions, Some(&history.debt))?.write(path)?;
    Ok(fraction_spec(path, true))
}

pub fn write_projections(path: &Path, assumptions: &MacroAssumptions) -> Result<FileSpec> {
    series_table(assumptions, None)?.write(path)?;
    Ok(fraction_spec(path, false))
}

/// One year of the accounting check, in fractions of GDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestRow {
    pub year: i32,
    pub observed_change: f64,
    /// Change implied by the recursion without other flows.
    pub predicted_change: f64,
    /// Part of the observed change the recursion does not explain.
    pub implied_sfa: f64,
    /// Other flows as recorded in the history file.
    pub reported_of: f64,
}

/// Replays the recursion with `of = 0` on each year whose previous-year
/// debt is observed, attributing the gap to stock-flow adjustment.
pub fn backtest(history: &MacroAssumptions, observed: &DebtPath) -> Result<Vec<BacktestRow>> {
    let mut out = Vec::new();
    for (k, &year) in history.years().iter().enumerate() {
        let (Some(prev), Some(cur)) = (observed.get(year - 1), observed.get(year)) else {
            continue;
        };
        let r = history.rates(k);
        let predicted = debt_step(prev, &Rates { of: 0.0, ..r }).map_err(|e| e.at_year(year))?;
        out.push(BacktestRow {
            year,
            observed_change: cur - prev,
            predicted_change: predicted - prev,
            implied_sfa: cur - predicted,
            reported_of: r.of,
        });
    }
    Ok(out)
}
