use std::collections::BTreeMap;
use std::path::Path;

use super::table::Bound;
use super::{FileSpec, Provenance, Table, Unit};
use crate::econometrics::{CoefficientSet, CoefficientTable, ModelKind, Outcome, Term};
use crate::error::{Error, Result};

const COLUMNS: [&str; 7] = ["model", "outcome", "horizon", "term", "estimate", "se", "prediction_se"];

/// Rows whose `term` carries fit metadata instead of a coefficient.
const META: [&str; 4] = ["n_obs", "r_squared", "n_countries", "tau"];

#[derive(Default)]
struct Cell {
    estimates: BTreeMap<Term, f64>,
    ses: BTreeMap<Term, f64>,
    prediction_se: Option<f64>,
    meta: BTreeMap<&'static str, f64>,
}

/// Coefficient file named by a manifest entry.
pub fn load_coefficients(spec: &FileSpec) -> Result<(CoefficientTable, Provenance)> {
    let mut log = Provenance::default();
    let b = Bound::open(spec, &COLUMNS, &mut log)?;
    let file = b.table.file.clone();
    let perr = |msg: String| Error::Parse {
        file: file.clone(),
        msg,
    };
    let idx: Vec<(usize, Unit)> = COLUMNS.iter().map(|c| b.column(c)).collect::<Result<_>>()?;

    let mut cells: BTreeMap<(ModelKind, Outcome, usize), Cell> = BTreeMap::new();
    for row in &b.table.rows {
        let kind: ModelKind = b.cell(row, idx[0].0).parse()?;
        let outcome: Outcome = b.cell(row, idx[1].0).parse()?;
        let h_text = b.cell(row, idx[2].0);
        let horizon: usize = h_text.parse().map_err(|_| perr(format!("bad horizon `{h_text}`")))?;
        let term = b.cell(row, idx[3].0);
        let est = b
            .number(row, idx[4], Unit::Number)?
            .ok_or_else(|| perr(format!("blank estimate for {kind} {outcome} h={horizon} {term}")))?;
        let se = b.number(row, idx[5], Unit::Number)?;
        let pse = b.number(row, idx[6], Unit::Number)?;
        let cell = cells.entry((kind, outcome, horizon)).or_default();
        if let Some(p) = pse {
            match cell.prediction_se {
                Some(q) if q != p => {
                    return Err(perr(format!(
                        "{kind} {outcome} h={horizon}: prediction SE {p} differs from {q} on an earlier row"
                    )))
                }
                _ => cell.prediction_se = Some(p),
            }
        }
        if let Some(m) = META.iter().find(|m| **m == term) {
            if cell.meta.insert(m, est).is_some() {
                return Err(perr(format!("{kind} {outcome} h={horizon}: duplicate `{term}`")));
            }
            continue;
        }
        let t: Term = term.parse()?;
        let se = se.ok_or_else(|| perr(format!("blank SE for {kind} {outcome} h={horizon} {term}")))?;
        if cell.estimates.insert(t, est).is_some() {
            return Err(perr(format!("{kind} {outcome} h={horizon}: duplicate term `{term}`")));
        }
        cell.ses.insert(t, se);
    }

    let mut table = CoefficientTable::new();
    for ((kind, outcome, horizon), c) in cells {
        let count = |k: &str| -> Result<Option<usize>> {
            c.meta
                .get(k)
                .map(|v| {
                    if v.fract() == 0.0 && *v >= 0.0 {
                        Ok(*v as usize)
                    } else {
                        Err(perr(format!("{k} = {v} is not a count")))
                    }
                })
                .transpose()
        };
        table.insert(CoefficientSet {
            model_kind: kind,
            outcome,
            horizon,
            estimates: c.estimates,
            standard_errors: c.ses,
            prediction_se: c
                .prediction_se
                .ok_or_else(|| perr(format!("{kind} {outcome} h={horizon}: no prediction SE")))?,
            tau: c.meta.get("tau").copied(),
            n_obs: count("n_obs")?,
            r_squared: c.meta.get("r_squared").copied(),
            n_countries: count("n_countries")?,
        })?;
    }
    Ok((table, log))
}

/// Coefficient file outside any manifest, such as one written by the
/// estimation command.
pub fn read_coefficients(path: &Path) -> Result<CoefficientTable> {
    let spec = FileSpec {
        path: path.to_path_buf(),
        source: None,
        columns: BTreeMap::new(),
        units: [
            ("horizon", Unit::Count),
            ("estimate", Unit::Number),
            ("se", Unit::Number),
            ("prediction_se", Unit::Number),
        ]
        .iter()
        .map(|(c, u)| (c.to_string(), *u))
        .collect(),
        coverage: None,
    };
    load_coefficients(&spec).map(|(t, _)| t)
}

/// Table in the coefficient-file schema.
pub fn coefficient_rows(table: &CoefficientTable) -> Table {
    let mut rows = Vec::new();
    for s in table.iter() {
        let key = [s.model_kind.to_string(), s.outcome.to_string(), s.horizon.to_string()];
        let pse = s.prediction_se.to_string();
        for t in Term::ALL {
            if let Some(v) = s.estimates.get(&t) {
                let mut r = key.to_vec();
                r.extend([
                    t.to_string(),
                    v.to_string(),
                    s.standard_errors[&t].to_string(),
                    pse.clone(),
                ]);
                rows.push(r);
            }
        }
        let meta = [
            ("n_obs", s.n_obs.map(|v| v as f64)),
            ("r_squared", s.r_squared),
            ("n_countries", s.n_countries.map(|v| v as f64)),
            ("tau", s.tau),
        ];
        for (name, v) in meta {
            if let Some(v) = v {
                let mut r = key.to_vec();
                r.extend([name.to_string(), v.to_string(), String::new(), pse.clone()]);
                rows.push(r);
            }
        }
    }
    Table {
        file: String::new(),
        headers: COLUMNS.iter().map(|c| c.to_string()).collect(),
        units: vec![
            Unit::Label,
            Unit::Label,
            Unit::Count,
            Unit::Label,
            Unit::Number,
            Unit::Number,
            Unit::Number,
        ],
        rows,
    }
}

pub fn write_coefficients(path: &Path, table: &CoefficientTable) -> Result<()> {
    coefficient_rows(table).write(path)
}
