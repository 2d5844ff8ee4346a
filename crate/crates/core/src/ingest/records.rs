use std::path::Path;

use serde::{Deserialize, Serialize};

use super::table::Bound;
use super::{parse_number, FileSpec, Manifest, Provenance, Role, Table, Unit};
use crate::disaster::DisasterRecord;
use crate::econometrics::{Panel, PanelObservation};
use crate::error::{Error, Result};

/// Disaster records, damage and affected population converted to fractions.
pub fn load_disasters(manifest: &Manifest) -> Result<(Vec<DisasterRecord>, Provenance)> {
    let spec = manifest.require(Role::Disasters)?;
    let mut log = Provenance::default();
    let b = Bound::open(spec, &["year", "kind", "damage_gdp", "affected_pop"], &mut log)?;
    let year = b.column("year")?.0;
    let kind = b.column("kind")?.0;
    let damage = b.column("damage_gdp")?;
    let pop = b.column("affected_pop")?;
    let mut out = Vec::new();
    for row in &b.table.rows {
        let y = b.year(row, year)?;
        let d = b
            .number(row, damage, Unit::Fraction)?
            .ok_or_else(|| Error::Missing(format!("{}: blank damage in {y}", b.table.file)))?;
        let rec = DisasterRecord::new(y, b.cell(row, kind).parse()?, d, b.number(row, pop, Unit::Fraction)?)?;
        out.push(rec);
    }
    out.sort_by(|a, b| a.year.cmp(&b.year).then(b.damage_gdp.total_cmp(&a.damage_gdp)));
    Ok((out, log))
}

const PANEL_OUTCOMES: [&str; 4] = ["gdp_growth", "primary_balance", "effective_interest_lc", "gdp_deflator"];

/// Impact panel, outcomes and fiscal balance in percent.
pub fn load_panel(manifest: &Manifest) -> Result<(Panel, Provenance)> {
    let spec = manifest.require(Role::Panel)?;
    let mut log = Provenance::default();
    let mut used = vec!["country", "year"];
    used.extend(PANEL_OUTCOMES);
    used.extend([
        "lcompshock",
        "onset",
        "damage",
        "ae",
        "nd_capacity",
        "fb",
        "extra_nd1995",
    ]);
    let b = Bound::open(spec, &used, &mut log)?;
    let country = b.column("country")?.0;
    let year = b.column("year")?.0;
    let outcomes: Vec<_> = PANEL_OUTCOMES
        .iter()
        .map(|c| if b.has(c) { b.column(c).map(Some) } else { Ok(None) })
        .collect::<Result<_>>()?;
    let col = |n: &str| b.column(n);
    let (shock, onset, damage, ae, nd, fb, extra) = (
        col("lcompshock")?,
        col("onset")?,
        col("damage")?,
        col("ae")?,
        col("nd_capacity")?,
        col("fb")?,
        col("extra_nd1995")?,
    );
    let mut rows = Vec::with_capacity(b.table.rows.len());
    for row in &b.table.rows {
        let y = b.year(row, year)?;
        let c = b.cell(row, country).to_string();
        let req = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Missing(format!("{}: blank `{name}` for {c} {y}", b.table.file)))
        };
        let bin = |colu: (usize, Unit), name: &str| -> Result<bool> {
            match req(b.number(row, colu, Unit::Binary)?, name)? {
                v if v == 0.0 => Ok(false),
                v if v == 1.0 => Ok(true),
                v => Err(Error::InvalidArgument(format!(
                    "{name} = {v} for {c} {y}; expected 0 or 1"
                ))),
            }
        };
        let o = |k: usize| -> Result<Option<f64>> {
            match outcomes[k] {
                Some(colu) => b.number(row, colu, Unit::Percent),
                None => Ok(None),
            }
        };
        rows.push(PanelObservation {
            gdp_growth: o(0)?,
            primary_balance: o(1)?,
            effective_interest_lc: o(2)?,
            gdp_deflator: o(3)?,
            lcompshock: req(b.number(row, shock, Unit::Number)?, "lcompshock")?,
            onset: bin(onset, "onset")?,
            damage: req(b.number(row, damage, Unit::Percent)?, "damage")?,
            ae: bin(ae, "ae")?,
            nd_capacity: req(b.number(row, nd, Unit::Index)?, "nd_capacity")?,
            fb: req(b.number(row, fb, Unit::Percent)?, "fb")?,
            extra_nd1995: bin(extra, "extra_nd1995")?,
            country: c.clone(),
            year: y,
        });
    }
    Ok((Panel::new(rows)?, log))
}

const PANEL_UNITS: [(&str, Unit); 13] = [
    ("country", Unit::Label),
    ("year", Unit::Year),
    ("gdp_growth", Unit::Percent),
    ("primary_balance", Unit::Percent),
    ("effective_interest_lc", Unit::Percent),
    ("gdp_deflator", Unit::Percent),
    ("lcompshock", Unit::Number),
    ("onset", Unit::Binary),
    ("damage", Unit::Percent),
    ("ae", Unit::Binary),
    ("nd_capacity", Unit::Index),
    ("fb", Unit::Percent),
    ("extra_nd1995", Unit::Binary),
];

/// Writes a panel in the layout [`load_panel`] reads; unobserved outcomes
/// are left blank. Returns the manifest entry for the file.
pub fn write_panel(path: &Path, panel: &Panel) -> Result<FileSpec> {
    let num = |v: f64| format!("{v:?}");
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let bit = |v: bool| if v { "1" } else { "0" }.to_string();
    let rows = panel
        .rows()
        .iter()
        .map(|r| {
            vec![
                r.country.clone(),
                r.year.to_string(),
                opt(r.gdp_growth),
                opt(r.primary_balance),
                opt(r.effective_interest_lc),
                opt(r.gdp_deflator),
                num(r.lcompshock),
                bit(r.onset),
                num(r.damage),
                bit(r.ae),
                num(r.nd_capacity),
                num(r.fb),
                bit(r.extra_nd1995),
            ]
        })
        .collect();
    Table {
        file: path.display().to_string(),
        headers: PANEL_UNITS.iter().map(|(h, _)| h.to_string()).collect(),
        units: PANEL_UNITS.iter().map(|(_, u)| *u).collect(),
        rows,
    }
    .write(path)?;
    Ok(FileSpec {
        path: path.to_path_buf(),
        source: None,
        columns: Default::default(),
        units: PANEL_UNITS
            .iter()
            .filter(|(_, u)| !matches!(u, Unit::Label | Unit::Year))
            .map(|(h, u)| (h.to_string(), *u))
            .collect(),
        coverage: None,
    })
}

/// One plotted value: band `level` of the debt ratio in `year`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub year: i32,
    pub level: f64,
    pub value: f64,
}

fn plot_table(points: &[PlotPoint]) -> Table {
    Table {
        file: String::new(),
        headers: vec!["year".into(), "level".into(), "value".into()],
        units: vec![Unit::Year, Unit::Fraction, Unit::Fraction],
        rows: points
            .iter()
            .map(|p| vec![p.year.to_string(), format!("{:?}", p.level), format!("{:?}", p.value)])
            .collect(),
    }
}

pub fn write_plot_data(path: &Path, points: &[PlotPoint]) -> Result<()> {
    plot_table(points).write(path)
}

pub fn read_plot_data(path: &Path) -> Result<Vec<PlotPoint>> {
    let t = Table::read(path)?;
    let perr = |msg: String| Error::Parse {
        file: t.file.clone(),
        msg,
    };
    if t.headers != ["year", "level", "value"] {
        return Err(perr(format!(
            "expected columns year,level,value, found {}",
            t.headers.join(",")
        )));
    }
    let shift = |u: Unit| match u {
        Unit::Fraction => Ok(0),
        Unit::Percent => Ok(-2),
        other => Err(perr(format!("unit {other} is not a share"))),
    };
    let (sl, sv) = (shift(t.units[1])?, shift(t.units[2])?);
    t.rows
        .iter()
        .map(|r| {
            let num = |k: usize, s: i32| parse_number(&r[k], s).ok_or_else(|| perr(format!("bad number `{}`", r[k])));
            Ok(PlotPoint {
                year: r[0].parse().map_err(|_| perr(format!("bad year `{}`", r[0])))?,
                level: num(1, sl)?,
                value: num(2, sv)?,
            })
        })
        .collect()
}

pub fn plot_csv(points: &[PlotPoint]) -> String {
    plot_table(points).to_csv_string()
}
