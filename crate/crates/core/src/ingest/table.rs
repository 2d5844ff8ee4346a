use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{FileSpec, Provenance};
use crate::error::{Error, Result};

/// Unit of a column, as written in a file's units row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Percent,
    Fraction,
    Year,
    Label,
    Binary,
    Count,
    Index,
    Number,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Percent => "percent",
            Unit::Fraction => "fraction",
            Unit::Year => "year",
            Unit::Label => "label",
            Unit::Binary => "binary",
            Unit::Count => "count",
            Unit::Index => "index",
            Unit::Number => "number",
        }
    }

    /// Decimal shift that converts a value in this unit to a fraction.
    fn shift_to_fraction(self) -> i32 {
        match self {
            Unit::Percent => -2,
            _ => 0,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "percent" | "%" => Unit::Percent,
            "fraction" => Unit::Fraction,
            "year" => Unit::Year,
            "label" => Unit::Label,
            "binary" => Unit::Binary,
            "count" => Unit::Count,
            "index" => Unit::Index,
            "number" => Unit::Number,
            other => return Err(Error::InvalidArgument(format!("unknown unit `{other}`"))),
        })
    }
}

/// Parses a decimal number and multiplies it by `10^shift` exactly, by
/// moving the exponent before rounding to binary. `"2.5"` with shift -2
/// gives the same double as the literal `0.025`.
pub fn parse_number(text: &str, shift: i32) -> Option<f64> {
    let t = text.trim();
    if t.is_empty() || t.contains(',') {
        return None;
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(p) => (&t[..p], t[p + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int}{frac}");
    let e = exp.checked_add(shift)?.checked_sub(frac.len() as i32)?;
    let v: f64 = format!("{sign}{}e{e}", if all.is_empty() { "0" } else { &all })
        .parse()
        .ok()?;
    v.is_finite().then_some(v)
}

/// Raw content of a tabular file: headers, units and string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub headers: Vec<String>,
    pub units: Vec<Unit>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn parse(file: &str, text: &str) -> Result<Self> {
        let perr = |msg: String| Error::Parse {
            file: file.to_string(),
            msg,
        };
        let first = text.lines().next().unwrap_or("");
        if first.contains(';') {
            return Err(perr(
                "semicolon-delimited file; use commas between fields and a period as decimal point".into(),
            ));
        }
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = rdr.records();
        let headers: Vec<String> = match records.next() {
            Some(r) => r.map_err(|e| perr(e.to_string()))?.iter().map(str::to_string).collect(),
            None => return Err(perr("empty file".into())),
        };
        let units: Vec<Unit> = match records.next() {
            Some(r) => r
                .map_err(|e| perr(e.to_string()))?
                .iter()
                .map(|u| u.parse().map_err(|e: Error| perr(format!("units row: {e}"))))
                .collect::<Result<_>>()?,
            None => return Err(perr("missing units row".into())),
        };
        let mut rows = Vec::new();
        for (k, r) in records.enumerate() {
            let r = r.map_err(|e| {
                perr(format!(
                    "{e}; a field count mismatch often means decimal commas, which are not accepted"
                ))
            })?;
            let row: Vec<String> = r.iter().map(str::to_string).collect();
            if row.iter().all(String::is_empty) {
                continue;
            }
            for (cell, unit) in row.iter().zip(&units) {
                if !matches!(unit, Unit::Label) && cell.contains(',') {
                    return Err(perr(format!("data row {}: decimal comma in `{cell}`", k + 1)));
                }
            }
            rows.push(row);
        }
        Ok(Table {
            file: file.to_string(),
            headers,
            units,
            rows,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        w.write_record(&self.headers).map_err(|e| csv_io(path, e))?;
        w.write_record(self.units.iter().map(|u| u.as_str()))
            .map_err(|e| csv_io(path, e))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| csv_io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(&self.headers);
        let _ = w.write_record(self.units.iter().map(|u| u.as_str()));
        for r in &self.rows {
            let _ = w.write_record(r);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }

    fn position(&self, header: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == header)
    }
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    Error::io(path.display().to_string(), std::io::Error::other(e.to_string()))
}

/// A table bound to its manifest entry: resolves logical columns, checks
/// declared units and converts numbers.
pub(crate) struct Bound<'a> {
    pub table: Table,
    spec: &'a FileSpec,
}

impl<'a> Bound<'a> {
    /// Reads the file and warns about columns the loader will not use.
    pub fn open(spec: &'a FileSpec, used: &[&str], log: &mut Provenance) -> Result<Self> {
        let table = Table::read(&spec.path)?;
        let b = Bound { table, spec };
        let known: Vec<String> = used.iter().map(|c| b.header(c)).collect();
        for h in &b.table.headers {
            if !known.contains(h) {
                log.warnings
                    .push(format!("{}: ignoring extra column `{h}`", b.table.file));
            }
        }
        Ok(b)
    }

    fn header(&self, logical: &str) -> String {
        self.spec
            .columns
            .get(logical)
            .cloned()
            .unwrap_or_else(|| logical.to_string())
    }

    pub fn has(&self, logical: &str) -> bool {
        self.table.position(&self.header(logical)).is_some()
    }

    /// Column index after checking the file's unit against the manifest.
    pub fn column(&self, logical: &str) -> Result<(usize, Unit)> {
        let h = self.header(logical);
        let idx = self.table.position(&h).ok_or_else(|| Error::Parse {
            file: self.table.file.clone(),
            msg: format!("missing column `{h}`"),
        })?;
        let found = self.table.units[idx];
        if let Some(declared) = self.spec.units.get(logical) {
            if *declared != found {
                return Err(Error::UnitMismatch {
                    column: h,
                    declared: declared.to_string(),
                    found: found.to_string(),
                });
            }
        } else if !matches!(found, Unit::Label | Unit::Year) {
            return Err(Error::Parse {
                file: self.table.file.clone(),
                msg: format!("manifest declares no unit for numeric column `{logical}`"),
            });
        }
        Ok((idx, found))
    }

    pub fn cell<'r>(&self, row: &'r [String], idx: usize) -> &'r str {
        row.get(idx).map_or("", String::as_str)
    }

    /// Number in column `logical` converted to `target` (fraction or percent);
    /// `None` for an empty cell.
    pub fn number(&self, row: &[String], col: (usize, Unit), target: Unit) -> Result<Option<f64>> {
        let text = self.cell(row, col.0);
        if text.is_empty() {
            return Ok(None);
        }
        let shift = match (col.1, target) {
            (Unit::Percent, Unit::Fraction) => col.1.shift_to_fraction(),
            (Unit::Fraction, Unit::Percent) => 2,
            _ => 0,
        };
        parse_number(text, shift).map(Some).ok_or_else(|| Error::Parse {
            file: self.table.file.clone(),
            msg: format!("bad number `{text}` in column `{}`", self.table.headers[col.0]),
        })
    }

    pub fn year(&self, row: &[String], col: usize) -> Result<i32> {
        let text = self.cell(row, col);
        text.parse().map_err(|_| Error::Parse {
            file: self.table.file.clone(),
            msg: format!("bad year `{text}`"),
        })
    }
}
