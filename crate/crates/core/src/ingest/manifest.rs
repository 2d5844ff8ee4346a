use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Unit;
use crate::error::{Error, Result};

/// Role a file plays in a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    History,
    Projections,
    Disasters,
    Panel,
    Calibration,
    Coefficients,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::History => "history",
            Role::Projections => "projections",
            Role::Disasters => "disasters",
            Role::Panel => "panel",
            Role::Calibration => "calibration",
            Role::Coefficients => "coefficients",
        })
    }
}

/// One file entry of the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub path: PathBuf,
    /// Free-text origin of the data.
    #[serde(default)]
    pub source: Option<String>,
    /// Logical column name to file header, where they differ.
    #[serde(default)]
    pub columns: BTreeMap<String, String>,
    /// Expected unit of every numeric column, by logical name.
    #[serde(default)]
    pub units: BTreeMap<String, Unit>,
    /// First and last year the file must cover without gaps.
    #[serde(default)]
    pub coverage: Option<[i32; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    #[serde(default)]
    label: Option<String>,
    history: Option<FileSpec>,
    projections: Option<FileSpec>,
    disasters: Option<FileSpec>,
    panel: Option<FileSpec>,
    calibration: Option<FileSpec>,
    #[serde(default)]
    coefficients: BTreeMap<String, FileSpec>,
}

/// Dataset description with paths resolved against the manifest directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub path: PathBuf,
    pub label: Option<String>,
    pub history: Option<FileSpec>,
    pub projections: Option<FileSpec>,
    pub disasters: Option<FileSpec>,
    pub panel: Option<FileSpec>,
    pub calibration: Option<FileSpec>,
    pub coefficients: BTreeMap<String, FileSpec>,
    raw: String,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&raw, path, base)
    }

    /// Parses manifest text; relative file paths are taken from `base`.
    pub fn parse(raw: &str, path: &Path, base: &Path) -> Result<Self> {
        let m: ManifestFile = toml::from_str(raw).map_err(|e| Error::Parse {
            file: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let fix = |s: Option<FileSpec>| s.map(|s| resolve(s, base));
        Ok(Manifest {
            path: path.to_path_buf(),
            label: m.label,
            history: fix(m.history),
            projections: fix(m.projections),
            disasters: fix(m.disasters),
            panel: fix(m.panel),
            calibration: fix(m.calibration),
            coefficients: m.coefficients.into_iter().map(|(k, v)| (k, resolve(v, base))).collect(),
            raw: raw.to_string(),
        })
    }

    /// Entry for `role`, or a validation error naming it.
    pub fn require(&self, role: Role) -> Result<&FileSpec> {
        let spec = match role {
            Role::History => self.history.as_ref(),
            Role::Projections => self.projections.as_ref(),
            Role::Disasters => self.disasters.as_ref(),
            Role::Panel => self.panel.as_ref(),
            Role::Calibration => self.calibration.as_ref(),
            Role::Coefficients => self.coefficients.values().next(),
        };
        spec.ok_or_else(|| Error::Missing(format!("manifest {} has no `{role}` entry", self.path.display())))
    }

    pub fn coefficient_file(&self, name: &str) -> Result<&FileSpec> {
        self.coefficients.get(name).ok_or_else(|| {
            Error::Missing(format!(
                "manifest has no coefficient set `{name}` (available: {})",
                self.coefficients.keys().cloned().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    fn files(&self) -> Vec<&FileSpec> {
        [
            &self.history,
            &self.projections,
            &self.disasters,
            &self.panel,
            &self.calibration,
        ]
        .into_iter()
        .flatten()
        .chain(self.coefficients.values())
        .collect()
    }

    /// SHA-256 over the manifest text and every referenced file that exists,
    /// in a fixed order.
    pub fn digest(&self) -> Result<String> {
        let mut h = Sha256::new();
        h.update(self.raw.as_bytes());
        for f in self.files() {
            h.update(f.path.to_string_lossy().as_bytes());
            match std::fs::read(&f.path) {
                Ok(bytes) => h.update(&bytes),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => h.update(b"<missing>"),
                Err(e) => return Err(Error::io(f.path.display().to_string(), e)),
            }
        }
        Ok(hex::encode(h.finalize()))
    }
}

fn resolve(mut s: FileSpec, base: &Path) -> FileSpec {
    if s.path.is_relative() {
        s.path = base.join(&s.path);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_relative_paths() {
        let m = Manifest::parse(
            "[history]\npath = \"h.csv\"\nunits = { g = \"percent\" }\n[coefficients.lp]\npath = \"/abs/lp.csv\"\n",
            Path::new("m.toml"),
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(m.history.as_ref().unwrap().path, Path::new("/data/h.csv"));
        assert_eq!(m.coefficient_file("lp").unwrap().path, Path::new("/abs/lp.csv"));
        assert!(m.require(Role::Panel).is_err());
        assert_eq!(m.history.unwrap().units["g"], Unit::Percent);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Manifest::parse("[history]\npth = \"x\"\n", Path::new("m"), Path::new(".")).is_err());
    }

    #[test]
    fn empty_manifest_lacks_roles() {
        let m = Manifest::parse("", Path::new("m"), Path::new(".")).unwrap();
        let e = m.require(Role::History).unwrap_err();
        assert!(e.is_validation());
    }
}
