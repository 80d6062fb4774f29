//! Verification reports and deterministic file output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Outcome of a residual-based verification suite.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub suite: String,
    pub space: String,
    pub seed: u64,
    pub samples: usize,
    /// Max absolute residual per check.
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: &str, space: &str, seed: u64, samples: usize, tolerance: f64) -> Self {
        Report {
            suite: suite.into(),
            space: space.into(),
            seed,
            samples,
            residuals: BTreeMap::new(),
            tolerance,
            pass: false,
            notes: Vec::new(),
        }
    }

    /// Record a residual, keeping the maximum per name. NaN is sticky.
    pub fn record(&mut self, name: &str, value: f64) {
        let e = self.residuals.entry(name.to_string()).or_insert(0.0);
        if value.is_nan() || value > *e {
            *e = value;
        }
    }

    /// Set `pass` from the residuals against the report tolerance.
    pub fn finish(mut self) -> Self {
        let tol = self.tolerance;
        self.pass = self.residuals.values().all(|r| r.is_finite() && *r <= tol);
        self
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0f64, |a, b| if b.is_nan() { f64::NAN } else { a.max(*b) })
    }

    pub fn to_json(&self) -> Result<String> {
        to_sorted_json(self)
    }
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps keys in a BTreeMap, hence sorted
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Write via a temporary sibling file and rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Max of a list of residuals in a fixed order, so results do not depend on
/// how parallel work was scheduled.
pub fn ordered_max(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |a, &b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_pass_logic() {
        let mut r = Report::new("x", "sl2c", 1, 3, 1e-10);
        r.record("a", 1e-12);
        r.record("a", 1e-14);
        assert_eq!(r.residuals["a"], 1e-12);
        assert!(r.clone().finish().pass);
        r.record("b", f64::NAN);
        assert!(!r.finish().pass);
    }

    #[test]
    fn json_keys_sorted() {
        let r = Report::new("s", "sp", 0, 1, 0.0).finish();
        let js = r.to_json().unwrap();
        let pos = |k: &str| js.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("pass") < pos("residuals"));
        assert!(pos("samples") < pos("seed"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
