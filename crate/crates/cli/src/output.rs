//! Output rendering and all-or-nothing file commits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sysrisk::pca::RollingPcaResult;
use sysrisk::xcorr::{significance, RollingXCorrResult};
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};
use crate::inputs::sha256_hex;

/// Files rendered in memory and written together. Nothing appears at any
/// target path unless every file is written; dropping an uncommitted set
/// leaves the filesystem untouched.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: impl Into<PathBuf>, contents: Vec<u8>) {
        self.files.push((path.into(), contents));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    /// `(path, sha256)` of every staged file, in staging order.
    pub fn digests(&self) -> Vec<OutputDigest> {
        self.files
            .iter()
            .map(|(p, c)| OutputDigest {
                path: p.display().to_string(),
                sha256: sha256_hex(c),
            })
            .collect()
    }

    pub fn commit(self) -> CliResult<Vec<PathBuf>> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, contents) in &self.files {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            std::fs::create_dir_all(&dir).map_err(|e| write_error(path, e))?;
            let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| write_error(path, e))?;
            tmp.write_all(contents).map_err(|e| write_error(path, e))?;
            tmp.flush().map_err(|e| write_error(path, e))?;
            staged.push(tmp);
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, (path, _)) in staged.into_iter().zip(&self.files) {
            if let Err(e) = tmp.persist(path) {
                for done in &written {
                    let _ = std::fs::remove_file(done);
                }
                return Err(write_error(path, e.error));
            }
            written.push(path.clone());
        }
        Ok(written)
    }
}

fn write_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::config(format!("cannot write {}: {e}", path.display()))
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub format: crate::inputs::Format,
    pub asset_ids: Vec<String>,
    pub sha256: String,
}

/// Self-description written beside every run's outputs. Contains no
/// timestamps, so identical runs produce identical manifests.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<P: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: P,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<OutputDigest>,
}

impl<P: Serialize> Manifest<P> {
    pub fn new(command: &'static str, parameters: P, inputs: Vec<InputRecord>, outputs: Vec<OutputDigest>) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            parameters,
            inputs,
            outputs,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("manifest serializes");
        out.push(b'\n');
        out
    }
}

/// `window_end_date,frac_1..frac_N,cum_1..cum_N`. Gap windows keep their
/// date with empty value fields.
pub fn pca_csv(result: &RollingPcaResult, n: usize) -> Vec<u8> {
    let mut s = String::from("window_end_date");
    for j in 1..=n {
        write!(s, ",frac_{j}").unwrap();
    }
    for j in 1..=n {
        write!(s, ",cum_{j}").unwrap();
    }
    s.push('\n');
    for e in &result.entries {
        write!(s, "{}", e.window_end_date).unwrap();
        match &e.value {
            Ok(r) => {
                for v in r.fractional.iter().chain(&r.cumulative) {
                    write!(s, ",{v}").unwrap();
                }
            }
            Err(_) => s.push_str(&",".repeat(2 * n)),
        }
        s.push('\n');
    }
    s.into_bytes()
}

#[derive(Serialize)]
struct EigenDump<'a> {
    window_end_date: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<&'a [f64]>,
    /// `eigenvectors[j]` pairs with `eigenvalues[j]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvectors: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<&'a str>,
}

pub fn pca_json(result: &RollingPcaResult) -> Vec<u8> {
    let rows: Vec<EigenDump<'_>> = result
        .entries
        .iter()
        .map(|e| match &e.value {
            Ok(r) => EigenDump {
                window_end_date: e.window_end_date.to_string(),
                eigenvalues: Some(&r.eigenvalues),
                eigenvectors: Some(r.eigenvectors.columns().into_iter().map(|c| c.to_vec()).collect()),
                gap: None,
            },
            Err(g) => EigenDump {
                window_end_date: e.window_end_date.to_string(),
                eigenvalues: None,
                eigenvectors: None,
                gap: Some(&g.reason),
            },
        })
        .collect();
    let mut out = serde_json::to_vec_pretty(&rows).expect("dump serializes");
    out.push(b'\n');
    out
}

/// `window_end_date,r_lag,band,significant`.
pub fn xcorr_csv(result: &RollingXCorrResult) -> Vec<u8> {
    let mut s = String::from("window_end_date,r_lag,band,significant\n");
    for p in result.points() {
        match p.r_at_lag {
            Some(r) => writeln!(s, "{},{r},{},{}", p.window_end_date, p.band, significance(r, p.band)).unwrap(),
            None => writeln!(s, "{},,{},", p.window_end_date, p.band).unwrap(),
        }
    }
    s.into_bytes()
}

/// `window_end_date,lag,r` for every lag of every window.
pub fn xcorr_lags_csv(result: &RollingXCorrResult) -> Vec<u8> {
    let mut s = String::from("window_end_date,lag,r\n");
    for e in &result.entries {
        if let Ok(rep) = &e.value {
            for (lag, r) in rep.r.iter().enumerate() {
                writeln!(s, "{},{lag},{r}", e.window_end_date).unwrap();
            }
        }
    }
    s.into_bytes()
}

/// `dir/name.ext` beside `out`: `results/pca.csv` -> `results/pca.eigen.json`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    out.with_file_name(format!("{stem}{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sibling_names() {
        assert_eq!(
            sibling(Path::new("r/pca.csv"), ".manifest.json"),
            PathBuf::from("r/pca.manifest.json")
        );
        assert_eq!(
            sibling(Path::new("out"), ".lags.csv"),
            PathBuf::from("lags.csv").with_file_name("out.lags.csv")
        );
    }

    #[test]
    fn uncommitted_set_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("x.csv");
        let mut set = OutputSet::new();
        set.add(&target, b"a\n".to_vec());
        drop(set);
        assert!(!target.exists());

        let mut set = OutputSet::new();
        set.add(&target, b"a\n".to_vec());
        set.commit().unwrap();
        assert_eq!(std::fs::read(&target).unwrap(), b"a\n");
    }
}
