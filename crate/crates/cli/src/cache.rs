//! Verdict cache for `check`, enabled by setting `BESAT_CACHE_DIR`.
//!
//! Entries are reports keyed by a hash of the input and the options that
//! can change a verdict. Inconclusive runs are not stored. A cached witness
//! is checked again before it is trusted.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use besat::formula::{Formula, Signature};
use besat::semantics::{evaluate, IntervalStructure};
use sha2::{Digest, Sha256};

use crate::report::RunReport;

pub const ENV: &str = "BESAT_CACHE_DIR";

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn from_env() -> Option<Cache> {
        let dir = std::env::var_os(ENV).filter(|d| !d.is_empty())?;
        Some(Cache { dir: dir.into() })
    }

    pub fn at(dir: &Path) -> Cache {
        Cache {
            dir: dir.to_path_buf(),
        }
    }

    pub fn key(f: &Formula, max_states: Option<usize>, unsound_m: Option<usize>) -> String {
        let mut h = Sha256::new();
        h.update(format!("v1\n{f}\n{max_states:?}\n{unsound_m:?}\n").as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str, f: &Formula) -> Option<RunReport> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let report: RunReport = serde_json::from_str(&text).ok()?;
        match report.verdict.as_str() {
            "unsat" => Some(report),
            "sat" if witness_holds(&report, f) => Some(report),
            _ => None,
        }
    }

    pub fn store(&self, key: &str, report: &RunReport) -> std::io::Result<()> {
        if report.verdict == "inconclusive" {
            return Ok(());
        }
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(report)?)?;
        fs::rename(tmp, self.path(key))
    }
}

fn witness_holds(report: &RunReport, f: &Formula) -> bool {
    let Some(w) = &report.witness else {
        return false;
    };
    let Ok(sig) = Signature::new(f.letters().iter().map(|l| l.as_ref())) else {
        return false;
    };
    let Ok(s) = IntervalStructure::from_names(Arc::new(sig), w.points.clone()) else {
        return false;
    };
    w.verified && evaluate(&s, s.top(), f).unwrap_or(false)
}
