//! Resolved evaluation configuration: defaults, config-file values, and
//! command-line overrides, in ascending precedence.
//!
//! The resolved configuration is serialized canonically (sorted
//! `key=value` lines) into every report header together with its SHA-256
//! hash, so any output file can be traced back to the exact settings
//! that produced it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use vidmeter::pooling::PlanStratum;

/// Tool version stamped into every report header.
pub const TOOL_VERSION: &str = concat!("vidmeter ", env!("CARGO_PKG_VERSION"));

/// All tunable settings, fully resolved.
///
/// Paths are kept as raw strings exactly as given so the serialized
/// config (and therefore its hash) is reproducible across invocations.
#[derive(Clone, Debug)]
pub struct EvalConfig {
    values: BTreeMap<String, String>,
}

/// Defaults for every numeric knob; each is overridable via the config
/// file or a flag and is recorded in the report header.
const DEFAULTS: &[(&str, &str)] = &[
    ("alpha", "0.05"),
    ("cutoffs", "10,100,1000"),
    ("difficulty-threshold", ""),
    ("epsilon", "0.00001"),
    ("fa-axis", "time"),
    ("iterations", "100000"),
    ("naudc-limit", "0.2"),
    ("pr-target", "0.15"),
    ("seed", "0"),
    ("theta", "0.2"),
];

impl EvalConfig {
    /// Builds a config from an optional `key=value` file plus overrides
    /// (flag name, value) applied on top of it.
    pub fn resolve(
        config_file: Option<&Path>,
        overrides: &[(&str, Option<String>)],
    ) -> Result<Self> {
        let mut values: BTreeMap<String, String> = DEFAULTS
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| ((*k).to_owned(), (*v).to_owned()))
            .collect();

        if let Some(path) = config_file {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            for (line_no, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!(
                        "{}:{}: expected key=value, got {line:?}",
                        path.display(),
                        line_no + 1
                    );
                };
                values.insert(key.trim().to_owned(), value.trim().to_owned());
            }
        }
        for (key, value) in overrides {
            if let Some(value) = value {
                values.insert((*key).to_owned(), value.clone());
            }
        }
        Ok(EvalConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .with_context(|| format!("missing required setting `{key}` (flag --{key})"))
    }

    pub fn path(&self, key: &str) -> Result<PathBuf> {
        Ok(PathBuf::from(self.require(key)?))
    }

    /// A comma-separated list of paths (each may be a file or directory).
    pub fn paths(&self, key: &str) -> Result<Vec<PathBuf>> {
        let raw = self.require(key)?;
        Ok(raw.split(',').map(|p| PathBuf::from(p.trim())).collect())
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let raw = self.require(key)?;
        raw.parse()
            .with_context(|| format!("setting `{key}`: expected a number, got {raw:?}"))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let raw = self.require(key)?;
        raw.parse()
            .with_context(|| format!("setting `{key}`: expected an integer, got {raw:?}"))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(raw) => raw
                .parse()
                .with_context(|| format!("setting `{key}`: expected a number, got {raw:?}")),
            None => Ok(default),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.u64("seed")
    }

    /// Rank cutoffs for precision/recall tables.
    pub fn cutoffs(&self) -> Result<Vec<usize>> {
        self.require("cutoffs")?
            .split(',')
            .map(|c| {
                c.trim()
                    .parse()
                    .with_context(|| format!("setting `cutoffs`: bad cutoff {c:?}"))
            })
            .collect()
    }

    /// Pool strata given as `lo-hi:rate,lo-hi:rate,...`.
    pub fn strata(&self) -> Result<Vec<PlanStratum>> {
        let raw = self.require("strata")?;
        raw.split(',')
            .map(|part| {
                let err = || format!("setting `strata`: expected lo-hi:rate, got {part:?}");
                let (span, rate) = part.split_once(':').with_context(err)?;
                let (lo, hi) = span.split_once('-').with_context(err)?;
                Ok(PlanStratum {
                    rank_lo: lo.trim().parse().with_context(err)?,
                    rank_hi: hi.trim().parse().with_context(err)?,
                    sampling_rate: rate.trim().parse().with_context(err)?,
                })
            })
            .collect()
    }

    /// Canonical serialization: sorted `key=value` lines, LF-terminated.
    ///
    /// The output directory is excluded — it cannot affect any computed
    /// value, and keeping it out lets reports land anywhere while still
    /// hashing identically.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.values.iter().filter(|(k, _)| k.as_str() != "out") {
            let _ = writeln!(out, "{key}={value}");
        }
        out
    }

    /// SHA-256 of the canonical serialization, lowercase hex.
    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }

    /// Comment header stamped at the top of every CSV/text output.
    pub fn file_header(&self) -> String {
        format!(
            "# {}\n# config-sha256 {}\n# seed {}\n",
            TOOL_VERSION,
            self.sha256(),
            self.get("seed").unwrap_or("0"),
        )
    }

    /// Full settings map for the JSON report header, minus the output
    /// directory (see [`EvalConfig::canonical`]).
    pub fn as_map(&self) -> BTreeMap<String, String> {
        self.values
            .iter()
            .filter(|(k, _)| k.as_str() != "out")
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_are_present_without_a_file() {
        let cfg = EvalConfig::resolve(None, &[]).unwrap();
        assert_eq!(cfg.f64("alpha").unwrap(), 0.05);
        assert_eq!(cfg.f64("theta").unwrap(), 0.2);
        assert_eq!(cfg.f64("naudc-limit").unwrap(), 0.2);
        assert_eq!(cfg.f64("epsilon").unwrap(), 1e-5);
        assert_eq!(cfg.seed().unwrap(), 0);
        assert_eq!(cfg.cutoffs().unwrap(), vec![10, 100, 1000]);
    }

    #[test]
    fn flags_override_file_values_which_override_defaults() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment\nseed=7\nalpha=0.01").unwrap();
        let cfg = EvalConfig::resolve(
            Some(file.path()),
            &[("alpha", Some("0.10".to_owned())), ("theta", None)],
        )
        .unwrap();
        assert_eq!(cfg.seed().unwrap(), 7);
        assert_eq!(cfg.f64("alpha").unwrap(), 0.10);
        assert_eq!(cfg.f64("theta").unwrap(), 0.2);
    }

    #[test]
    fn hash_tracks_every_setting() {
        let a = EvalConfig::resolve(None, &[]).unwrap();
        let b = EvalConfig::resolve(None, &[("seed", Some("1".to_owned()))]).unwrap();
        assert_ne!(a.sha256(), b.sha256());
        assert_eq!(a.sha256().len(), 64);
        assert_eq!(a.sha256(), EvalConfig::resolve(None, &[]).unwrap().sha256());
    }

    #[test]
    fn strata_spec_parses() {
        let cfg =
            EvalConfig::resolve(None, &[("strata", Some("1-250:1.0,251-1000:0.111".into()))])
                .unwrap();
        let strata = cfg.strata().unwrap();
        assert_eq!(strata.len(), 2);
        assert_eq!(strata[0].rank_lo, 1);
        assert_eq!(strata[1].rank_hi, 1000);
        assert_eq!(strata[1].sampling_rate, 0.111);
    }

    #[test]
    fn malformed_config_line_is_rejected_with_location() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "seed 7").unwrap();
        let err = EvalConfig::resolve(Some(file.path()), &[]).unwrap_err();
        assert!(err.to_string().contains(":1:"), "{err}");
    }
}
