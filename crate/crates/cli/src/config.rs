//! Sweep configuration for `verify-ma`, read from a small TOML file:
//!
//! ```toml
//! d_k = [-3, -4, -7]
//! f0_max = 2
//! n_max = 6
//! method = "brute"     # brute | action | both
//! format = "csv"       # csv | json
//! output = "sweep.csv" # optional; standard output otherwise
//! ```

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::Deserialize;

use cmdecomp::numtheory::is_fundamental;

use crate::{Failure, Format, Method};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d_k: Option<Vec<i64>>,
    f0_max: Option<u64>,
    n_max: Option<u64>,
    method: Option<Method>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub d_k: Vec<BigInt>,
    pub f0_max: u64,
    pub n_max: u64,
    pub method: Method,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl SweepConfig {
    /// Merges the optional file with command-line values; the command line wins.
    pub fn resolve(
        path: Option<&Path>,
        d_k: Vec<BigInt>,
        f0_max: Option<u64>,
        n_max: Option<u64>,
        method: Option<Method>,
        output: Option<PathBuf>,
        format: Option<Format>,
    ) -> Result<Self, Failure> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                toml::from_str::<FileConfig>(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        let d_k = if d_k.is_empty() { file.d_k.unwrap_or_default().into_iter().map(BigInt::from).collect() } else { d_k };
        let cfg = SweepConfig {
            d_k,
            f0_max: f0_max.or(file.f0_max).ok_or_else(|| Failure::Usage("--f0-max is required".into()))?,
            n_max: n_max.or(file.n_max).ok_or_else(|| Failure::Usage("--n-max is required".into()))?,
            method: method.or(file.method).unwrap_or(Method::Brute),
            output: output.or(file.output),
            format: format.or(file.format).unwrap_or(Format::Csv),
        };
        if cfg.d_k.is_empty() {
            return Err(Failure::Usage("at least one --dk is required".into()));
        }
        if cfg.f0_max == 0 || cfg.n_max == 0 {
            return Err(Failure::Usage("sweep bounds must be positive".into()));
        }
        for d in &cfg.d_k {
            if d.sign() != num_bigint::Sign::Minus || !is_fundamental(d) {
                return Err(Failure::Math(format!("{d} is not a negative fundamental discriminant")));
            }
        }
        Ok(cfg)
    }
}
