//! Run configuration. Defaults, then a flat `key = value` file, then
//! command-line flags; later sources win.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("expected csv or json, got {s:?}")),
        }
    }
}

/// Invalid configuration; `field` names the offending key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid {field}: {message}")]
pub struct UsageError {
    pub field: String,
    pub message: String,
}

impl UsageError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        UsageError { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Error-term sweep range, log-spaced.
    pub xmin: u64,
    pub xmax: u64,
    /// Points in the error-term sweep and in the exponent grid.
    pub grid: usize,
    /// Tolerance for identities that hold exactly in theory.
    pub tol: f64,
    /// Multiplier on the explicit constants of the stated inequalities.
    pub margin: f64,
    /// ε in `T^ε` factors of the reported bounds.
    pub eps: f64,
    pub seed: u64,
    /// Random points drawn for the case-reduction check.
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Lattice-count cache file for the error-term sweep.
    pub cache: Option<PathBuf>,
    /// Stop the sweep after this many points, leaving the cache to resume from.
    pub stop_after: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            xmin: 1_000,
            xmax: 1_000_000,
            grid: 10_000,
            tol: 1e-9,
            margin: 1.0,
            eps: 0.05,
            seed: 20_240_917,
            samples: 1_000,
            out: None,
            format: Format::Csv,
            cache: None,
            stop_after: None,
        }
    }
}

pub const KEYS: [&str; 12] =
    ["xmin", "xmax", "grid", "tol", "margin", "eps", "seed", "samples", "out", "format", "cache", "stop_after"];

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, UsageError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| UsageError::new(key, format!("cannot parse {v:?}: {e}")))
}

// accepts 1e6-style integers as well
fn parse_count(key: &str, v: &str) -> Result<u64, UsageError> {
    if let Ok(n) = v.parse::<u64>() {
        return Ok(n);
    }
    let f: f64 = parse(key, v)?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(UsageError::new(key, format!("{v:?} is not a non-negative integer")))
    }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        match key {
            "xmin" => self.xmin = parse_count(key, value)?,
            "xmax" => self.xmax = parse_count(key, value)?,
            "grid" => self.grid = parse_count(key, value)? as usize,
            "tol" => self.tol = parse(key, value)?,
            "margin" => self.margin = parse(key, value)?,
            "eps" => self.eps = parse(key, value)?,
            "seed" => self.seed = parse_count(key, value)?,
            "samples" => self.samples = parse_count(key, value)? as usize,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = parse(key, value)?,
            "cache" => self.cache = Some(PathBuf::from(value)),
            "stop_after" => self.stop_after = Some(parse_count(key, value)? as usize),
            _ => return Err(UsageError::new(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        if self.xmin < 1 {
            return Err(UsageError::new("xmin", "must be at least 1"));
        }
        if self.xmin > self.xmax {
            return Err(UsageError::new("xmax", format!("empty sweep range {}..{}", self.xmin, self.xmax)));
        }
        if self.grid < 2 {
            return Err(UsageError::new("grid", "need at least two grid points"));
        }
        let positive = [("tol", self.tol), ("margin", self.margin), ("eps", self.eps)];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(UsageError::new(k, format!("{v} is not a positive number")));
            }
        }
        if self.samples == 0 {
            return Err(UsageError::new("samples", "must be at least 1"));
        }
        Ok(())
    }

    /// `key = value` lines that [`load_file`] reads back to the same config.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "xmin = {}", self.xmin);
        let _ = writeln!(s, "xmax = {}", self.xmax);
        let _ = writeln!(s, "grid = {}", self.grid);
        let _ = writeln!(s, "tol = {:e}", self.tol);
        let _ = writeln!(s, "margin = {:e}", self.margin);
        let _ = writeln!(s, "eps = {:e}", self.eps);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "format = {}", if self.format == Format::Csv { "csv" } else { "json" });
        if let Some(p) = &self.out {
            let _ = writeln!(s, "out = {}", p.display());
        }
        if let Some(p) = &self.cache {
            let _ = writeln!(s, "cache = {}", p.display());
        }
        if let Some(n) = self.stop_after {
            let _ = writeln!(s, "stop_after = {n}");
        }
        s
    }
}

/// Parse `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(UsageError::new(format!("line {}", i + 1), format!("expected key = value, got {raw:?}")));
        };
        let (k, v) = (k.trim().replace('-', "_"), v.trim().to_string());
        if !KEYS.contains(&k.as_str()) {
            return Err(UsageError::new(k, "unknown key"));
        }
        if out.insert(k.clone(), v).is_some() {
            return Err(UsageError::new(k, "given twice"));
        }
    }
    Ok(out)
}

pub fn load_file(path: &Path, into: &mut ExperimentConfig) -> Result<(), UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError::new("config", format!("cannot read {}: {e}", path.display())))?;
    for (k, v) in parse_key_values(&text)? {
        into.set(&k, &v)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Divisor and circle error terms over a log-spaced sweep.
    ErrorTerms,
    /// Exponential-sum bounds and the case reduction.
    Expsum,
    /// Diophantine counts and `G_q` quadrature.
    Spacing1,
    /// Minor-arc data and pair matrices.
    Spacing2,
    /// θ*, q(x) and the exponent curve.
    Exponents,
    /// Every check.
    VerifyAll,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ErrorTerms => "error-terms",
            Command::Expsum => "expsum",
            Command::Spacing1 => "spacing1",
            Command::Spacing2 => "spacing2",
            Command::Exponents => "exponents",
            Command::VerifyAll => "verify-all",
        }
    }

    /// Criteria run by this subcommand, in order.
    pub fn criteria(&self) -> Vec<u32> {
        match self {
            Command::ErrorTerms => vec![6, 7, 8],
            Command::Expsum => vec![13, 14],
            Command::Spacing1 => vec![9, 10],
            Command::Spacing2 => vec![11, 12],
            Command::Exponents => vec![1, 2, 3, 4, 5],
            Command::VerifyAll => (1..=14).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// key = value file applied before the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub xmin: Option<String>,
    #[arg(long, global = true)]
    pub xmax: Option<String>,
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<String>,
    #[arg(long, global = true)]
    pub margin: Option<String>,
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub cache: Option<String>,
    #[arg(long, global = true)]
    pub stop_after: Option<String>,
}

#[derive(Debug, Parser)]
#[command(name = "cdlab", version, about = "Circle and divisor problem numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

impl Flags {
    fn pairs(&self) -> [(&'static str, &Option<String>); 12] {
        [
            ("xmin", &self.xmin),
            ("xmax", &self.xmax),
            ("grid", &self.grid),
            ("tol", &self.tol),
            ("margin", &self.margin),
            ("eps", &self.eps),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("out", &self.out),
            ("format", &self.format),
            ("cache", &self.cache),
            ("stop_after", &self.stop_after),
        ]
    }

    /// Defaults, then the config file, then these flags; validated.
    pub fn resolve(&self) -> Result<ExperimentConfig, UsageError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            load_file(path, &mut cfg)?;
        }
        for (k, v) in self.pairs() {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
