//! JSON configuration: the number field as a minimal polynomial, the two
//! generator matrices with entries as power-basis coordinate vectors (each
//! coordinate an integer or a "p/q" string), and the experiment knobs with
//! their defaults. Reports embed the fully resolved config, and a resolved
//! config serializes back to the same schema it was parsed from.

use num::{BigInt, BigRational, Zero};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use taulab_core::matgroup::{GeneratorSystem, Mat2K};
use taulab_core::numberfield::NumberField;
use taulab_core::verify::ScanOptions;
use taulab_core::Real;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("field construction failed: {0}")]
    Field(#[from] taulab_core::numberfield::NumberFieldError),
    #[error("generator construction failed: {0}")]
    Generators(#[from] taulab_core::matgroup::MatGroupError),
}

/// One matrix entry in the file: a bare integer, a "p/q" string, or a
/// power-basis coordinate vector of those.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum ElementSpec {
    Int(i64),
    Rational(String),
    Coords(Vec<RationalSpec>),
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum RationalSpec {
    Int(i64),
    Str(String),
}

fn parse_rational_str(s: &str) -> Result<BigRational, ConfigError> {
    let bad = |why: &str| ConfigError::Parse(format!("malformed rational {s:?}: {why}"));
    let (num, den) = match s.split_once('/') {
        None => (s.trim(), "1"),
        Some((n, d)) => (n.trim(), d.trim()),
    };
    let num = BigInt::from_str(num).map_err(|_| bad("numerator is not an integer"))?;
    let den = BigInt::from_str(den).map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

impl RationalSpec {
    fn to_rational(&self) -> Result<BigRational, ConfigError> {
        match self {
            RationalSpec::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            RationalSpec::Str(s) => parse_rational_str(s),
        }
    }
}

impl ElementSpec {
    fn to_coords(&self) -> Result<Vec<BigRational>, ConfigError> {
        match self {
            ElementSpec::Int(v) => Ok(vec![BigRational::from_integer(BigInt::from(*v))]),
            ElementSpec::Rational(s) => Ok(vec![parse_rational_str(s)?]),
            ElementSpec::Coords(v) => v.iter().map(|r| r.to_rational()).collect(),
        }
    }
}

pub type MatrixSpec = [[ElementSpec; 2]; 2];

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
pub struct FieldSpec {
    pub minpoly: Vec<i64>,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
pub struct GeneratorsSpec {
    pub a: MatrixSpec,
    pub b: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
pub struct SamplerSpec {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self { trials: default_trials(), seed: default_seed() }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
pub struct MuSpec {
    #[serde(default = "default_mu_r_max")]
    pub r_max: usize,
    #[serde(default = "default_mu_trials")]
    pub trials: u64,
}

impl Default for MuSpec {
    fn default() -> Self {
        Self { r_max: default_mu_r_max(), trials: default_mu_trials() }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
pub struct OutputSpec {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_out_dir(), format: OutputFormat::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

fn default_p_min() -> u64 { 3 }
fn default_p_max() -> u64 { 61 }
fn default_budget() -> usize { 8_000_000 }
fn default_tol() -> Real { 1e-8 }
fn default_max_iter() -> usize { 100 }
fn default_trials() -> u64 { 64 }
fn default_seed() -> u64 { 1 }
fn default_depth() -> usize { 10 }
fn default_mu_r_max() -> usize { 25 }
fn default_mu_trials() -> u64 { 1000 }
fn default_out_dir() -> PathBuf { PathBuf::from(".") }

/// The resolved configuration; serializes back to the input schema.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
pub struct Config {
    pub field: FieldSpec,
    pub generators: GeneratorsSpec,
    #[serde(default = "default_p_min")]
    pub p_min: u64,
    #[serde(default = "default_p_max")]
    pub p_max: u64,
    #[serde(default = "default_budget")]
    pub vertex_budget: usize,
    #[serde(default = "default_tol")]
    pub spectral_tol: Real,
    #[serde(default = "default_max_iter")]
    pub spectral_max_iter: usize,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default = "default_depth")]
    pub relation_check_depth: usize,
    #[serde(default)]
    pub mu: MuSpec,
    #[serde(default)]
    pub nested_primes: Option<Vec<u64>>,
    #[serde(default)]
    pub jobs: usize,
    #[serde(default)]
    pub output: OutputSpec,
}

pub fn parse_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<Config, ConfigError> {
    let cfg: Config =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

/// Collects every violated bound instead of stopping at the first.
fn validate(cfg: &Config) -> Result<(), ConfigError> {
    let mut errs = Vec::new();
    if cfg.field.minpoly.len() < 2 {
        errs.push("field.minpoly must have degree >= 1".to_string());
    }
    if cfg.field.minpoly.last() != Some(&1) {
        errs.push("field.minpoly must be monic (last coefficient 1)".to_string());
    }
    if cfg.p_min <= 2 {
        errs.push(format!("p_min must be > 2 (got {})", cfg.p_min));
    }
    if cfg.p_min > cfg.p_max {
        errs.push(format!("p_min {} must be <= p_max {}", cfg.p_min, cfg.p_max));
    }
    if cfg.vertex_budget == 0 {
        errs.push("vertex_budget must be positive".to_string());
    }
    if !(cfg.spectral_tol > 0.0) {
        errs.push(format!("spectral_tol must be positive (got {})", cfg.spectral_tol));
    }
    if cfg.spectral_max_iter == 0 {
        errs.push("spectral_max_iter must be positive".to_string());
    }
    if cfg.sampler.trials == 0 {
        errs.push("sampler.trials must be positive".to_string());
    }
    if cfg.relation_check_depth == 0 {
        errs.push("relation_check_depth must be positive".to_string());
    }
    if cfg.mu.r_max == 0 {
        errs.push("mu.r_max must be positive".to_string());
    }
    if let Some(primes) = &cfg.nested_primes {
        if primes.is_empty() {
            errs.push("nested_primes must not be empty when present".to_string());
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            errs.push("nested_primes must be strictly ascending".to_string());
        }
    }
    let degree = cfg.field.minpoly.len().saturating_sub(1);
    for (name, mat) in [("a", &cfg.generators.a), ("b", &cfg.generators.b)] {
        for row in mat {
            for e in row {
                // Malformed rationals are parse errors, not bound violations.
                e.to_coords()?;
                if let ElementSpec::Coords(v) = e {
                    if v.is_empty() || v.len() > degree.max(1) {
                        errs.push(format!(
                            "generator {name}: coordinate vectors must have 1..={} entries",
                            degree.max(1)
                        ));
                    }
                }
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::Validation(errs))
    }
}

/// Build the number field and validated generator system the config names.
pub fn build_system(
    cfg: &Config,
) -> Result<(Arc<NumberField<Real>>, GeneratorSystem<Real>), ConfigError> {
    let minpoly: Vec<BigInt> = cfg.field.minpoly.iter().map(|&c| BigInt::from(c)).collect();
    let field = NumberField::new(minpoly)?;
    let mat = |spec: &MatrixSpec| -> Result<Mat2K<Real>, ConfigError> {
        let mut entries = Vec::with_capacity(4);
        for row in spec {
            for e in row {
                entries.push(field.element(e.to_coords()?));
            }
        }
        let e: [_; 4] = entries.try_into().expect("exactly four entries");
        Ok(Mat2K::new(e)?)
    };
    let a = mat(&cfg.generators.a)?;
    let b = mat(&cfg.generators.b)?;
    let gs = GeneratorSystem::new(a, b)?;
    Ok((field, gs))
}

impl Config {
    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            p_min: self.p_min,
            p_max: self.p_max,
            vertex_budget: self.vertex_budget,
            spectral_tol: self.spectral_tol,
            spectral_max_iter: self.spectral_max_iter,
            sampler_trials: self.sampler.trials,
            sampler_seed: self.sampler.seed,
            relation_depth: self.relation_check_depth,
            mu_r_max: self.mu.r_max,
            mu_trials: self.mu.trials,
            jobs: self.jobs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "field": {"minpoly": [0, 1]},
        "generators": {
            "a": [[1, 2], [0, 1]],
            "b": [[1, 0], [2, 1]]
        },
        "p_min": 3,
        "p_max": 61
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.vertex_budget, 8_000_000);
        assert_eq!(cfg.spectral_tol, 1e-8);
        assert_eq!(cfg.relation_check_depth, 10);
        assert_eq!(cfg.sampler.trials, 64);
        assert_eq!(cfg.output.format, OutputFormat::Both);
        let (field, gs) = build_system(&cfg).unwrap();
        assert_eq!(field.degree(), 1);
        assert!((gs.scale_m() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn p_min_of_two_is_rejected() {
        let text = MINIMAL.replace("\"p_min\": 3", "\"p_min\": 2");
        match parse_config_str(&text).unwrap_err() {
            ConfigError::Validation(errs) => {
                assert!(errs.iter().any(|e| e.contains("p_min")));
            }
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn zero_denominator_is_a_parse_error() {
        let text = MINIMAL.replace("[[1, 2], [0, 1]]", "[[\"1/0\", 2], [0, 1]]");
        match parse_config_str(&text).unwrap_err() {
            ConfigError::Parse(msg) => assert!(msg.contains("zero denominator")),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn validation_collects_every_violation() {
        let text = r#"{
            "field": {"minpoly": [0, 1]},
            "generators": {"a": [[1, 2], [0, 1]], "b": [[1, 0], [2, 1]]},
            "p_min": 2, "p_max": 1, "vertex_budget": 0, "spectral_tol": 0.0
        }"#;
        match parse_config_str(text).unwrap_err() {
            ConfigError::Validation(errs) => assert!(errs.len() >= 4, "{errs:?}"),
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn config_roundtrips_through_serialization() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        let emitted = serde_json::to_string_pretty(&cfg).unwrap();
        let back = parse_config_str(&emitted).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn field_coordinates_parse() {
        let text = r#"{
            "field": {"minpoly": [-2, 0, 1]},
            "generators": {
                "a": [[1, [0, 2]], [0, 1]],
                "b": [[1, 0], [[0, "2/1"], 1]]
            }
        }"#;
        let cfg = parse_config_str(text).unwrap();
        let (field, gs) = build_system(&cfg).unwrap();
        assert_eq!(field.degree(), 2);
        assert!((gs.scale_m() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    }
}
