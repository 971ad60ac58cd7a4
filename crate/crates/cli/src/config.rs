//! Run configuration: a TOML file whose blocks mirror the subcommands.
//! Every field is optional; command-line flags take precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::failure::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: ParamsBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub evolve: EvolveBlock,
    #[serde(default)]
    pub sieve: SieveBlock,
    #[serde(default)]
    pub cat: CatBlock,
    #[serde(default)]
    pub fig1: Fig1Block,
    #[serde(default)]
    pub medium: MediumBlock,
    #[serde(default)]
    pub oracle: OracleBlock,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub omega: Option<f64>,
    pub mass: Option<f64>,
    pub hbar: Option<f64>,
    #[serde(rename = "D", alias = "d")]
    pub d: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    pub fn delimiter(self) -> u8 {
        match self {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Tsv => "tsv",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A time given as a number or as a multiple of `π/Ω` (`"pi/2"`,
/// `"3pi"`, `"0.5π"`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TimeValue {
    Number(f64),
    Text(String),
}

impl TimeValue {
    pub fn resolve(&self, omega: f64) -> Result<f64, String> {
        match self {
            TimeValue::Number(v) => Ok(*v),
            TimeValue::Text(s) => parse_time(s, omega),
        }
    }
}

pub fn parse_time(text: &str, omega: f64) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('π', "pi");
    let bad = || format!("`{text}` is not a time (number, or multiple of pi such as `pi/2`, `3pi`)");
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (&s[..pos], &s[pos + 2..]);
    let factor = match head.trim_end_matches('*') {
        "" => 1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail {
        "" => 1.0,
        t => t.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    if divisor == 0.0 {
        return Err(bad());
    }
    Ok(factor * std::f64::consts::PI / divisor / omega)
}

/// Comma-separated list of times.
pub fn parse_time_list(text: &str) -> Vec<TimeValue> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| TimeValue::Text(s.trim().to_string()))
        .collect()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveBlock {
    pub c_re: Option<f64>,
    pub c_im: Option<f64>,
    pub x: Option<f64>,
    pub p: Option<f64>,
    pub times: Option<Vec<TimeValue>>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveBlock {
    pub tol: Option<f64>,
    pub scan: Option<bool>,
    pub re_range: Option<[f64; 2]>,
    pub im_range: Option<[f64; 2]>,
    pub resolution: Option<usize>,
    pub times: Option<Vec<TimeValue>>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatBlock {
    pub delta2: Option<f64>,
    pub periods: Option<u32>,
    pub points: Option<usize>,
    pub half_width: Option<f64>,
    pub grids: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig1Block {
    pub two_n_pi_d: Option<f64>,
    pub n: Option<u32>,
    pub points: Option<usize>,
    pub half_width: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumBlock {
    pub spectrum: Option<PathBuf>,
    pub beta: Option<f64>,
    pub density: Option<f64>,
    pub coupling: Option<f64>,
    pub cutoff: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    /// Initial squeezing parameters as `[re, im]` pairs.
    pub squeezing: Option<Vec<[f64; 2]>>,
    pub times: Option<Vec<TimeValue>>,
    pub d_values: Option<Vec<f64>>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
    pub trace_tol: Option<f64>,
}

impl RunConfig {
    /// Load `path`; relative paths inside the file are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Failure::Config(format!("config {}: {e}", path.display())))?;
        if let (Some(spec), Some(dir)) = (cfg.medium.spectrum.as_mut(), path.parent()) {
            if spec.is_relative() {
                *spec = dir.join(&*spec);
            }
        }
        Ok(cfg)
    }
}
