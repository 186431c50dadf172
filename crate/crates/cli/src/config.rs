//! Job configuration: a strict JSON file, overridden by flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub matrix: Vec<Vec<i64>>,
    #[serde(default = "default_m")]
    pub m: u32,
    #[serde(default = "default_level", rename = "J")]
    pub level: u32,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_m() -> u32 {
    1
}

fn default_level() -> u32 {
    5
}

fn default_grid_n() -> usize {
    128
}

fn default_tol() -> f64 {
    1e-9
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    /// JSON job file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dilation matrix, rows separated by `;` ("1,-1;1,1") or JSON ("[[1,-1],[1,1]]")
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    /// Order m of the scaling function
    #[arg(long)]
    pub m: Option<u32>,
    /// Cascade level
    #[arg(long = "J", value_name = "J")]
    pub level: Option<u32>,
    /// Points per axis of the frequency grids
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Truncation tolerance of the infinite product
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for sampled checks
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn parse_matrix(text: &str) -> Result<Vec<Vec<i64>>, CliError> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad matrix {text:?}: {e}")));
    }
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|e| CliError::Config(format!("bad matrix entry {x:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

fn read_file(path: &Path) -> Result<JobConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl JobArgs {
    /// Merges the config file (if any) with the flags and validates the result.
    pub fn resolve(&self) -> Result<JobConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => read_file(path)?,
            None => JobConfig {
                matrix: Vec::new(),
                m: default_m(),
                level: default_level(),
                grid_n: default_grid_n(),
                tol: default_tol(),
                out: None,
                seed: 0,
            },
        };
        if let Some(m) = &self.matrix {
            cfg.matrix = parse_matrix(m)?;
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(j) = self.level {
            cfg.level = j;
        }
        if let Some(n) = self.grid_n {
            cfg.grid_n = n;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl JobConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.matrix.is_empty() {
            return Err(CliError::Config("no matrix given (use --matrix or a config file)".into()));
        }
        let d = self.matrix.len();
        if let Some(row) = self.matrix.iter().find(|r| r.len() != d) {
            return Err(CliError::Config(format!("matrix is not square: {d} rows, a row has {} entries", row.len())));
        }
        if self.m == 0 {
            return Err(CliError::Config("m must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.grid_n < 2 {
            return Err(CliError::Config(format!("grid_n must be at least 2, got {}", self.grid_n)));
        }
        Ok(())
    }
}
