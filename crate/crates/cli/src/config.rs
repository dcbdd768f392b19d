//! Flag/file resolution. Every setting can arrive on the command line or in
//! a JSON config file; when both supply a value, the file wins and a warning
//! names the flag it overrode.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use axiograd::{QuadRule, QuadratureConfig};
use serde::Deserialize;

use crate::CliError;

/// The config-file form: every field optional, unknown fields rejected so a
/// typo cannot silently fall back to a default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Must match the invoked subcommand when present.
    pub command: Option<String>,
    pub model: Option<PathBuf>,
    pub method: Option<String>,
    pub input: Option<Vec<f64>>,
    pub baseline: Option<Vec<f64>>,
    pub all: Option<bool>,
    pub axioms: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub cases: Option<usize>,
    pub tol: Option<f64>,
    pub dim: Option<usize>,
    pub half_width: Option<f64>,
    pub kind: Option<String>,
    pub alphas: Option<Vec<f64>>,
    pub orders: Option<Vec<usize>>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub quad: Option<FileQuad>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileQuad {
    /// Gauss-Legendre order. Mutually exclusive with `points`.
    pub order: Option<usize>,
    /// Midpoint-rule node count. Mutually exclusive with `order`.
    pub points: Option<usize>,
    pub panels: Option<usize>,
    pub max_panels: Option<usize>,
    pub tolerance: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>, command: &str) -> Result<FileConfig, CliError> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let file: FileConfig = serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!("config file {}: {e}", path.display()))
        })?;
        if let Some(named) = &file.command {
            if named != command {
                return Err(CliError::Config(format!(
                    "config file names command {named:?} but {command:?} was invoked"
                )));
            }
        }
        Ok(file)
    }
}

/// File value beats flag value beats default; a warning goes to standard
/// error whenever the file discards an explicitly given flag.
pub fn resolve<T: Clone + Display>(
    file: Option<&T>,
    flag: Option<&T>,
    default: T,
    name: &str,
) -> T {
    match (file, flag) {
        (Some(f), Some(_)) => {
            eprintln!("warning: config file overrides --{name} (using {f})");
            f.clone()
        }
        (Some(f), None) => f.clone(),
        (None, Some(v)) => v.clone(),
        (None, None) => default,
    }
}

/// [`resolve`] for settings with no default: absent from both sources is a
/// config error.
pub fn resolve_required<T: Clone + Display>(
    file: Option<&T>,
    flag: Option<&T>,
    name: &str,
) -> Result<T, CliError> {
    match (file, flag) {
        (Some(f), Some(_)) => {
            eprintln!("warning: config file overrides --{name} (using {f})");
            Ok(f.clone())
        }
        (Some(f), None) => Ok(f.clone()),
        (None, Some(v)) => Ok(v.clone()),
        (None, None) => Err(CliError::Config(format!("--{name} is required"))),
    }
}

/// Paths don't implement Display; same rule, spelled for PathBuf.
pub fn resolve_path(
    file: Option<&PathBuf>,
    flag: Option<&PathBuf>,
    name: &str,
) -> Option<PathBuf> {
    match (file, flag) {
        (Some(f), Some(_)) => {
            eprintln!("warning: config file overrides --{name} (using {})", f.display());
            Some(f.clone())
        }
        (Some(f), None) => Some(f.clone()),
        (None, Some(v)) => Some(v.clone()),
        (None, None) => None,
    }
}

/// `"0.5,-1"` → `[0.5, -1.0]`.
pub fn parse_vector(text: &str, name: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|piece| {
            piece.trim().parse::<f64>().map_err(|_| {
                CliError::Config(format!(
                    "--{name}: {piece:?} is not a decimal number (expected e.g. \"1,0.5\")"
                ))
            })
        })
        .collect()
}

pub fn parse_usize_list(text: &str, name: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|piece| {
            piece.trim().parse::<usize>().map_err(|_| {
                CliError::Config(format!("--{name}: {piece:?} is not a whole number"))
            })
        })
        .collect()
}

/// Quadrature settings assembled from a base config, then file fields, then
/// flags, with the same file-beats-flag rule per field.
pub struct QuadFlags {
    pub order: Option<usize>,
    pub points: Option<usize>,
    pub panels: Option<usize>,
    pub max_panels: Option<usize>,
    pub tolerance: Option<f64>,
}

pub fn resolve_quadrature(
    base: QuadratureConfig,
    file: Option<&FileQuad>,
    flags: &QuadFlags,
) -> Result<QuadratureConfig, CliError> {
    let empty = FileQuad::default();
    let file = file.unwrap_or(&empty);
    let order = resolve_opt(file.order, flags.order, "quad-order");
    let points = resolve_opt(file.points, flags.points, "quad-points");
    let mut q = base;
    match (order, points) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "choose one of --quad-order and --quad-points, not both".into(),
            ));
        }
        (Some(order), None) => q.rule = QuadRule::GaussLegendre { order },
        (None, Some(points)) => q.rule = QuadRule::Midpoint { points },
        (None, None) => {}
    }
    if let Some(panels) = resolve_opt(file.panels, flags.panels, "quad-panels") {
        q.panels = panels;
    }
    if let Some(max_panels) = resolve_opt(file.max_panels, flags.max_panels, "quad-max-panels") {
        q.max_panels = max_panels;
    }
    if let Some(tolerance) = resolve_opt(file.tolerance, flags.tolerance, "quad-tol") {
        q.tolerance = tolerance;
    }
    q.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(q)
}

fn resolve_opt<T: Copy + Display>(file: Option<T>, flag: Option<T>, name: &str) -> Option<T> {
    match (file, flag) {
        (Some(f), Some(_)) => {
            eprintln!("warning: config file overrides --{name} (using {f})");
            Some(f)
        }
        (Some(f), None) => Some(f),
        (None, flag) => flag,
    }
}
