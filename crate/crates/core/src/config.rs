//! Flat `key=value` experiment configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! basis=legendre
//! d=10
//! s=10
//! m=60,80
//! lambdas=0,1e-5,10^-4.5,1e-4,10^-3.5,1e-3
//! iterations=25
//! trials=25
//! oversampling=20
//! seed=20190318
//! ```
//!
//! Keys missing from the file keep the values of
//! [`ExperimentConfig::study`] for the Legendre basis.

use std::path::Path;

use crate::basis::BasisKind;
use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;

pub const KEYS: &[&str] = &[
    "basis",
    "d",
    "s",
    "m",
    "lambdas",
    "iterations",
    "trials",
    "oversampling",
    "seed",
    "lasso_grid",
    "lasso_max_iterations",
    "lasso_tolerance",
];

/// Accepts plain floats and `10^x` powers.
pub fn parse_real(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    if let Some(exp) = t.strip_prefix("10^") {
        return exp
            .trim()
            .parse::<f64>()
            .map(|e| 10f64.powf(e))
            .map_err(|_| format!("`{t}` is not a number"));
    }
    t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"))
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| item(v.trim())).collect()
}

fn parse_int<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.trim().parse::<T>().map_err(|_| format!("`{}` is not a non-negative integer", v.trim()))
}

/// Applies one `key=value` assignment.
pub fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "basis" => cfg.basis_kind = value.parse::<BasisKind>().map_err(|e| e.to_string())?,
        "d" => cfg.dimension = parse_int(value)?,
        "s" => cfg.cross_order = parse_int(value)?,
        "m" => cfg.sample_counts = parse_list(value, parse_int)?,
        "lambdas" => cfg.lambdas = parse_list(value, parse_real)?,
        "iterations" => cfg.iterations = parse_int(value)?,
        "trials" => cfg.trials = parse_int(value)?,
        "oversampling" => cfg.reference_oversampling = parse_int(value)?,
        "seed" => cfg.base_seed = parse_int(value)?,
        "lasso_grid" => cfg.lasso_grid = parse_int(value)?,
        "lasso_max_iterations" => cfg.lasso_max_iterations = parse_int(value)?,
        "lasso_tolerance" => cfg.lasso_tolerance = parse_real(value)?,
        other => return Err(format!("unknown key `{other}`")),
    }
    Ok(())
}

fn split_assignment(line: &str) -> std::result::Result<(&str, &str), String> {
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, found `{line}`"))?;
    Ok((k.trim(), v.trim()))
}

/// Parses configuration text, then applies `overrides` in order.
pub fn parse_str(text: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::study(BasisKind::Legendre);
    let mut seen = std::collections::HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            split_assignment(line).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        if !seen.insert(key.to_string()) {
            return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
        apply(&mut cfg, key, value).map_err(|e| Error::Parse(format!("line {}: {key}: {e}", lineno + 1)))?;
    }
    for o in overrides {
        let (key, value) = split_assignment(o).map_err(|e| Error::Parse(format!("override: {e}")))?;
        apply(&mut cfg, key, value).map_err(|e| Error::Parse(format!("override {key}: {e}")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read config `{}`: {e}", path.display()))
    })?;
    parse_str(&text, overrides)
}

fn render_list<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Canonical text form; [`parse_str`] reads it back to an equal config.
pub fn render(cfg: &ExperimentConfig) -> String {
    let reals = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
    format!(
        "basis={}\nd={}\ns={}\nm={}\nlambdas={}\niterations={}\ntrials={}\noversampling={}\nseed={}\nlasso_grid={}\nlasso_max_iterations={}\nlasso_tolerance={:?}\n",
        cfg.basis_kind,
        cfg.dimension,
        cfg.cross_order,
        render_list(&cfg.sample_counts),
        reals(&cfg.lambdas),
        cfg.iterations,
        cfg.trials,
        cfg.reference_oversampling,
        cfg.base_seed,
        cfg.lasso_grid,
        cfg.lasso_max_iterations,
        cfg.lasso_tolerance,
    )
}
