//! Serializable description of one run. A report echoes its spec, and
//! running the echoed spec again reproduces the report.

use serde::{Deserialize, Serialize};

use quantumness_core::solvers::{ExploreOptions, QuantumnessOptions, SolverConfig};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandSpec {
    Validate {
        path: String,
    },
    Accfid {
        path: String,
        config: SolverConfig,
        /// Qubit oracle cross-check at this grid resolution.
        #[serde(default)]
        resolution: Option<f64>,
    },
    Quantumness {
        path: String,
        config: SolverConfig,
        #[serde(default)]
        outer: QuantumnessOptions,
    },
    SweepTwoState {
        xs: Vec<f64>,
        config: SolverConfig,
    },
    SweepSymmetric {
        ns: Vec<usize>,
        config: SolverConfig,
    },
    CloneVerify {
        xs: Vec<f64>,
        config: SolverConfig,
        argmin_step: f64,
    },
    ExploreQd {
        dim: usize,
        sizes: Vec<usize>,
        config: SolverConfig,
        #[serde(default)]
        options: ExploreOptions,
    },
}

impl CommandSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CommandSpec::Validate { .. } => "validate",
            CommandSpec::Accfid { .. } => "accfid",
            CommandSpec::Quantumness { .. } => "quantumness",
            CommandSpec::SweepTwoState { .. } => "sweep-two-state",
            CommandSpec::SweepSymmetric { .. } => "sweep-symmetric",
            CommandSpec::CloneVerify { .. } => "clone-verify",
            CommandSpec::ExploreQd { .. } => "explore-qd",
        }
    }

    pub fn input_path(&self) -> Option<&str> {
        match self {
            CommandSpec::Validate { path }
            | CommandSpec::Accfid { path, .. }
            | CommandSpec::Quantumness { path, .. } => Some(path),
            _ => None,
        }
    }

    pub fn config(&self) -> Option<&SolverConfig> {
        match self {
            CommandSpec::Validate { .. } => None,
            CommandSpec::Accfid { config, .. }
            | CommandSpec::Quantumness { config, .. }
            | CommandSpec::SweepTwoState { config, .. }
            | CommandSpec::SweepSymmetric { config, .. }
            | CommandSpec::CloneVerify { config, .. }
            | CommandSpec::ExploreQd { config, .. } => Some(config),
        }
    }
}

/// Parses `start:step:end` (inclusive) or a comma-separated list.
/// Grid points are rounded to 12 decimals so `0:0.1:1` yields `0.3`, not
/// `0.30000000000000004`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| CliError::Input(format!("grid `{text}`: {m}"));
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(&format!("`{s}` is not a finite number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [start, step, end] => {
            let (start, step, end) = (number(start)?, number(step)?, number(end)?);
            if !(step > 0.0) || end < start {
                return Err(bad("need step > 0 and end >= start"));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize;
            if count > 1_000_000 {
                return Err(bad("too many points"));
            }
            (0..=count)
                .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        [_] => text.split(',').map(number).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad("expected start:step:end or a comma list")),
    };
    if values.is_empty() {
        return Err(bad("empty"));
    }
    Ok(values)
}

pub fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("`{s}` is not a non-negative integer")))
        })
        .collect()
}
