//! Run configuration: JSON file plus CLI flags, with precedence
//! built-in defaults < config file < flags.

use anyhow::Context;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Quadrature,
    Montecarlo,
}

/// Every knob a run can take. Optional fields merge: a later layer wins
/// where it is `Some`. The resolved form is written next to the run outputs
/// and parses back to the identical value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub g0: Option<f64>,
    pub epsilon: Option<f64>,
    pub steps: Option<u64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Initial coin state as four reals (re↑, im↑, re↓, im↓); normalized
    /// before use.
    pub coin: Option<[f64; 4]>,
    pub method: Option<Method>,
    pub out: Option<PathBuf>,
    pub k_grid: Option<usize>,
    pub g_nodes: Option<usize>,
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub eps_points: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(CliError::Runtime)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Overlay `other` on top of `self`: fields set in `other` win.
    pub fn overlaid(mut self, other: &RunConfig) -> Self {
        macro_rules! take {
            ($field:ident) => {
                if other.$field.is_some() {
                    self.$field = other.$field.clone();
                }
            };
        }
        take!(g0);
        take!(epsilon);
        take!(steps);
        take!(samples);
        take!(seed);
        take!(coin);
        take!(method);
        take!(out);
        take!(k_grid);
        take!(g_nodes);
        take!(eps_min);
        take!(eps_max);
        take!(eps_points);
        self
    }

    pub fn write_pretty(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// Defaults shared by every command; commands override what they must
/// (profile runs default to 200 steps, for example).
pub fn base_defaults() -> RunConfig {
    RunConfig {
        g0: Some(0.0),
        epsilon: None,
        steps: Some(500),
        samples: Some(2000),
        seed: Some(7),
        coin: Some([std::f64::consts::FRAC_1_SQRT_2, 0.0, 0.0, std::f64::consts::FRAC_1_SQRT_2]),
        method: Some(Method::Closed),
        out: Some(PathBuf::from(".")),
        k_grid: Some(1024),
        g_nodes: Some(129),
        eps_min: Some(0.1),
        eps_max: Some(std::f64::consts::PI),
        eps_points: Some(60),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_lossless() {
        let config = RunConfig {
            g0: Some(std::f64::consts::PI),
            epsilon: Some(2.23),
            steps: Some(321),
            samples: None,
            seed: Some(99),
            coin: Some([0.6, 0.0, 0.0, 0.8]),
            method: Some(Method::Quadrature),
            out: Some(PathBuf::from("artifacts/run1")),
            k_grid: Some(4096),
            g_nodes: None,
            eps_min: Some(0.25),
            eps_max: Some(3.0),
            eps_points: Some(17),
        };
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"stepz": 4}"#);
        assert!(err.is_err());
    }

    #[test]
    fn overlay_prefers_later_layers() {
        let base = base_defaults();
        let file = RunConfig { steps: Some(50), epsilon: Some(1.0), ..Default::default() };
        let flags = RunConfig { steps: Some(80), ..Default::default() };
        let merged = base.overlaid(&file).overlaid(&flags);
        assert_eq!(merged.steps, Some(80));
        assert_eq!(merged.epsilon, Some(1.0));
        assert_eq!(merged.samples, Some(2000));
    }
}
