//! Layered settings: flags > `TMELLIN_*` environment > config file > defaults.

use std::path::Path;

use clap::ValueEnum;
use serde::Deserialize;
use tmellin_core::quadrature::QuadratureConfig;
use tmellin_core::transform::InversionConfig;

use crate::CliError;

pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-2;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_NODES: usize = 512;
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// One source of settings; unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub tol: Option<f64>,
    pub max_nodes: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub contour_c: Option<f64>,
    pub contour_height: Option<f64>,
    pub contour_steps: Option<usize>,
}

impl Layer {
    /// Fields set here win over `lower`.
    pub fn over(self, lower: Layer) -> Layer {
        Layer {
            tol: self.tol.or(lower.tol),
            max_nodes: self.max_nodes.or(lower.max_nodes),
            seed: self.seed.or(lower.seed),
            format: self.format.or(lower.format),
            contour_c: self.contour_c.or(lower.contour_c),
            contour_height: self.contour_height.or(lower.contour_height),
            contour_steps: self.contour_steps.or(lower.contour_steps),
        }
    }

    pub fn from_env(env: &dyn Fn(&str) -> Option<String>) -> Result<Layer, CliError> {
        fn read<T: std::str::FromStr>(env: &dyn Fn(&str) -> Option<String>, key: &str) -> Result<Option<T>, CliError> {
            match env(key) {
                None => Ok(None),
                Some(raw) if raw.trim().is_empty() => Ok(None),
                Some(raw) => raw
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| CliError::usage(format!("{key}={raw:?} is not a valid value"))),
            }
        }
        let format = match env("TMELLIN_FORMAT") {
            None => None,
            Some(raw) => Some(
                Format::from_str(raw.trim(), true)
                    .map_err(|_| CliError::usage(format!("TMELLIN_FORMAT={raw:?}: expected json, csv or text")))?,
            ),
        };
        Ok(Layer {
            tol: read(env, "TMELLIN_TOL")?,
            max_nodes: read(env, "TMELLIN_MAX_NODES")?,
            seed: read(env, "TMELLIN_SEED")?,
            format,
            contour_c: read(env, "TMELLIN_CONTOUR_C")?,
            contour_height: read(env, "TMELLIN_CONTOUR_HEIGHT")?,
            contour_steps: read(env, "TMELLIN_CONTOUR_STEPS")?,
        })
    }

    pub fn from_file(path: &Path) -> Result<Layer, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config file {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("bad config file {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliConfig {
    pub tol: f64,
    pub max_nodes: usize,
    pub seed: u64,
    /// `None` lets each command pick its natural format.
    pub format: Option<Format>,
    pub contour: InversionConfig,
}

impl CliConfig {
    pub fn resolve(flags: Layer, env: Layer, file: Layer) -> Result<CliConfig, CliError> {
        let merged = flags.over(env).over(file);
        let tol = merged.tol.unwrap_or(DEFAULT_TOL);
        if !(MIN_TOL..=MAX_TOL).contains(&tol) {
            return Err(CliError::usage(format!("tol must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {tol:e}")));
        }
        let max_nodes = merged.max_nodes.unwrap_or(DEFAULT_MAX_NODES);
        if max_nodes == 0 {
            return Err(CliError::usage("max_nodes must be positive".into()));
        }
        let defaults = InversionConfig::default();
        Ok(CliConfig {
            tol,
            max_nodes,
            seed: merged.seed.unwrap_or(DEFAULT_SEED),
            format: merged.format,
            contour: InversionConfig {
                c: merged.contour_c.unwrap_or(defaults.c),
                height: merged.contour_height.unwrap_or(defaults.height),
                steps: merged.contour_steps.unwrap_or(defaults.steps),
            },
        })
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            tol: self.tol,
            max_nodes: self.max_nodes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(tol: Option<f64>, seed: Option<u64>) -> Layer {
        Layer {
            tol,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn flags_beat_env_beat_file_beat_defaults() {
        let c = CliConfig::resolve(layer(Some(1e-6), None), layer(Some(1e-7), Some(5)), layer(Some(1e-8), Some(9))).unwrap();
        assert_eq!((c.tol, c.seed), (1e-6, 5));
        let c = CliConfig::resolve(Layer::default(), Layer::default(), layer(Some(1e-8), Some(9))).unwrap();
        assert_eq!((c.tol, c.seed), (1e-8, 9));
        let c = CliConfig::resolve(Layer::default(), Layer::default(), Layer::default()).unwrap();
        assert_eq!((c.tol, c.max_nodes, c.seed), (DEFAULT_TOL, DEFAULT_MAX_NODES, DEFAULT_SEED));
        assert_eq!(c.contour, InversionConfig::default());
    }

    #[test]
    fn tol_range_is_enforced() {
        for bad in [1e-14, 0.1, 0.0, -1.0] {
            assert!(CliConfig::resolve(layer(Some(bad), None), Layer::default(), Layer::default()).is_err());
        }
        for ok in [1e-13, 1e-2] {
            assert!(CliConfig::resolve(layer(Some(ok), None), Layer::default(), Layer::default()).is_ok());
        }
    }

    #[test]
    fn env_layer_parses_and_rejects() {
        let env = |k: &str| match k {
            "TMELLIN_TOL" => Some("1e-9".to_string()),
            "TMELLIN_MAX_NODES" => Some("128".to_string()),
            "TMELLIN_FORMAT" => Some("JSON".to_string()),
            _ => None,
        };
        let l = Layer::from_env(&env).unwrap();
        assert_eq!((l.tol, l.max_nodes, l.format), (Some(1e-9), Some(128), Some(Format::Json)));
        let bad = |k: &str| (k == "TMELLIN_SEED").then(|| "abc".to_string());
        assert_eq!(Layer::from_env(&bad).unwrap_err().code, 2);
    }

    #[test]
    fn file_layer_rejects_unknown_keys() {
        let l: Layer = toml::from_str("tol = 1e-9\nformat = \"csv\"\ncontour_steps = 100").unwrap();
        assert_eq!((l.tol, l.format, l.contour_steps), (Some(1e-9), Some(Format::Csv), Some(100)));
        assert!(toml::from_str::<Layer>("tolerance = 1").is_err());
    }
}
