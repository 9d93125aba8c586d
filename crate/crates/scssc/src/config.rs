//! JSON run configuration and per-scene presets.

use std::fs;
use std::path::Path;

use scssc_core::pipeline::{PipelineParams, Toggles};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToggleConfig {
    pub use_pca: bool,
    pub use_superpixels: bool,
    pub use_smoothing: bool,
}

impl Default for ToggleConfig {
    fn default() -> Self {
        let t = Toggles::default();
        Self {
            use_pca: t.use_pca,
            use_superpixels: t.use_superpixels,
            use_smoothing: t.use_smoothing,
        }
    }
}

/// Pipeline parameters as read from JSON; omitted keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub tau: f64,
    pub rho: f64,
    pub segments: usize,
    pub kernel_size: usize,
    pub clusters: usize,
    pub pca_fraction: f64,
    pub seed: u64,
    pub restarts: usize,
    pub compactness: f64,
    pub lasso_tol: f64,
    pub exclude_self: bool,
    pub normalize_embedding_rows: bool,
    /// Reference label treated as unlabeled when scoring.
    pub ignore_label: u32,
    pub toggles: ToggleConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self::from_params(&PipelineParams::new(0.3, 100, 3, 2))
    }
}

impl Config {
    pub fn from_params(p: &PipelineParams) -> Self {
        Self {
            tau: p.tau,
            rho: p.rho,
            segments: p.segments,
            kernel_size: p.kernel_size,
            clusters: p.clusters,
            pca_fraction: p.pca_fraction,
            seed: p.seed,
            restarts: p.restarts,
            compactness: p.compactness,
            lasso_tol: p.lasso_tol,
            exclude_self: p.exclude_self,
            normalize_embedding_rows: p.normalize_embedding_rows,
            ignore_label: 0,
            toggles: ToggleConfig {
                use_pca: p.toggles.use_pca,
                use_superpixels: p.toggles.use_superpixels,
                use_smoothing: p.toggles.use_smoothing,
            },
        }
    }

    pub fn params(&self) -> PipelineParams {
        let mut p = PipelineParams::new(self.rho, self.segments, self.kernel_size, self.clusters);
        p.tau = self.tau;
        p.pca_fraction = self.pca_fraction;
        p.seed = self.seed;
        p.restarts = self.restarts;
        p.compactness = self.compactness;
        p.lasso_tol = self.lasso_tol;
        p.exclude_self = self.exclude_self;
        p.normalize_embedding_rows = self.normalize_embedding_rows;
        p.toggles = Toggles {
            use_pca: self.toggles.use_pca,
            use_superpixels: self.toggles.use_superpixels,
            use_smoothing: self.toggles.use_smoothing,
        };
        p
    }

    /// Parses JSON and checks every range constraint.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.params()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::format(path, m),
            e => e,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Scene presets: name, (ρ, E, K_s, k).
pub const PRESETS: [(&str, f64, usize, usize, usize); 3] = [
    ("indian-pines-roi", 0.35, 1700, 8, 4),
    ("salinas-roi", 0.2, 700, 3, 6),
    ("pavia-roi", 0.3, 1900, 8, 9),
];

pub fn preset(name: &str) -> Result<Config> {
    let &(_, rho, segments, kernel_size, clusters) =
        PRESETS.iter().find(|p| p.0 == name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            Error::Config(format!(
                "unknown preset `{name}` (known: {})",
                names.join(", ")
            ))
        })?;
    Ok(Config::from_params(&PipelineParams::new(
        rho,
        segments,
        kernel_size,
        clusters,
    )))
}
