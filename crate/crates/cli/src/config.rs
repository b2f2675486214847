use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use stvqm::eval::EvalConfig;
use stvqm::fusion::FitConfig;
use stvqm::{Fusion, MetricConfig};

/// Settings read from `--config`; command-line flags take precedence.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub codebook: Option<PathBuf>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub fps: Option<f64>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub metric: MetricConfig,
    pub fusion: Fusion,
    pub fit: FitConfig,
    pub eval: EvalConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.fusion.validate()?;
        Ok(cfg)
    }
}
