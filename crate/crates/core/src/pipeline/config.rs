use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::captioner::DecoratorConfig;
use crate::manipulator::{CategorySelection, Quotas};

/// The single configuration document of a run. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub global_seed: u64,
    pub profile_path: PathBuf,
    pub input_glob: String,
    #[serde(default)]
    pub quotas: Quotas,
    #[serde(default)]
    pub categories: CategorySelection,
    /// Falls back to the built-in template table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates_path: Option<PathBuf>,
    #[serde(default)]
    pub decorator: DecoratorConfig,
    pub output_dir: PathBuf,
}

/// Command-line values that win over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn read(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_against(base);
        Ok(config)
    }

    /// Makes relative paths relative to `base`.
    pub fn resolve_against(&mut self, base: &Path) {
        let join = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        self.profile_path = join(&self.profile_path);
        self.output_dir = join(&self.output_dir);
        if let Some(t) = &self.templates_path {
            self.templates_path = Some(join(t));
        }
        if !Path::new(&self.input_glob).is_absolute() {
            self.input_glob = base.join(&self.input_glob).to_string_lossy().into_owned();
        }
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.global_seed = seed;
        }
        if let Some(out) = &overrides.output_dir {
            self.output_dir = out.clone();
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.input_glob.trim().is_empty() {
            return Err(PipelineError::Config("input_glob is empty".into()));
        }
        self.decorator.validate().map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// SHA-256 over everything that determines the outputs. The output directory is left out
    /// so that the same run written to two places has one digest.
    pub fn digest(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
        }
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}
