use std::path::{Path, PathBuf};

use genaug_core::evolve::SearchConfig;
use genaug_core::features::ExtractorSpec;
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_SHORTEST_SIDE: u32 = 600;

fn default_extractor() -> ExtractorSpec {
    ExtractorSpec::BuiltinStats
}

/// Everything a `search` run needs, read from one JSON file.
#[derive(Debug, Clone, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub search: SearchConfig,
    pub synthetic_dir: PathBuf,
    pub real_dir: PathBuf,
    #[serde(default = "default_extractor")]
    pub extractor: ExtractorSpec,
    pub output_dir: PathBuf,
    pub shortest_side: Option<u32>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                CliError::usage(format!("config: {}", e.inner()))
            } else {
                CliError::usage(format!("config field `{path}`: {}", e.inner()))
            }
        })?;
        cfg.search.validate().map_err(CliError::usage)?;
        if cfg.shortest_side == Some(0) {
            return Err(CliError::usage("config field `shortest_side`: must be at least 1"));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use genaug_core::augment::Strategy;

    const MINIMAL: &str = r#"{"synthetic_dir": "s", "real_dir": "r", "output_dir": "o"}"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.search, SearchConfig::default());
        assert_eq!(cfg.extractor, ExtractorSpec::BuiltinStats);
        assert_eq!(cfg.shortest_side, None);
    }

    #[test]
    fn search_fields_and_extractor() {
        let cfg = RunConfig::from_json(
            r#"{"synthetic_dir": "s", "real_dir": "r", "output_dir": "o", "strategy": "oneof_double",
                "population_size": 7, "seed": 11, "extractor": {"variant": "external_model", "model_path": "m.onnx"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.search.strategy, Strategy::OneOfDouble);
        assert_eq!((cfg.search.population_size, cfg.search.seed), (7, 11));
        assert!(matches!(cfg.extractor, ExtractorSpec::ExternalModel { .. }));
    }

    #[test]
    fn missing_field_is_named() {
        let err = RunConfig::from_json(r#"{"synthetic_dir": "s", "output_dir": "o"}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("real_dir"), "{err}");
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let err = RunConfig::from_json(r#"{"synthetic_dir": "s", "real_dir": "r", "output_dir": "o", "mutation_prob": 2}"#)
            .unwrap_err();
        assert!(err.to_string().contains("mutation_prob"), "{err}");
        let err = RunConfig::from_json(r#"{"synthetic_dir": "s", "real_dir": "r", "output_dir": 3}"#).unwrap_err();
        assert!(err.to_string().contains("output_dir"), "{err}");
    }
}
