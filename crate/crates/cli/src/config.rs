//! Run configuration: output format, provider mode, override paths, and the
//! failure policy. One validated `RunConfig` drives a whole invocation.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use licheck_core::corpus::Corpus;
use licheck_core::detector::{ClassifierModel, Detector};
use licheck_core::resolver::{
    CachedProvider, DisabledProvider, FixtureProvider, HttpProvider, MetadataProvider,
};

/// Environment variable overriding where live provider responses are cached.
pub const CACHE_DIR_ENV: &str = "LICHECK_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FailOn {
    /// Exit nonzero when the scan finds violations.
    Violations,
    /// Always exit zero for completed runs (advisory mode).
    Never,
}

/// The validated provider choice.
#[derive(Clone, Debug)]
pub enum ProviderChoice {
    Off,
    Fixtures(PathBuf),
    Live(String),
}

/// Everything a command run needs to know, validated up front.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub project_root: PathBuf,
    pub format: OutputFormat,
    pub provider: ProviderChoice,
    pub model_path: Option<PathBuf>,
    pub matrix_dir: Option<PathBuf>,
    /// Local artifact repository holding jars to inspect. `None` falls back
    /// to the conventional per-user location when that exists.
    pub artifact_cache: Option<PathBuf>,
    pub fail_on: FailOn,
}

impl RunConfig {
    /// Checks every configured path before any work starts.
    pub fn validate(&self) -> Result<()> {
        if let ProviderChoice::Fixtures(dir) = &self.provider {
            if !dir.is_dir() {
                bail!("fixtures directory {} does not exist", dir.display());
            }
        }
        for (label, path) in [
            ("model file", self.model_path.as_deref()),
            ("matrix directory", self.matrix_dir.as_deref()),
            ("cache directory", self.artifact_cache.as_deref()),
        ] {
            if let Some(path) = path {
                if !path.exists() {
                    bail!("{label} {} does not exist", path.display());
                }
            }
        }
        Ok(())
    }

    pub fn load_corpus(&self) -> Result<Corpus> {
        Corpus::load(self.matrix_dir.as_deref()).context("loading license corpus")
    }

    pub fn load_model(&self) -> Result<ClassifierModel> {
        match &self.model_path {
            Some(path) => ClassifierModel::from_path(path)
                .with_context(|| format!("loading model {}", path.display())),
            None => Ok(ClassifierModel::embedded().clone()),
        }
    }

    pub fn build_detector<'c>(&self, corpus: &'c Corpus) -> Result<Detector<'c>> {
        Ok(Detector::new(corpus, self.load_model()?))
    }

    pub fn build_provider(&self) -> Result<Box<dyn MetadataProvider>> {
        Ok(match &self.provider {
            ProviderChoice::Off => Box::new(DisabledProvider),
            ProviderChoice::Fixtures(dir) => Box::new(FixtureProvider::new(dir.clone())),
            ProviderChoice::Live(url) => Box::new(CachedProvider::new(
                HttpProvider::new(url.clone()),
                provider_cache_dir(),
                licheck_core::resolver::provider::DEFAULT_CACHE_TTL,
            )),
        })
    }

    /// The artifact repository to look jars up in: the flag if given, else
    /// `~/.m2/repository` when present, else nothing.
    pub fn artifact_cache_dir(&self) -> Option<PathBuf> {
        if let Some(dir) = &self.artifact_cache {
            return Some(dir.clone());
        }
        let home = std::env::var_os("HOME")?;
        let conventional = Path::new(&home).join(".m2").join("repository");
        conventional.is_dir().then_some(conventional)
    }
}

/// Where live provider responses are cached: the override variable when set,
/// else a per-user cache directory.
fn provider_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
        return PathBuf::from(dir);
    }
    match std::env::var_os("HOME") {
        Some(home) => Path::new(&home).join(".cache").join("licheck").join("provider"),
        None => PathBuf::from(".licheck-provider-cache"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> RunConfig {
        RunConfig {
            project_root: PathBuf::from("."),
            format: OutputFormat::Text,
            provider: ProviderChoice::Off,
            model_path: None,
            matrix_dir: None,
            artifact_cache: None,
            fail_on: FailOn::Violations,
        }
    }

    #[test]
    fn default_configuration_validates() {
        assert!(base_config().validate().is_ok());
    }

    #[test]
    fn missing_fixture_directory_fails_validation() {
        let mut config = base_config();
        config.provider = ProviderChoice::Fixtures(PathBuf::from("/nonexistent/fixtures"));
        assert!(config.validate().is_err());
    }

    #[test]
    fn missing_model_file_fails_validation() {
        let mut config = base_config();
        config.model_path = Some(PathBuf::from("/nonexistent/model.json"));
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("model file"));
    }

    #[test]
    fn flagged_artifact_cache_wins_over_the_default() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = base_config();
        config.artifact_cache = Some(dir.path().to_path_buf());
        assert_eq!(config.artifact_cache_dir().as_deref(), Some(dir.path()));
    }
}
