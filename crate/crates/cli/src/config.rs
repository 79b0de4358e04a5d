//! Run configuration: built-in defaults, overridden by a config file,
//! overridden by command-line flags.
//!
//! The config file is `key: value` lines with `#` comments and a mandatory
//! `schema_version: 1`. The `REPROFORGE_CONFIG` environment variable names a
//! config file to use when `--config` is not given.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use reproforge_core::matcher::Hyperparams;

/// Which matching policy to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Rl,
    Greedy,
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Rl => "rl",
            Policy::Greedy => "greedy",
        }
    }

    pub fn parse(s: &str) -> Result<Policy> {
        match s {
            "rl" => Ok(Policy::Rl),
            "greedy" => Ok(Policy::Greedy),
            other => bail!("unknown policy {other:?} (expected rl or greedy)"),
        }
    }
}

/// How the report file is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    /// One plain-text sentence per line.
    Text,
    /// Bracketed trees separated by blank lines.
    Trees,
}

impl InputMode {
    pub fn parse(s: &str) -> Result<InputMode> {
        match s {
            "text" => Ok(InputMode::Text),
            "trees" => Ok(InputMode::Trees),
            other => bail!("unknown input mode {other:?} (expected text or trees)"),
        }
    }
}

/// Fully resolved configuration for one command invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub report_path: Option<PathBuf>,
    pub app_model_path: Option<PathBuf>,
    pub embeddings_path: Option<PathBuf>,
    pub connectives_path: Option<PathBuf>,
    pub actions_path: Option<PathBuf>,
    pub specials_path: Option<PathBuf>,
    pub crash_message: Option<String>,
    pub out_path: Option<PathBuf>,
    pub input_mode: InputMode,
    pub policy: Policy,
    pub hyper: Hyperparams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            report_path: None,
            app_model_path: None,
            embeddings_path: None,
            connectives_path: None,
            actions_path: None,
            specials_path: None,
            crash_message: None,
            out_path: None,
            input_mode: InputMode::Text,
            policy: Policy::Rl,
            hyper: Hyperparams::default(),
        }
    }
}

impl RunConfig {
    /// Apply `key: value` pairs from a config file.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut saw_version = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .with_context(|| format!("config line {}: expected `key: value`", idx + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "schema_version" {
                if value != "1" {
                    bail!("config {}: unsupported schema_version {value}", path.display());
                }
                saw_version = true;
                continue;
            }
            self.apply_key(key, value)
                .with_context(|| format!("config line {}", idx + 1))?;
        }
        if !saw_version {
            bail!("config {} is missing `schema_version: 1`", path.display());
        }
        Ok(())
    }

    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "report" => self.report_path = Some(value.into()),
            "app_model" => self.app_model_path = Some(value.into()),
            "embeddings" => self.embeddings_path = Some(value.into()),
            "connectives" => self.connectives_path = Some(value.into()),
            "actions" => self.actions_path = Some(value.into()),
            "specials" => self.specials_path = Some(value.into()),
            "crash_message" => self.crash_message = Some(value.to_string()),
            "out" => self.out_path = Some(value.into()),
            "input" => self.input_mode = InputMode::parse(value)?,
            "policy" => self.policy = Policy::parse(value)?,
            "seed" => self.hyper.seed = value.parse().context("seed must be an integer")?,
            "noop_budget" => {
                self.hyper.n0 = value.parse().context("noop_budget must be an integer")?
            }
            "episodes" => {
                self.hyper.episode_budget =
                    value.parse().context("episodes must be an integer")?
            }
            "step_budget" => {
                self.hyper.step_budget =
                    Some(value.parse().context("step_budget must be an integer")?)
            }
            "alpha" => self.hyper.alpha = value.parse().context("alpha must be a number")?,
            "gamma" => self.hyper.gamma = value.parse().context("gamma must be a number")?,
            "epsilon" => self.hyper.epsilon = value.parse().context("epsilon must be a number")?,
            "delta" => self.hyper.delta = value.parse().context("delta must be a number")?,
            "d" => self.hyper.d = value.parse().context("d must be a number")?,
            "r_d" => self.hyper.r_d = value.parse().context("r_d must be a number")?,
            "r_e" => self.hyper.r_e = value.parse().context("r_e must be a number")?,
            "r_f" => self.hyper.r_f = value.parse().context("r_f must be a number")?,
            "default_input" => self.hyper.default_input = value.to_string(),
            "timeout_secs" => {
                self.hyper.wall_clock_timeout = Some(Duration::from_secs(
                    value.parse().context("timeout_secs must be an integer")?,
                ))
            }
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    pub fn require_report(&self) -> Result<&Path> {
        self.report_path
            .as_deref()
            .context("a report file is required (--report)")
    }

    pub fn require_app_model(&self) -> Result<&Path> {
        self.app_model_path
            .as_deref()
            .context("an app model file is required (--app-model)")
    }

    pub fn require_crash_message(&self) -> Result<&str> {
        self.crash_message
            .as_deref()
            .context("a crash message is required (--crash-message)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_overrides_defaults() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            file,
            "schema_version: 1\nseed: 9\npolicy: greedy\nnoop_budget: 5\ncrash_message: Boom"
        )
        .unwrap();
        let mut config = RunConfig::default();
        config.apply_file(file.path()).unwrap();
        assert_eq!(config.hyper.seed, 9);
        assert_eq!(config.policy, Policy::Greedy);
        assert_eq!(config.hyper.n0, 5);
        assert_eq!(config.crash_message.as_deref(), Some("Boom"));
    }

    #[test]
    fn missing_schema_version_is_an_error() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "seed: 9").unwrap();
        let mut config = RunConfig::default();
        assert!(config.apply_file(file.path()).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut config = RunConfig::default();
        assert!(config.apply_key("zorble", "1").is_err());
    }
}
