//! Experiment configuration: a strict TOML schema mirroring the
//! structure of a study run (case, grid, stepper, sweep parameters).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::evolve::StepperConfig;
use crate::madelung::InitialDataCase;
use crate::{Error, Result};

/// Spatial discretization parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_modes: usize,
    /// Periodic domain length; `None` selects the per-case default.
    #[serde(default)]
    pub length: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_modes: 8192,
            length: None,
        }
    }
}

/// The study dispatched by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Evolve,
    Semiclassical,
    CriticalPoint,
    Painleve1,
    Painleve12,
    Match,
    Scaling,
    Blowup,
    NongenericEta,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Evolve => "evolve",
            Study::Semiclassical => "semiclassical",
            Study::CriticalPoint => "critical_point",
            Study::Painleve1 => "painleve1",
            Study::Painleve12 => "painleve12",
            Study::Match => "match",
            Study::Scaling => "scaling",
            Study::Blowup => "blowup",
            Study::NongenericEta => "nongeneric_eta",
        }
    }

    /// Studies that sweep over the ε list.
    pub fn is_sweep(self) -> bool {
        matches!(
            self,
            Study::Evolve
                | Study::Semiclassical
                | Study::Match
                | Study::Scaling
                | Study::Blowup
        )
    }
}

/// Full configuration of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub case: InitialDataCase,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub stepper: StepperConfig,
    #[serde(default)]
    pub epsilon_list: Vec<f64>,
    /// Output / snapshot times; empty means "up to the break-up time".
    #[serde(default)]
    pub times: Vec<f64>,
    pub study: Study,
    pub output_dir: PathBuf,
    /// Free-form note on the compute budget of the configuration.
    #[serde(default)]
    pub budget_note: Option<String>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.case.validate()?;
        if self.study.is_sweep() && self.epsilon_list.is_empty() {
            return Err(Error::Config(format!(
                "study '{}' sweeps over epsilon_list, which is empty",
                self.study.name()
            )));
        }
        for &e in &self.epsilon_list {
            if !(e > 0.0) {
                return Err(Error::Config(format!("epsilon {e} must be positive")));
            }
        }
        if let Some(l) = self.grid.length {
            if !(l > 0.0) {
                return Err(Error::Config(format!("grid length {l} must be positive")));
            }
        }
        Ok(())
    }

    /// Domain length: the configured value or the per-case default.
    pub fn length(&self) -> f64 {
        self.grid.length.unwrap_or_else(|| self.case.default_length())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        study = "scaling"
        output_dir = "/tmp/out"
        epsilon_list = [0.1, 0.05]
        times = [0.5]

        [case]
        name = "quintic_foc_sech"
        a0 = 1.0

        [grid]
        n_modes = 4096
    "#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
        assert_eq!(cfg.study, Study::Scaling);
        assert_eq!(cfg.grid.n_modes, 4096);
        assert_eq!(cfg.case, InitialDataCase::QuinticFocSech { a0: 1.0 });
        assert!((cfg.length() - 40.0 * std::f64::consts::PI).abs() < 1e-12);
        let echoed = cfg.to_toml().unwrap();
        let again = ExperimentConfig::from_toml_str(&echoed).unwrap();
        assert_eq!(again.grid.n_modes, cfg.grid.n_modes);
        assert_eq!(again.study, cfg.study);
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let text = BASE.replace("epsilon_list", "epsilonn_list");
        match ExperimentConfig::from_toml_str(&text) {
            Err(Error::Config(msg)) => {
                assert!(msg.contains("epsilonn_list"), "message: {msg}")
            }
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn sweep_study_requires_epsilons() {
        let text = BASE.replace("epsilon_list = [0.1, 0.05]", "epsilon_list = []");
        assert!(ExperimentConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn non_sweep_study_allows_empty_epsilons() {
        let text = BASE
            .replace("epsilon_list = [0.1, 0.05]", "epsilon_list = []")
            .replace("study = \"scaling\"", "study = \"critical_point\"");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.study, Study::CriticalPoint);
    }

    #[test]
    fn default_stepper_applies() {
        let cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
        assert_eq!(cfg.stepper.n_steps, 10_000);
        assert!((cfg.stepper.krasny_threshold - 1e-12).abs() < 1e-20);
    }
}
