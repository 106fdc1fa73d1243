//! The single self-describing config file. Every run is a pure function of
//! this file (plus explicit flag overrides), which is what makes reruns
//! byte-identical.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use progtherm::automaton::{build_automaton, WrapperAutomaton};
use progtherm::experiments::{all_ordered_pairs, beta_grid, SweepSpec};
use progtherm::jarzynski::Protocol;
use progtherm::machine::{Marker, ProgramTable, Universe, MAX_CORE_LEN, MIN_CORE_LEN};

/// Configuration problems exit with code 2.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub universe: UniverseConfig,
    pub machine: MachineConfig,
    pub ensemble: EnsembleConfig,
    pub protocol: ProtocolConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UniverseConfig {
    pub size: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MachineConfig {
    /// Marker bits, e.g. "011"; must have trivial autocorrelation.
    pub marker: String,
    /// Enumerate cores up to this many bits.
    pub core_bound: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    /// Default excess window above each target's ground length.
    pub excess: u32,
    /// Windows swept by the convergence study.
    pub excess_list: Vec<u32>,
    /// Coupling strength J for force profiles and TI.
    pub coupling: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_points: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    /// Lambda increments; the schedule has steps + 1 points.
    pub steps: u32,
    pub sweeps: u32,
    pub trajectories: u32,
    pub seed: u64,
    /// Inverse temperature of the estimator runs.
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for UniverseConfig {
    fn default() -> Self {
        UniverseConfig {
            size: 4,
            labels: None,
        }
    }
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig {
            marker: "011".into(),
            core_bound: 19,
        }
    }
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            excess: 4,
            excess_list: vec![0, 2, 4, 6, 8],
            coupling: 50.0,
            beta_min: 1e-3,
            beta_max: 50.0,
            beta_points: 25,
        }
    }
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            steps: 64,
            sweeps: 200,
            trajectories: 1000,
            seed: 20240817,
            beta: 1.0,
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let config: Config =
            toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.universe()?;
        self.marker()?;
        if !(MIN_CORE_LEN..=MAX_CORE_LEN).contains(&self.machine.core_bound) {
            return Err(ConfigError(format!(
                "machine.core_bound = {} outside {MIN_CORE_LEN}..={MAX_CORE_LEN}",
                self.machine.core_bound
            )));
        }
        let e = &self.ensemble;
        if e.beta_min <= 0.0 || e.beta_min.is_nan() || e.beta_max <= e.beta_min || e.beta_points < 2
        {
            return Err(ConfigError(
                "ensemble beta grid needs 0 < beta_min < beta_max and at least 2 points".into(),
            ));
        }
        if e.coupling <= 0.0 || !e.coupling.is_finite() {
            return Err(ConfigError(format!(
                "ensemble.coupling = {} must be positive",
                e.coupling
            )));
        }
        if e.excess_list.is_empty() {
            return Err(ConfigError("ensemble.excess_list must not be empty".into()));
        }
        let p = &self.protocol;
        if p.steps == 0 || p.trajectories < 2 || p.beta <= 0.0 || p.beta.is_nan() {
            return Err(ConfigError(
                "protocol needs steps >= 1, trajectories >= 2, beta > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn universe(&self) -> Result<Universe, ConfigError> {
        let u = match &self.universe.labels {
            Some(labels) => Universe::with_labels(self.universe.size, labels.clone()),
            None => Universe::new(self.universe.size),
        };
        u.map_err(|e| ConfigError(format!("universe: {e}")))
    }

    pub fn marker(&self) -> Result<Marker, ConfigError> {
        Marker::parse(&self.machine.marker).map_err(|e| ConfigError(format!("machine.marker: {e}")))
    }

    pub fn build_table(&self) -> Result<(ProgramTable, WrapperAutomaton), ConfigError> {
        let universe = self.universe()?;
        let marker = self.marker()?;
        let aut = build_automaton(&marker);
        let table = ProgramTable::build(&universe, &marker, self.machine.core_bound)
            .map_err(|e| ConfigError(format!("machine: {e}")))?;
        Ok((table, aut))
    }

    pub fn betas(&self) -> Vec<f64> {
        beta_grid(
            self.ensemble.beta_min,
            self.ensemble.beta_max,
            self.ensemble.beta_points,
        )
    }

    pub fn sweep_spec(&self, out_dir: PathBuf) -> SweepSpec {
        SweepSpec {
            pairs: all_ordered_pairs(self.universe.size),
            betas: self.betas(),
            excesses: self.ensemble.excess_list.clone(),
            coupling_strength: self.ensemble.coupling,
            out_dir,
        }
    }

    pub fn protocol(&self, seed: Option<u64>, excess: Option<u32>) -> Protocol {
        Protocol::linear(
            self.protocol.steps,
            self.protocol.sweeps,
            self.protocol.trajectories,
            seed.unwrap_or(self.protocol.seed),
            self.protocol.beta,
            self.ensemble.coupling,
            excess.unwrap_or(self.ensemble.excess),
        )
    }
}
