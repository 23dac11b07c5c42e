//! Scenario configuration files.
//!
//! Every key is optional; unknown keys are rejected. See the README for the
//! schema.

use std::path::{Path, PathBuf};

use affinity_lab::algorithms::{HintedElimination, HintedSampler, PointMass, UniformSampler};
use affinity_lab::scenarios::HeuristicConfig;
use affinity_lab::{BitString, EvalMode, LearningResource, SearchAlgorithm, StepWeighting};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Verify,
    GridExample,
    Famine,
    Heuristic,
    Run,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedWeighting {
    Last,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightingSpec {
    Named(NamedWeighting),
    Custom(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ResourceSpec {
    /// Every bit string of the given length.
    AllOfLength(usize),
    List(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmSpec {
    Uniform,
    HintedSampler,
    HintedElimination,
    PointMass(usize),
}

/// Instance counts for `verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySizes {
    pub conservation: usize,
    pub futility: usize,
    pub famine_resources: usize,
    pub famine_distributions: usize,
    pub simplex: usize,
    pub chain: usize,
    pub pinsker: usize,
}

impl Default for VerifySizes {
    fn default() -> Self {
        VerifySizes {
            conservation: 20,
            futility: 20,
            famine_resources: 100,
            famine_distributions: 50,
            simplex: 20,
            chain: 100,
            pinsker: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeuristicSection {
    pub omega: usize,
    pub k: usize,
    pub bits: usize,
    pub train_steps: usize,
    pub recipient_steps: usize,
    pub rhos: Vec<f64>,
    pub trials: u64,
}

impl Default for HeuristicSection {
    fn default() -> Self {
        let d = HeuristicConfig::default();
        HeuristicSection {
            omega: d.omega,
            k: d.k,
            bits: d.bits,
            train_steps: d.train_steps,
            recipient_steps: d.recipient_steps,
            rhos: d.rhos,
            trials: d.trials,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub kind: Option<Kind>,
    pub omega: usize,
    pub k: usize,
    pub steps: usize,
    pub weighting: WeightingSpec,
    /// Learning resources; defaults to every string of `hint_bits` bits.
    pub resources: Option<ResourceSpec>,
    pub hint_bits: usize,
    pub algorithm: AlgorithmSpec,
    pub initial: String,
    /// Target elements for `run`; defaults to `0..k`.
    pub target: Option<Vec<usize>>,
    pub phi_min: f64,
    pub samples: u64,
    pub seed: u64,
    pub mode: Mode,
    pub transfer: bool,
    pub out: Option<PathBuf>,
    pub verify: VerifySizes,
    pub heuristic: HeuristicSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            kind: None,
            omega: 8,
            k: 2,
            steps: 1,
            weighting: WeightingSpec::Named(NamedWeighting::Last),
            resources: None,
            hint_bits: 1,
            algorithm: AlgorithmSpec::HintedElimination,
            initial: String::new(),
            target: None,
            phi_min: 1.0,
            samples: 10_000,
            seed: 42,
            mode: Mode::Exact,
            transfer: false,
            out: None,
            verify: VerifySizes::default(),
            heuristic: HeuristicSection::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self, kind: Kind) -> Result<(), CliError> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(CliError::Usage(format!(
                    "config is for {k:?}, not {kind:?}"
                )));
            }
        }
        if self.omega == 0 || self.k == 0 || self.k > self.omega {
            return Err(CliError::Usage(format!(
                "need 1 ≤ k ≤ omega, got k = {}, omega = {}",
                self.k, self.omega
            )));
        }
        if self.steps == 0 {
            return Err(CliError::Usage("steps must be at least 1".into()));
        }
        if !(self.phi_min > 0.0 && self.phi_min <= 1.0) {
            return Err(CliError::Usage(format!(
                "phi_min must lie in (0, 1], got {}",
                self.phi_min
            )));
        }
        if self.samples == 0 {
            return Err(CliError::Usage("samples must be positive".into()));
        }
        if self.hint_bits > 16 {
            return Err(CliError::Usage("hint_bits must be at most 16".into()));
        }
        Ok(())
    }

    pub fn eval_mode(&self) -> EvalMode {
        match self.mode {
            Mode::Exact => EvalMode::exact(),
            Mode::Mc => EvalMode::MonteCarlo {
                trials: self.samples,
                seed: self.seed,
            },
        }
    }

    pub fn weighting(&self) -> Result<StepWeighting<f64>, CliError> {
        let w = match &self.weighting {
            WeightingSpec::Named(NamedWeighting::Last) => StepWeighting::last_step(self.steps),
            WeightingSpec::Named(NamedWeighting::Uniform) => StepWeighting::uniform(self.steps),
            WeightingSpec::Custom(w) => {
                if w.len() != self.steps {
                    return Err(CliError::Usage(format!(
                        "weighting has {} entries for {} steps",
                        w.len(),
                        self.steps
                    )));
                }
                StepWeighting::new(w.clone())
            }
        };
        w.map_err(CliError::from_core)
    }

    pub fn resources(&self) -> Result<Vec<LearningResource>, CliError> {
        let all = |len: usize| -> Result<Vec<LearningResource>, CliError> {
            if len > 16 {
                return Err(CliError::Usage(
                    "all_of_length is limited to 16 bits".into(),
                ));
            }
            Ok((0..1u64 << len)
                .map(|v| LearningResource::new(BitString::from_uint(v, len)))
                .collect())
        };
        let list = match &self.resources {
            None => all(self.hint_bits)?,
            Some(ResourceSpec::AllOfLength(len)) => all(*len)?,
            Some(ResourceSpec::List(items)) => items
                .iter()
                .map(|s| s.parse().map_err(CliError::from_core))
                .collect::<Result<_, _>>()?,
        };
        if list.is_empty() {
            return Err(CliError::Usage("resource list is empty".into()));
        }
        Ok(list)
    }

    pub fn initial(&self) -> Result<BitString, CliError> {
        self.initial.parse().map_err(CliError::from_core)
    }

    pub fn algorithm(&self) -> Result<Box<dyn SearchAlgorithm<f64>>, CliError> {
        Ok(match self.algorithm {
            AlgorithmSpec::Uniform => Box::new(UniformSampler),
            AlgorithmSpec::HintedSampler => Box::new(HintedSampler::new(self.hint_bits)),
            AlgorithmSpec::HintedElimination => Box::new(HintedElimination::new(self.hint_bits)),
            AlgorithmSpec::PointMass(e) => {
                if e >= self.omega {
                    return Err(CliError::Usage(format!(
                        "point_mass element {e} is outside Ω"
                    )));
                }
                Box::new(PointMass::new(e))
            }
        })
    }

    pub fn heuristic_config(&self) -> HeuristicConfig {
        let h = &self.heuristic;
        HeuristicConfig {
            omega: h.omega,
            k: h.k,
            bits: h.bits,
            train_steps: h.train_steps,
            recipient_steps: h.recipient_steps,
            rhos: h.rhos.clone(),
            trials: h.trials,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let c: ScenarioConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, ScenarioConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"omgea": 4}"#).is_err());
        assert!(
            serde_json::from_str::<ScenarioConfig>(r#"{"verify": {"pinsker": 3, "x": 1}}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"heuristic": {"seed": 3}}"#).is_err());
    }

    #[test]
    fn specs_parse() {
        let c: ScenarioConfig = serde_json::from_str(
            r#"{"kind": "famine", "steps": 2, "weighting": [0.25, 0.75],
                "resources": {"list": ["0", "11"]}, "algorithm": {"point_mass": 3}, "mode": "mc"}"#,
        )
        .unwrap();
        assert_eq!(c.kind, Some(Kind::Famine));
        assert_eq!(c.weighting().unwrap().weights(), &[0.25, 0.75]);
        assert_eq!(c.resources().unwrap().len(), 2);
        assert!(c.algorithm().is_ok());
        assert!(matches!(
            c.eval_mode(),
            EvalMode::MonteCarlo {
                trials: 10_000,
                seed: 42
            }
        ));
        assert!(c.validate(Kind::Verify).is_err());

        let u: ScenarioConfig =
            serde_json::from_str(r#"{"weighting": "uniform", "steps": 4}"#).unwrap();
        assert_eq!(u.weighting().unwrap().weights(), &[0.25; 4]);
    }

    #[test]
    fn default_resources_cover_hint_width() {
        let c = ScenarioConfig {
            hint_bits: 2,
            ..ScenarioConfig::default()
        };
        let r: Vec<String> = c
            .resources()
            .unwrap()
            .iter()
            .map(|l| l.bits.to_string())
            .collect();
        assert_eq!(r, ["00", "01", "10", "11"]);
    }
}
