use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use qii_core::collapse::{BasisKind, CouplingSpec, HamiltonianSpec, IntegratorConfig, LindbladBasis};
use qii_core::densemat::ComplexMatrix;
use qii_core::{StateSpec, Strategy};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Qii,
    Profile,
    Evolve,
    Race,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory results are written into.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Either a bare kind (`"gell_mann"`) or `{kind, operators}` for custom bases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisConfig {
    Named(BasisKind),
    Full {
        kind: BasisKind,
        #[serde(default)]
        operators: Vec<OperatorJson>,
    },
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig::Named(BasisKind::default())
    }
}

impl BasisConfig {
    pub fn build(&self, dim: usize) -> qii_core::Result<LindbladBasis> {
        match self {
            BasisConfig::Named(BasisKind::Custom) => Err(qii_core::Error::Argument(
                "a custom basis needs an operator list".into(),
            )),
            BasisConfig::Named(kind) => LindbladBasis::of_kind(*kind, dim),
            BasisConfig::Full { kind: BasisKind::Custom, operators } => {
                let ops = operators
                    .iter()
                    .map(|o| ComplexMatrix::from_parts(&o.re, &o.im))
                    .collect::<Result<Vec<_>, _>>()?;
                LindbladBasis::custom(ops)
            }
            BasisConfig::Full { kind, operators } => {
                if !operators.is_empty() {
                    return Err(qii_core::Error::Argument(
                        "operators are only accepted with kind \"custom\"".into(),
                    ));
                }
                LindbladBasis::of_kind(*kind, dim)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub state: Option<StateSpec>,
    #[serde(default)]
    pub states: Vec<StateSpec>,
    /// Partition search used by `qii`.
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    #[serde(default)]
    pub basis: BasisConfig,
    #[serde(default)]
    pub coupling: CouplingSpec,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    /// Fidelity reference for `evolve`.
    #[serde(default)]
    pub reference: Option<StateSpec>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    /// `state` followed by `states`.
    pub fn all_states(&self) -> Vec<StateSpec> {
        self.state.iter().chain(&self.states).cloned().collect()
    }
}

/// Parses the document, applies `key=value` overrides, then deserializes.
pub fn load(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    serde_json::from_value(doc).map_err(|e| CliError::Config(format!("config: {e}")))
}

/// `a.b.0.c=value`; the value is read as JSON, falling back to a string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {assignment:?} is not key=value")))?;
    if path.is_empty() {
        return Err(CliError::Config("override with an empty key".into()));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cursor = doc;
    for key in path.split('.') {
        cursor = match cursor {
            Value::Array(items) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| CliError::Config(format!("override {path}: {key:?} is not an array index")))?;
                items
                    .get_mut(idx)
                    .ok_or_else(|| CliError::Config(format!("override {path}: index {idx} out of range")))?
            }
            other => {
                if other.is_null() {
                    *other = Value::Object(Default::default());
                }
                let Value::Object(map) = other else {
                    return Err(CliError::Config(format!("override {path}: {key:?} is not inside an object")));
                };
                map.entry(key.to_string()).or_insert(Value::Null)
            }
        };
    }
    *cursor = value;
    Ok(())
}
