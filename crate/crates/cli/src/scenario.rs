//! Scenario files: JSON schema and compilation into library types.
//!
//! A scenario file holds either a single scenario object or an array of them
//! (batch mode). Numbers are decimal, angles in radians. Unknown keys are
//! rejected so typos surface as input errors.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Deserialize;
use std::str::FromStr;

use spinlie::fields::{FieldSpec, Program};
use spinlie::grid::TimeGrid;
use spinlie::integrability::GammaChoice;
use spinlie::spinrep::SpinQuantumNumber;

/// Errors in the scenario file itself; always exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "scenario error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioInput {
    spin: SpinInput,
    field: FieldInput,
    grid: GridInput,
    #[serde(default)]
    gamma: GammaInput,
    #[serde(default)]
    tolerances: TolerancesInput,
    #[serde(default)]
    initial_state: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    outputs: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpinInput {
    TwoJ(u32),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FieldInput {
    Preset { preset: String },
    Spec(FieldSpecInput),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum FieldSpecInput {
    Constant {
        bx: f64,
        by: f64,
        bz: f64,
    },
    Rotating {
        b: f64,
        theta: f64,
        omega: f64,
        #[serde(default)]
        phi0: f64,
    },
    Polar {
        b: ProgramInput,
        theta: ProgramInput,
        phi: ProgramInput,
    },
    CartesianTable {
        times: Vec<f64>,
        bx: Vec<f64>,
        by: Vec<f64>,
        bz: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProgramInput {
    Const {
        value: f64,
    },
    Linear {
        v0: f64,
        slope: f64,
    },
    Sinusoid {
        amp: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    Table {
        times: Vec<f64>,
        values: Vec<f64>,
    },
    Sum {
        terms: Vec<ProgramInput>,
    },
}

impl ProgramInput {
    fn compile(self) -> Program {
        match self {
            ProgramInput::Const { value } => Program::Const { value },
            ProgramInput::Linear { v0, slope } => Program::Linear { v0, slope },
            ProgramInput::Sinusoid {
                amp,
                freq,
                phase,
                offset,
            } => Program::Sinusoid {
                amp,
                freq,
                phase,
                offset,
            },
            ProgramInput::Table { times, values } => Program::Table { times, values },
            ProgramInput::Sum { terms } => {
                Program::Sum(terms.into_iter().map(ProgramInput::compile).collect())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridInput {
    t0: f64,
    t1: f64,
    steps: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GammaInput {
    Keyword(String),
    Value(f64),
}

impl Default for GammaInput {
    fn default() -> Self {
        GammaInput::Keyword("auto".into())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TolerancesInput {
    #[serde(default)]
    residual: Option<f64>,
    #[serde(default)]
    fidelity: Option<f64>,
}

/// Artifact kinds a command can write.
pub const KNOWN_OUTPUTS: &[&str] = &["report", "result", "csv", "metrics"];

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spin: SpinQuantumNumber,
    pub field: FieldSpec,
    pub grid: TimeGrid,
    pub gamma: GammaChoice,
    pub residual_tolerance: Option<f64>,
    pub fidelity_tolerance: f64,
    pub initial_state: Option<DVector<Complex64>>,
    /// `None` means every artifact the command produces.
    pub outputs: Option<Vec<String>>,
}

/// Default fidelity bound for `compare`.
pub const DEFAULT_FIDELITY_TOL: f64 = 1e-6;

impl ScenarioInput {
    pub fn compile(self) -> Result<Scenario, ConfigError> {
        let spin = match self.spin {
            SpinInput::TwoJ(two_j) => SpinQuantumNumber::new(two_j)
                .map_err(|e| ConfigError(format!("spin: {e}")))?,
            SpinInput::Text(s) => SpinQuantumNumber::from_str(&s)
                .map_err(|e| ConfigError(format!("spin: {e}")))?,
        };

        let field = match self.field {
            FieldInput::Preset { preset } => match preset.as_str() {
                "rotating-example" => FieldSpec::rotating_example(),
                other => return bad(format!("unknown field preset {other:?}")),
            },
            FieldInput::Spec(spec) => match spec {
                FieldSpecInput::Constant { bx, by, bz } => FieldSpec::Constant { bx, by, bz },
                FieldSpecInput::Rotating {
                    b,
                    theta,
                    omega,
                    phi0,
                } => FieldSpec::Rotating {
                    b,
                    theta,
                    omega,
                    phi0,
                },
                FieldSpecInput::Polar { b, theta, phi } => FieldSpec::Polar {
                    b: b.compile(),
                    theta: theta.compile(),
                    phi: phi.compile(),
                },
                FieldSpecInput::CartesianTable { times, bx, by, bz } => {
                    FieldSpec::CartesianTable { times, bx, by, bz }
                }
            },
        };
        field
            .validate()
            .map_err(|e| ConfigError(format!("field: {e}")))?;

        let grid = TimeGrid::new(self.grid.t0, self.grid.t1, self.grid.steps)
            .map_err(|e| ConfigError(format!("grid: {e}")))?;

        let gamma = match self.gamma {
            GammaInput::Keyword(k) if k == "auto" => GammaChoice::Auto,
            GammaInput::Keyword(k) => return bad(format!("gamma must be \"auto\" or a number, got {k:?}")),
            GammaInput::Value(v) => GammaChoice::Fixed(v),
        };

        if let Some(t) = self.tolerances.residual {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("tolerances.residual must be positive, got {t}"));
            }
        }
        let fidelity_tolerance = match self.tolerances.fidelity {
            None => DEFAULT_FIDELITY_TOL,
            Some(t) if t.is_finite() && t > 0.0 => t,
            Some(t) => return bad(format!("tolerances.fidelity must be positive, got {t}")),
        };

        let initial_state = match self.initial_state {
            None => None,
            Some(entries) => {
                if entries.len() != spin.dimension() {
                    return bad(format!(
                        "initial_state has {} components, spin {} needs {}",
                        entries.len(),
                        spin,
                        spin.dimension()
                    ));
                }
                let v = DVector::from_vec(
                    entries
                        .iter()
                        .map(|[re, im]| Complex64::new(*re, *im))
                        .collect(),
                );
                let n = v.norm();
                if (n - 1.0).abs() > 1e-9 {
                    return bad(format!("initial_state norm {n} is not 1 (within 1e-9)"));
                }
                Some(v)
            }
        };

        if let Some(outputs) = &self.outputs {
            for o in outputs {
                if !KNOWN_OUTPUTS.contains(&o.as_str()) {
                    return bad(format!(
                        "unknown output {o:?}; known: {}",
                        KNOWN_OUTPUTS.join(", ")
                    ));
                }
            }
        }

        Ok(Scenario {
            spin,
            field,
            grid,
            gamma,
            residual_tolerance: self.tolerances.residual,
            fidelity_tolerance,
            initial_state,
            outputs: self.outputs,
        })
    }
}

impl Scenario {
    /// The initial state: the given one, or the first basis vector.
    pub fn initial_state(&self) -> DVector<Complex64> {
        match &self.initial_state {
            Some(v) => v.clone(),
            None => {
                let mut v =
                    DVector::from_element(self.spin.dimension(), Complex64::new(0.0, 0.0));
                v[0] = Complex64::new(1.0, 0.0);
                v
            }
        }
    }

    /// Whether the named artifact should be written.
    pub fn wants(&self, artifact: &str) -> bool {
        match &self.outputs {
            None => true,
            Some(list) => list.iter().any(|o| o == artifact),
        }
    }
}

/// Parses a scenario file: one scenario object or an array of them.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid JSON: {e}")))?;
    let inputs: Vec<ScenarioInput> = if value.is_array() {
        serde_json::from_value(value).map_err(|e| ConfigError(e.to_string()))?
    } else {
        vec![serde_json::from_value(value).map_err(|e| ConfigError(e.to_string()))?]
    };
    if inputs.is_empty() {
        return bad("scenario file holds an empty array");
    }
    inputs.into_iter().map(ScenarioInput::compile).collect()
}
