//! Config ingestion: the top-level envelope and the per-command input schemas.

use std::fmt;

use num_complex::Complex64;
use pellip_core::algebra::{ComplexMatrix, ComplexMatrixField};
use pellip_core::bellman::rigidity::RadialProfile;
use pellip_core::semigroup::{CellLayout, DomainDescriptor, Setup};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Delta,
    Range,
    Certify,
    Flow,
    Bilinear,
    Contract,
    Spectrum,
    Rigidity,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Delta => "delta",
            Command::Range => "range",
            Command::Certify => "certify",
            Command::Flow => "flow",
            Command::Bilinear => "bilinear",
            Command::Contract => "contract",
            Command::Spectrum => "spectrum",
            Command::Rigidity => "rigidity",
        };
        f.write_str(name)
    }
}

/// The config file as written by the user.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default = "empty_inputs")]
    pub inputs: Value,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, alias = "outputPath")]
    pub output_path: Option<String>,
}

fn empty_inputs() -> Value {
    Value::Object(Map::new())
}

/// One matrix: explicit parts, or `r e^{iφ} I` in dimension `d`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    #[serde(default)]
    re: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    d: Option<usize>,
    #[serde(default)]
    polar: Option<[f64; 2]>,
}

impl MatrixSpec {
    pub fn build(&self, field: &str) -> Result<ComplexMatrix, CliError> {
        let bad = |reason: String| CliError::Schema(format!("`{field}`: {reason}"));
        match (&self.re, &self.im, self.d, self.polar) {
            (Some(re), im, None, None) => {
                let zeros;
                let im = match im {
                    Some(im) => im,
                    None => {
                        zeros = re.iter().map(|r| vec![0.0; r.len()]).collect::<Vec<_>>();
                        &zeros
                    }
                };
                ComplexMatrix::from_parts(re, im).map_err(|e| bad(e.to_string()))
            }
            (None, None, Some(d), Some([r, phi])) => {
                if d == 0 {
                    return Err(bad("`d` must be positive".into()));
                }
                Ok(ComplexMatrix::scalar(d, Complex64::from_polar(r, phi)))
            }
            _ => Err(bad("expected either {re, im} or {d, polar}".into())),
        }
    }
}

/// A single matrix or a list of them.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Matrices {
    One(MatrixSpec),
    Many(Vec<MatrixSpec>),
}

impl Matrices {
    pub fn build(&self, field: &str) -> Result<Vec<ComplexMatrix>, CliError> {
        match self {
            Matrices::One(m) => Ok(vec![m.build(field)?]),
            Matrices::Many(ms) => ms
                .iter()
                .enumerate()
                .map(|(k, m)| m.build(&format!("{field}[{k}]")))
                .collect(),
        }
    }

    pub fn field(&self, field: &str) -> Result<ComplexMatrixField, CliError> {
        ComplexMatrixField::new(self.build(field)?).map_err(|e| CliError::Schema(format!("`{field}`: {e}")))
    }
}

fn schema<T: DeserializeOwned>(command: Command, value: Value) -> Result<T, CliError> {
    serde_json::from_value(value).map_err(|e| CliError::Schema(format!("inputs for `{command}`: {e}")))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaInput {
    #[serde(alias = "A")]
    pub a: Matrices,
    pub p: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeInput {
    #[serde(alias = "A")]
    pub a: Matrices,
    /// When given, the analyticity angle at this exponent is reported too.
    #[serde(default)]
    pub p: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertifyTarget {
    /// The Bellman function; `delta` is calibrated when absent.
    Bellman {
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default = "calibration_samples")]
        calibration_samples: usize,
    },
    /// The smooth approximant at one `(n, ν)`; `c1` is calibrated when absent.
    Approximant {
        n: u32,
        nu: f64,
        #[serde(default = "radius_points")]
        radius_points: usize,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        c1: Option<f64>,
        #[serde(default = "calibration_samples")]
        calibration_samples: usize,
    },
    /// The power mix `F_p` used outside the compact region.
    PMix,
}

fn calibration_samples() -> usize {
    5000
}
fn radius_points() -> usize {
    8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyInput {
    pub target: CertifyTarget,
    #[serde(alias = "A")]
    pub a: MatrixSpec,
    #[serde(alias = "B")]
    pub b: MatrixSpec,
    pub p: f64,
    #[serde(default = "certify_samples")]
    pub samples: usize,
}

fn certify_samples() -> usize {
    10_000
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumInput {
    pub p: f64,
    #[serde(default = "unit")]
    pub alpha: f64,
    /// A single ordinate; otherwise a symmetric sweep over `[-y_max, y_max]`.
    #[serde(default)]
    pub y: Option<f64>,
    #[serde(default = "y_max")]
    pub y_max: f64,
    #[serde(default = "spectrum_count")]
    pub count: usize,
}

fn unit() -> f64 {
    1.0
}
fn y_max() -> f64 {
    10.0
}
fn spectrum_count() -> usize {
    201
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidityInput {
    #[serde(alias = "A")]
    pub a: MatrixSpec,
    pub profile: RadialProfile,
    #[serde(default = "certify_samples")]
    pub samples: usize,
}

const SETUP_KEYS: [&str; 6] = ["domain", "layout", "A", "B", "a", "b"];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetupFields {
    domain: DomainDescriptor,
    #[serde(default = "constant_layout")]
    layout: CellLayout,
    #[serde(alias = "A")]
    a: Matrices,
    #[serde(default, alias = "B")]
    b: Option<Matrices>,
}

fn constant_layout() -> CellLayout {
    CellLayout::Constant
}

/// Splits `inputs` into the setup keys and the experiment parameters `T`.
pub fn setup_and<T: DeserializeOwned>(command: Command, inputs: Value) -> Result<(Setup, T), CliError> {
    let Value::Object(mut rest) = inputs else {
        return Err(CliError::Schema(format!("inputs for `{command}`: expected an object")));
    };
    let mut head = Map::new();
    for key in SETUP_KEYS {
        if let Some(v) = rest.remove(key) {
            head.insert(key.to_string(), v);
        }
    }
    let fields: SetupFields = schema(command, Value::Object(head))?;
    let params: T = schema(command, Value::Object(rest))?;
    let a = fields.a.build("A")?;
    let mut setup = Setup::new(fields.domain, fields.layout, a);
    if let Some(b) = fields.b {
        setup = setup.with_b(b.build("B")?);
    }
    Ok((setup, params))
}

pub fn inputs<T: DeserializeOwned>(command: Command, inputs: Value) -> Result<T, CliError> {
    schema(command, inputs)
}
