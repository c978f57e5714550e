//! Scenario documents: `{"command"?, "seed"?, "field", "parameters"?}`.

use holocenter_core::center::{CenterConfig, DEFAULT_TOL_IMAG};
use holocenter_core::field::{parse_field_value, PolynomialMap};
use holocenter_core::flow::IntegratorConfig;
use holocenter_core::index::IndexConfig;
use holocenter_core::{Error, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const COMMANDS: [&str; 9] =
    ["spectrum", "index", "iterated-index", "disk", "verify", "orbit", "probe", "scan", "selftest"];

#[derive(Debug, Clone)]
pub struct Scenario {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub field: PolynomialMap,
    pub parameters: Value,
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), message: message.into() }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, Error> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| parse_error(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| parse_error("$", "scenario must be a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "command" | "seed" | "field" | "parameters") {
            return Err(parse_error(format!("$.{key}"), "unknown scenario key"));
        }
    }
    let command = match obj.get("command") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(parse_error("$.command", "expected a string")),
    };
    let seed = match obj.get("seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| parse_error("$.seed", "expected a non-negative integer"))?),
    };
    let field = parse_field_value(obj.get("field").ok_or_else(|| parse_error("$.field", "missing field"))?, "$.field")?;
    let parameters = obj.get("parameters").cloned().unwrap_or_else(|| Value::Object(Default::default()));
    if !parameters.is_object() {
        return Err(parse_error("$.parameters", "expected an object"));
    }
    Ok(Scenario { command, seed, field, parameters })
}

/// Deserialize command parameters, reporting the offending path on failure.
pub fn parameters<P: DeserializeOwned>(value: &Value) -> Result<P, Error> {
    serde_path_to_error::deserialize(value.clone()).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "$.parameters".to_string() } else { format!("$.parameters.{path}") };
        parse_error(path, e.into_inner().to_string())
    })
}

fn default_radius() -> f64 {
    0.5
}

fn default_one() -> usize {
    1
}

fn default_tol_imag() -> f64 {
    DEFAULT_TOL_IMAG
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    #[serde(default = "default_tol_imag")]
    pub tol_imag: f64,
    #[serde(default)]
    pub k_max: Option<usize>,
}

/// Which holomorphic map an index or orbit computation works on.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    /// The polynomial itself, read as a map `Cⁿ → Cⁿ`.
    #[default]
    Polynomial,
    /// The time-`tau` map of the flow of the field.
    Time {
        tau: f64,
        #[serde(default)]
        integrator: IntegratorConfig,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    #[default]
    FixedPoint,
    Zero,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexParams {
    #[serde(default)]
    pub quantity: Quantity,
    #[serde(default = "default_one")]
    pub m: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Region center; the origin when absent.
    #[serde(default)]
    pub center: Option<Vec<C64>>,
    #[serde(default)]
    pub map: MapSpec,
    #[serde(default)]
    pub config: IndexConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryParams {
    pub x0: Vec<C64>,
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub integrator: IntegratorConfig,
}

fn default_samples() -> usize {
    201
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitParams {
    #[serde(default = "default_one")]
    pub m: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub center: Option<Vec<C64>>,
    #[serde(default)]
    pub map: MapSpec,
    #[serde(default)]
    pub config: IndexConfig,
    /// Also integrate one flow trajectory and export it as CSV.
    #[serde(default)]
    pub trajectory: Option<TrajectoryParams>,
}

fn default_delta() -> f64 {
    0.05
}

fn default_degree() -> usize {
    6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskParams {
    #[serde(default = "default_tol_imag")]
    pub tol_imag: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub config: CenterConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    #[serde(default = "default_tol_imag")]
    pub tol_imag: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Shortest period of interest; one eighth of the period when absent.
    #[serde(default)]
    pub t0: Option<f64>,
    /// Export one CSV trajectory over a full period per disk sample.
    #[serde(default)]
    pub trajectories: bool,
    #[serde(default = "default_samples")]
    pub trajectory_samples: usize,
    #[serde(default)]
    pub config: CenterConfig,
}

fn default_scales() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeParams {
    /// Taken from the spectrum when absent.
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
    #[serde(default = "default_tol_imag")]
    pub tol_imag: f64,
    #[serde(default)]
    pub config: CenterConfig,
}

fn default_t0() -> f64 {
    1.0
}

fn default_sphere_samples() -> usize {
    64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    #[serde(default = "default_radius")]
    pub rho: f64,
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_sphere_samples")]
    pub samples: usize,
    #[serde(default)]
    pub config: CenterConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIELD: &str = r#"{"n":1,"coords":[[{"re":0,"im":1,"exp":[1]}]]}"#;

    #[test]
    fn minimal_scenario() {
        let s = parse_scenario(&format!(r#"{{"field":{FIELD}}}"#)).unwrap();
        assert_eq!(s.command, None);
        let p: IndexParams = parameters(&s.parameters).unwrap();
        assert_eq!(p.m, 1);
        assert_eq!(p.radius, 0.5);
        assert!(matches!(p.map, MapSpec::Polynomial));
    }

    #[test]
    fn parameter_errors_name_the_path() {
        let s = parse_scenario(&format!(r#"{{"field":{FIELD},"parameters":{{"config":{{"starts_per_dim":-1}}}}}}"#))
            .unwrap();
        let err = parameters::<IndexParams>(&s.parameters).unwrap_err();
        match err {
            Error::Parse { path, .. } => assert_eq!(path, "$.parameters.config.starts_per_dim"),
            other => panic!("{other:?}"),
        }
        let s = parse_scenario(&format!(r#"{{"field":{FIELD},"parameters":{{"radus":1}}}}"#)).unwrap();
        assert!(parameters::<IndexParams>(&s.parameters).is_err());
    }

    #[test]
    fn field_errors_are_prefixed() {
        let err =
            parse_scenario(r#"{"field":{"n":1,"coords":[[{"re":0,"im":1,"exp":[-1]}]]}}"#).unwrap_err();
        match err {
            Error::Parse { path, .. } => assert!(path.starts_with("$.field.coords[0][0].exp"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn time_map_spec() {
        let v: Value = serde_json::from_str(r#"{"map":{"kind":"time","tau":6.283185307179586}}"#).unwrap();
        let p: IndexParams = parameters(&v).unwrap();
        assert!(matches!(p.map, MapSpec::Time { tau, .. } if tau > 6.0));
    }
}
