//! Experiment configuration files.
//!
//! Angles are given in degrees and converted to radians here. Complex
//! numbers are `[re, im]` pairs; matrices are arrays of rows of such pairs.
//! Unknown fields are rejected.

use num_complex::Complex64;
use qmeas_core::experiments::{EprBellConfig, WhichWayConfig};
use qmeas_core::Operator;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type ComplexPair = [f64; 2];
pub type MatrixLiteral = Vec<Vec<ComplexPair>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Whichway(WhichwayParams),
    MartensSweep(MartensSweepParams),
    EprBell(EprBellParams),
    ChshPasted(ChshPastedParams),
    Premeasure(PremeasureParams),
    Sample(SampleParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhichwayParams {
    pub theta_deg: f64,
    pub theta_prime_deg: f64,
    pub gamma: f64,
    /// Polarization state vector; horizontal `(1, 0)` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<ComplexPair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartensSweepParams {
    #[serde(default)]
    pub theta_deg: f64,
    #[serde(default = "default_theta_prime")]
    pub theta_prime_deg: f64,
    #[serde(default = "default_points")]
    pub n_points: usize,
}

fn default_theta_prime() -> f64 {
    45.0
}

fn default_points() -> usize {
    101
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmParams {
    pub theta_deg: f64,
    pub theta_prime_deg: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EprBellParams {
    pub arm1: ArmParams,
    pub arm2: ArmParams,
    /// Two-photon state vector; `(|HH⟩ + |VV⟩)/√2` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<ComplexPair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshPastedParams {
    #[serde(default)]
    pub theta1_deg: f64,
    #[serde(default = "default_theta1_prime")]
    pub theta1_prime_deg: f64,
    #[serde(default = "default_theta2")]
    pub theta2_deg: f64,
    #[serde(default = "default_theta2_prime")]
    pub theta2_prime_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<ComplexPair>>,
}

fn default_theta1_prime() -> f64 {
    45.0
}

fn default_theta2() -> f64 {
    22.5
}

fn default_theta2_prime() -> f64 {
    67.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PremeasureParams {
    pub dim_object: usize,
    /// Apparatus density operator `ρ_a`.
    pub apparatus_state: MatrixLiteral,
    /// Joint unitary on object ⊗ apparatus. Exclusive with `hamiltonian`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<MatrixLiteral>,
    /// Interaction Hamiltonian (ħ = 1); requires `time`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    /// Hermitian pointer observable; its spectral PVM is read out.
    pub pointer: MatrixLiteral,
    /// Object density operator for the consistency check; maximally mixed when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_state: Option<MatrixLiteral>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleParams {
    pub arm1: ArmParams,
    pub arm2: ArmParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<ComplexPair>>,
    pub n_samples: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::Whichway(_) => "whichway",
            ExperimentConfig::MartensSweep(_) => "martens-sweep",
            ExperimentConfig::EprBell(_) => "epr-bell",
            ExperimentConfig::ChshPasted(_) => "chsh-pasted",
            ExperimentConfig::Premeasure(_) => "premeasure",
            ExperimentConfig::Sample(_) => "sample",
        }
    }
}

/// Parses and validates a JSON config; errors name the offending field path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::config(".", e.to_string()))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| CliError::config(".", "config must be a JSON object"))?;
    let kind = match object.remove("kind") {
        Some(serde_json::Value::String(k)) => k,
        Some(_) => return Err(CliError::config("kind", "must be a string")),
        None => return Err(CliError::config("kind", "missing field `kind`")),
    };
    // Deserialize the parameters separately so nested errors keep their field path.
    let config = match kind.as_str() {
        "whichway" => ExperimentConfig::Whichway(params(value)?),
        "martens-sweep" => ExperimentConfig::MartensSweep(params(value)?),
        "epr-bell" => ExperimentConfig::EprBell(params(value)?),
        "chsh-pasted" => ExperimentConfig::ChshPasted(params(value)?),
        "premeasure" => ExperimentConfig::Premeasure(params(value)?),
        "sample" => ExperimentConfig::Sample(params(value)?),
        other => {
            return Err(CliError::config(
                "kind",
                format!(
                    "unknown kind `{other}`, expected one of whichway, martens-sweep, epr-bell, \
                     chsh-pasted, premeasure, sample"
                ),
            ))
        }
    };
    validate(&config)?;
    Ok(config)
}

fn params<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(path, e.into_inner().to_string())
    })
}

fn validate(config: &ExperimentConfig) -> Result<(), CliError> {
    match config {
        ExperimentConfig::Whichway(p) => {
            check_finite("theta_deg", p.theta_deg)?;
            check_finite("theta_prime_deg", p.theta_prime_deg)?;
            check_gamma("gamma", p.gamma)?;
            if let Some(v) = &p.state {
                vector("state", v, 2)?;
            }
        }
        ExperimentConfig::MartensSweep(p) => {
            check_finite("theta_deg", p.theta_deg)?;
            check_finite("theta_prime_deg", p.theta_prime_deg)?;
            if p.n_points < 2 {
                return Err(CliError::config("n_points", "must be at least 2"));
            }
        }
        ExperimentConfig::EprBell(p) => {
            check_arm("arm1", &p.arm1)?;
            check_arm("arm2", &p.arm2)?;
            if let Some(v) = &p.state {
                vector("state", v, 4)?;
            }
        }
        ExperimentConfig::ChshPasted(p) => {
            for (name, value) in [
                ("theta1_deg", p.theta1_deg),
                ("theta1_prime_deg", p.theta1_prime_deg),
                ("theta2_deg", p.theta2_deg),
                ("theta2_prime_deg", p.theta2_prime_deg),
            ] {
                check_finite(name, value)?;
            }
            if let Some(v) = &p.state {
                vector("state", v, 4)?;
            }
        }
        ExperimentConfig::Premeasure(p) => validate_premeasure(p)?,
        ExperimentConfig::Sample(p) => {
            check_arm("arm1", &p.arm1)?;
            check_arm("arm2", &p.arm2)?;
            if let Some(v) = &p.state {
                vector("state", v, 4)?;
            }
            if p.n_samples == 0 {
                return Err(CliError::config("n_samples", "must be at least 1"));
            }
        }
    }
    Ok(())
}

fn validate_premeasure(p: &PremeasureParams) -> Result<(), CliError> {
    if p.dim_object == 0 {
        return Err(CliError::config("dim_object", "must be positive"));
    }
    let rho_a = matrix("apparatus_state", &p.apparatus_state)?;
    let joint = p.dim_object * rho_a.dim();
    let pointer = matrix("pointer", &p.pointer)?;
    if pointer.dim() != rho_a.dim() {
        return Err(CliError::config(
            "pointer",
            format!("dimension {} does not match apparatus dimension {}", pointer.dim(), rho_a.dim()),
        ));
    }
    match (&p.unitary, &p.hamiltonian, p.time) {
        (Some(u), None, None) => {
            let u = matrix("unitary", u)?;
            if u.dim() != joint {
                return Err(CliError::config(
                    "unitary",
                    format!("dimension {} does not match object ⊗ apparatus dimension {joint}", u.dim()),
                ));
            }
            let residual = u.unitarity_residual();
            if residual > qmeas_core::DEFAULT_TOL {
                return Err(CliError::config(
                    "unitary",
                    format!("matrix is not unitary (residual {residual:e})"),
                ));
            }
        }
        (None, Some(h), Some(t)) => {
            let h = matrix("hamiltonian", h)?;
            if h.dim() != joint {
                return Err(CliError::config(
                    "hamiltonian",
                    format!("dimension {} does not match object ⊗ apparatus dimension {joint}", h.dim()),
                ));
            }
            check_finite("time", t)?;
        }
        (None, Some(_), None) => return Err(CliError::config("time", "required with `hamiltonian`")),
        (None, None, Some(_)) => return Err(CliError::config("hamiltonian", "required with `time`")),
        (None, None, None) => {
            return Err(CliError::config("unitary", "one of `unitary` or `hamiltonian` + `time` is required"))
        }
        (Some(_), _, _) => {
            return Err(CliError::config("unitary", "`unitary` excludes `hamiltonian` and `time`"))
        }
    }
    if let Some(rho_o) = &p.object_state {
        let rho_o = matrix("object_state", rho_o)?;
        if rho_o.dim() != p.dim_object {
            return Err(CliError::config(
                "object_state",
                format!("dimension {} does not match dim_object {}", rho_o.dim(), p.dim_object),
            ));
        }
    }
    Ok(())
}

fn check_finite(path: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(path, "must be finite"))
    }
}

fn check_gamma(path: &str, gamma: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(CliError::config(path, format!("must lie in [0, 1], got {gamma}")))
    }
}

fn check_arm(prefix: &str, arm: &ArmParams) -> Result<(), CliError> {
    check_finite(&format!("{prefix}.theta_deg"), arm.theta_deg)?;
    check_finite(&format!("{prefix}.theta_prime_deg"), arm.theta_prime_deg)?;
    check_gamma(&format!("{prefix}.gamma"), arm.gamma)
}

/// Converts a vector literal, checking its length.
pub fn vector(path: &str, v: &[ComplexPair], dim: usize) -> Result<Vec<Complex64>, CliError> {
    if v.len() != dim {
        return Err(CliError::config(path, format!("expected {dim} components, got {}", v.len())));
    }
    let out: Vec<Complex64> = v.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    if out.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(CliError::config(path, "state vector must be nonzero"));
    }
    Ok(out)
}

/// Converts a matrix literal to an operator.
pub fn matrix(path: &str, m: &MatrixLiteral) -> Result<Operator, CliError> {
    let rows: Vec<Vec<Complex64>> = m
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    Operator::from_rows(&rows).map_err(|e| CliError::config(path, e.to_string()))
}

pub fn arm_config(arm: &ArmParams) -> WhichWayConfig {
    WhichWayConfig {
        theta: arm.theta_deg.to_radians(),
        theta_prime: arm.theta_prime_deg.to_radians(),
        gamma: arm.gamma,
    }
}

pub fn eprbell_config(arm1: &ArmParams, arm2: &ArmParams) -> EprBellConfig {
    EprBellConfig {
        arm1: arm_config(arm1),
        arm2: arm_config(arm2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_whichway() {
        let c = parse_config(r#"{"kind":"whichway","theta_deg":0,"theta_prime_deg":45,"gamma":0.5}"#).unwrap();
        assert_eq!(
            c,
            ExperimentConfig::Whichway(WhichwayParams {
                theta_deg: 0.0,
                theta_prime_deg: 45.0,
                gamma: 0.5,
                state: None
            })
        );
    }

    #[test]
    fn gamma_out_of_range_names_field() {
        let err = parse_config(r#"{"kind":"whichway","theta_deg":0,"theta_prime_deg":45,"gamma":1.5}"#)
            .unwrap_err();
        match &err {
            CliError::Config { path, .. } => assert_eq!(path, "gamma"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(err.exit_code(), 1);

        let err = parse_config(
            r#"{"kind":"epr-bell","arm1":{"theta_deg":0,"theta_prime_deg":45,"gamma":0.5},
                "arm2":{"theta_deg":0,"theta_prime_deg":45,"gamma":-0.5}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Config { ref path, .. } if path == "arm2.gamma"));
    }

    #[test]
    fn parses_sweep_with_defaults() {
        let c = parse_config(r#"{"kind":"martens-sweep","theta_deg":0,"theta_prime_deg":45,"n_points":101}"#).unwrap();
        let d = parse_config(r#"{"kind":"martens-sweep"}"#).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn rejects_unknown_fields_and_kinds() {
        let err = parse_config(r#"{"kind":"whichway","theta_deg":0,"theta_prime_deg":45,"gama":0.5,"gamma":0.5}"#)
            .unwrap_err();
        assert!(err.to_string().contains("gama"), "{err}");
        let err = parse_config(r#"{"kind":"tomography"}"#).unwrap_err();
        assert!(err.to_string().contains("tomography"), "{err}");
        let err = parse_config(r#"{"kind":"epr-bell","arm1":{"theta_deg":0,"theta_prime_deg":45,"gamma":0.5,"x":1},
            "arm2":{"theta_deg":0,"theta_prime_deg":45,"gamma":0.5}}"#)
            .unwrap_err();
        assert!(matches!(err, CliError::Config { ref path, .. } if path.starts_with("arm1")), "{err}");
        assert!(parse_config("{not json").is_err());
    }

    #[test]
    fn rejects_non_unitary_premeasure() {
        let err = parse_config(
            r#"{"kind":"premeasure","dim_object":1,
                "apparatus_state":[[[1,0],[0,0]],[[0,0],[0,0]]],
                "unitary":[[[1,0],[1,0]],[[0,0],[1,0]]],
                "pointer":[[[1,0],[0,0]],[[0,0],[-1,0]]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Config { ref path, .. } if path == "unitary"), "{err}");
    }

    #[test]
    fn premeasure_requires_exactly_one_dynamics() {
        let base = r#""kind":"premeasure","dim_object":1,
            "apparatus_state":[[[1,0],[0,0]],[[0,0],[0,0]]],
            "pointer":[[[1,0],[0,0]],[[0,0],[-1,0]]]"#;
        assert!(parse_config(&format!("{{{base}}}")).is_err());
        assert!(parse_config(&format!(r#"{{{base},"hamiltonian":[[[1,0],[0,0]],[[0,0],[0,0]]]}}"#)).is_err());
        assert!(parse_config(&format!(r#"{{{base},"hamiltonian":[[[1,0],[0,0]],[[0,0],[0,0]]],"time":1}}"#)).is_ok());
    }
}
