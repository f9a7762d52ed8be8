//! Dispatch from a parsed config to the experiment and its result table.

use num_complex::Complex64;
use qmeas_core::experiments::{
    chsh_pasted_aspect, chsh_single_setup, eprbell_povm, martens_sweep, quadruple_sample_check,
    whichway_nonideality, whichway_povm, ChshResult, WhichWayConfig, CHSH_TOL,
};
use qmeas_core::nonideality::{check_martens, MARTENS_SLACK_TOL};
use qmeas_core::povm::QuadrivariatePovm;
use qmeas_core::premeasurement::{induced_povm, pointer_consistency, PremeasurementModel};
use qmeas_core::state::{entangled_pair_state, polarization_pvm, pure_state, spectral_pvm, DensityOperator};
use serde_json::Value;

use crate::config::{self, ComplexPair, ExperimentConfig, PremeasureParams};
use crate::error::CliError;
use crate::table::ResultTable;

/// Residual below which induced and pointer statistics are considered equal.
pub const CONSISTENCY_TOL: f64 = 1e-9;
/// Sample sizes from which the total-variation bound is asserted.
pub const TV_ASSERT_MIN_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Replaces the slack/residual tolerance of every asserted check.
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: ResultTable,
    pub checks: Vec<CheckResult>,
}

impl RunOutput {
    pub fn failed_checks(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect()
    }
}

pub fn run(config: &ExperimentConfig, options: RunOptions) -> Result<RunOutput, CliError> {
    let (mut table, checks) = match config {
        ExperimentConfig::Whichway(p) => {
            let c = WhichWayConfig::new(p.theta_deg.to_radians(), p.theta_prime_deg.to_radians(), p.gamma)?;
            let rho = state_or(p.state.as_deref(), || {
                pure_state(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            })?;
            run_whichway(&c, &rho, options.tol.unwrap_or(MARTENS_SLACK_TOL))?
        }
        ExperimentConfig::MartensSweep(p) => run_sweep(
            p.theta_deg.to_radians(),
            p.theta_prime_deg.to_radians(),
            p.n_points,
            options.tol.unwrap_or(MARTENS_SLACK_TOL),
        )?,
        ExperimentConfig::EprBell(p) => {
            let c = config::eprbell_config(&p.arm1, &p.arm2);
            let rho = state_or(p.state.as_deref(), || Ok(entangled_pair_state()))?;
            run_eprbell(&c, &rho, options.tol.unwrap_or(CHSH_TOL))?
        }
        ExperimentConfig::ChshPasted(p) => {
            let rho = state_or(p.state.as_deref(), || Ok(entangled_pair_state()))?;
            let result = chsh_pasted_aspect(
                &rho,
                p.theta1_deg.to_radians(),
                p.theta1_prime_deg.to_radians(),
                p.theta2_deg.to_radians(),
                p.theta2_prime_deg.to_radians(),
            )?;
            let mut table = ResultTable::new(&CHSH_COLUMNS);
            table.push(chsh_row(&result));
            (table, Vec::new())
        }
        ExperimentConfig::Premeasure(p) => run_premeasure(p, options.tol.unwrap_or(CONSISTENCY_TOL))?,
        ExperimentConfig::Sample(p) => {
            let c = config::eprbell_config(&p.arm1, &p.arm2);
            let rho = state_or(p.state.as_deref(), || Ok(entangled_pair_state()))?;
            run_sample(&c, &rho, p.n_samples, p.seed)?
        }
    };
    table.set_metadata("kind", Value::from(config.kind()));
    table.set_metadata(
        "config",
        serde_json::to_value(config).expect("config serializes"),
    );
    table.set_metadata("version", Value::from(env!("CARGO_PKG_VERSION")));
    table.set_metadata("timestamp", timestamp());
    Ok(RunOutput { table, checks })
}

/// `SOURCE_DATE_EPOCH` when set, otherwise null, so output bytes depend only on the config.
fn timestamp() -> Value {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .map(Value::from)
        .unwrap_or(Value::Null)
}

fn state_or(
    vector: Option<&[ComplexPair]>,
    default: impl FnOnce() -> qmeas_core::Result<DensityOperator>,
) -> Result<DensityOperator, CliError> {
    match vector {
        Some(v) => {
            let v: Vec<Complex64> = v.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            Ok(pure_state(&v)?)
        }
        None => Ok(default()?),
    }
}

fn sign_label(outcome: usize) -> &'static str {
    if outcome == 0 {
        "+"
    } else {
        "-"
    }
}

fn run_whichway(
    c: &WhichWayConfig,
    rho: &DensityOperator,
    tol: f64,
) -> Result<(ResultTable, Vec<CheckResult>), CliError> {
    if rho.dim() != 2 {
        return Err(CliError::config("state", format!("expected 2 components, got {}", rho.dim())));
    }
    let grid = whichway_povm(c)?;
    let dist = grid.distribution(rho)?;
    let (lambda, mu) = whichway_nonideality(c)?;
    let mut table = ResultTable::new(&["m", "n", "probability", "lambda", "mu"]);
    for m in 0..2 {
        for n in 0..2 {
            table.push(vec![m as f64, n as f64, dist.get(&[m, n]), lambda.get(m, n), mu.get(m, n)]);
        }
    }
    let report = check_martens(&grid, &polarization_pvm(c.theta), &polarization_pvm(c.theta_prime))?;
    let check = CheckResult {
        name: "martens".into(),
        passed: report.slack >= -tol,
        detail: format!("J_lambda + J_mu = {} vs bound {} (slack {:e})", report.lhs, report.rhs, report.slack),
    };
    Ok((table, vec![check]))
}

fn run_sweep(
    theta: f64,
    theta_prime: f64,
    n_points: usize,
    tol: f64,
) -> Result<(ResultTable, Vec<CheckResult>), CliError> {
    let rows = martens_sweep(theta, theta_prime, n_points)?;
    let mut table = ResultTable::new(&["gamma", "J_lambda", "J_mu", "bound", "slack"]);
    for r in &rows {
        table.push(vec![r.gamma, r.j_lambda, r.j_mu, r.bound, r.slack]);
    }
    let worst = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let check = CheckResult {
        name: "martens".into(),
        passed: worst >= -tol,
        detail: format!("minimum slack {worst:e} over {n_points} points"),
    };
    Ok((table, vec![check]))
}

const CHSH_COLUMNS: [&str; 6] = ["E_m1m2", "E_m1n2", "E_n1m2", "E_n1n2", "S", "violates"];

fn chsh_row(r: &ChshResult) -> Vec<f64> {
    let mut row = r.correlations.to_vec();
    row.push(r.s_value);
    row.push(if r.violates { 1.0 } else { 0.0 });
    row
}

fn quad_label(k: usize) -> String {
    let outcome = QuadrivariatePovm::outcome(k);
    outcome.iter().map(|&i| sign_label(i)).collect()
}

fn check_two_photon(rho: &DensityOperator) -> Result<(), CliError> {
    if rho.dim() != 4 {
        return Err(CliError::config("state", format!("expected 4 components, got {}", rho.dim())));
    }
    Ok(())
}

fn run_eprbell(
    c: &qmeas_core::experiments::EprBellConfig,
    rho: &DensityOperator,
    tol: f64,
) -> Result<(ResultTable, Vec<CheckResult>), CliError> {
    check_two_photon(rho)?;
    let dist = eprbell_povm(c)?.distribution(rho)?;
    let result = chsh_single_setup(rho, c)?;
    let names: Vec<String> = (0..16)
        .map(|k| format!("p_{}", quad_label(k)))
        .chain(CHSH_COLUMNS.iter().map(|s| s.to_string()))
        .collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut table = ResultTable::new(&names);
    let mut row = dist.probabilities().to_vec();
    row.extend(chsh_row(&result));
    table.push(row);
    let check = CheckResult {
        name: "chsh-local-bound".into(),
        passed: result.s_value.abs() <= 2.0 + tol,
        detail: format!("|S| = {}", result.s_value.abs()),
    };
    Ok((table, vec![check]))
}

fn run_premeasure(p: &PremeasureParams, tol: f64) -> Result<(ResultTable, Vec<CheckResult>), CliError> {
    let rho_a = DensityOperator::new(config::matrix("apparatus_state", &p.apparatus_state)?)?;
    let pointer = spectral_pvm(&config::matrix("pointer", &p.pointer)?)?;
    let model = match (&p.unitary, &p.hamiltonian, p.time) {
        (Some(u), _, _) => PremeasurementModel::new(rho_a, config::matrix("unitary", u)?, pointer, p.dim_object)?,
        (None, Some(h), Some(t)) => PremeasurementModel::from_generator(
            rho_a,
            &config::matrix("hamiltonian", h)?,
            t,
            pointer,
            p.dim_object,
        )?,
        _ => return Err(CliError::config("unitary", "one of `unitary` or `hamiltonian` + `time` is required")),
    };
    let rho_o = match &p.object_state {
        Some(m) => DensityOperator::new(config::matrix("object_state", m)?)?,
        None => DensityOperator::maximally_mixed(p.dim_object),
    };
    let povm = induced_povm(&model)?;
    let residual = pointer_consistency(&rho_o, &model)?;
    let mut table = ResultTable::new(&["effect", "pointer_value", "row", "col", "re", "im", "consistency_residual"]);
    for (k, (effect, &value)) in povm.effects().iter().zip(model.pointer().labels()).enumerate() {
        for i in 0..effect.dim() {
            for j in 0..effect.dim() {
                let z = effect[(i, j)];
                table.push(vec![k as f64, value, i as f64, j as f64, z.re, z.im, residual]);
            }
        }
    }
    let check = CheckResult {
        name: "pointer-consistency".into(),
        passed: residual < tol,
        detail: format!("residual {residual:e}"),
    };
    Ok((table, vec![check]))
}

fn run_sample(
    c: &qmeas_core::experiments::EprBellConfig,
    rho: &DensityOperator,
    n_samples: u64,
    seed: u64,
) -> Result<(ResultTable, Vec<CheckResult>), CliError> {
    check_two_photon(rho)?;
    let report = quadruple_sample_check(rho, c, n_samples, seed)?;
    let threshold = report.tv_threshold();
    let mut table = ResultTable::new(&[
        "m1", "n1", "m2", "n2", "count", "empirical", "exact", "tv_distance", "tv_threshold",
    ]);
    for k in 0..16 {
        let [m1, n1, m2, n2] = QuadrivariatePovm::outcome(k);
        table.push(vec![
            m1 as f64,
            n1 as f64,
            m2 as f64,
            n2 as f64,
            report.counts[k] as f64,
            report.empirical.probabilities()[k],
            report.exact.probabilities()[k],
            report.total_variation,
            threshold,
        ]);
    }
    let mut checks = Vec::new();
    if n_samples >= TV_ASSERT_MIN_SAMPLES {
        checks.push(CheckResult {
            name: "total-variation".into(),
            passed: report.total_variation <= threshold,
            detail: format!("TV {} vs threshold {}", report.total_variation, threshold),
        });
    }
    Ok((table, checks))
}
