//! Nonideality of measurements: stochastic-matrix recovery, the average row
//! entropy, and the Martens and Heisenberg (Robertson) inequalities.
//!
//! A POVM `{M_m}` is a nonideal version of `{N_n}` when
//! `M_m = Σ_n λ_mn N_n` for a nonnegative matrix whose columns sum to one.
//! [`recover_nonideality`] finds the best such `λ` in the Frobenius sense and
//! reports how far the relation is from exact.

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::povm::{marginal, Axis, BivariatePovm, Povm};
use crate::simplex::{solve_column_stochastic, SolverOptions};
use crate::state::{std_dev, trace_product, DensityOperator, Pvm};

/// Residual below which a recovered relation is considered exact.
pub const EXACT_RELATION_TOL: f64 = 1e-7;
/// Largest decomposition residual accepted by [`check_martens`].
pub const JOINT_MEASUREMENT_TOL: f64 = 1e-6;
/// Slack tolerance for the Martens inequality, which compounds solver residuals.
pub const MARTENS_SLACK_TOL: f64 = 1e-6;
/// Slack tolerance for the Heisenberg inequality.
pub const HEISENBERG_SLACK_TOL: f64 = 1e-9;

/// Column-stochastic matrix `λ_mn` with the recovery residual that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct NonidealityMatrix {
    lam: Vec<Vec<f64>>,
    residual: f64,
}

impl NonidealityMatrix {
    /// Validates nonnegativity (≥ -1e-9) and column sums (within 1e-7).
    pub fn new(lam: Vec<Vec<f64>>, residual: f64) -> Result<Self> {
        let rows = lam.len();
        let cols = lam.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || lam.iter().any(|r| r.len() != cols) {
            return Err(Error::Validation("nonideality matrix must be a nonempty rectangle".into()));
        }
        for (m, row) in lam.iter().enumerate() {
            for (n, &x) in row.iter().enumerate() {
                if !x.is_finite() || x < -1e-9 {
                    return Err(Error::Validation(format!("entry ({m}, {n}) = {x} is negative")));
                }
            }
        }
        for n in 0..cols {
            let total: f64 = lam.iter().map(|r| r[n]).sum();
            if (total - 1.0).abs() > 1e-7 {
                return Err(Error::Validation(format!("column {n} sums to {total}, expected 1")));
            }
        }
        Ok(Self { lam, residual })
    }

    /// An analytically known matrix (residual zero).
    pub fn exact(lam: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(lam, 0.0)
    }

    pub fn identity(size: usize) -> Self {
        let lam = (0..size)
            .map(|m| (0..size).map(|n| if m == n { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { lam, residual: 0.0 }
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.lam
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.lam[m][n]
    }

    pub fn rows(&self) -> usize {
        self.lam.len()
    }

    pub fn cols(&self) -> usize {
        self.lam[0].len()
    }

    /// Frobenius norm of `M_m - Σ_n λ_mn N_n` over all `m`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Largest entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &NonidealityMatrix) -> f64 {
        assert_eq!(
            (self.rows(), self.cols()),
            (other.rows(), other.cols()),
            "matrix shapes differ"
        );
        self.lam
            .iter()
            .flatten()
            .zip(other.lam.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_n λ_mn N_n` for every row `m`.
    pub fn smear(&self, target: &Povm) -> Vec<Operator> {
        assert_eq!(self.cols(), target.len(), "λ columns must match target outcomes");
        self.lam
            .iter()
            .map(|row| {
                row.iter()
                    .zip(target.effects())
                    .fold(Operator::zeros(target.dim()), |acc, (&l, n)| &acc + &n.scale_real(l))
            })
            .collect()
    }
}

/// Evaluated sides of an inequality `lhs ≥ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// `lhs - rhs`.
    pub slack: f64,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            lhs,
            rhs,
            satisfied: slack >= -tol,
            slack,
        }
    }

    /// Whether the inequality holds with equality within `tol`.
    pub fn is_tight(&self, tol: f64) -> bool {
        self.slack.abs() <= tol
    }
}

/// Finds the column-stochastic `λ` minimizing `Σ_m ‖M_m - Σ_n λ_mn N_n‖²_F`.
///
/// When `{N_n}` is linearly dependent the minimizer is not unique; the
/// solver's limit point is returned.
pub fn recover_nonideality(m: &Povm, n: &Povm) -> Result<NonidealityMatrix> {
    recover_nonideality_with(m, n, SolverOptions::default())
}

pub fn recover_nonideality_with(m: &Povm, n: &Povm, options: SolverOptions) -> Result<NonidealityMatrix> {
    if m.dim() != n.dim() {
        return Err(Error::DimensionMismatch {
            expected: n.dim(),
            found: m.dim(),
        });
    }
    let real_overlap = |a: &Operator, b: &Operator| {
        trace_product(a, b).expect("dimensions checked").re
    };
    let gram: Vec<Vec<f64>> = n
        .effects()
        .iter()
        .map(|a| n.effects().iter().map(|b| real_overlap(a, b)).collect())
        .collect();
    let cross: Vec<Vec<f64>> = m
        .effects()
        .iter()
        .map(|a| n.effects().iter().map(|b| real_overlap(a, b)).collect())
        .collect();

    let outcome = solve_column_stochastic(&gram, &cross, options);
    let mut matrix = NonidealityMatrix {
        lam: outcome.lam,
        residual: 0.0,
    };
    matrix.residual = reconstruction_residual(m, n, &matrix);
    if outcome.converged {
        Ok(matrix)
    } else {
        Err(Error::SolverNonConvergence {
            iterations: outcome.iterations,
            gradient_norm: outcome.gradient_norm,
            best: Box::new(matrix),
        })
    }
}

fn reconstruction_residual(m: &Povm, n: &Povm, lam: &NonidealityMatrix) -> f64 {
    lam.smear(n)
        .iter()
        .zip(m.effects())
        .map(|(approx, exact)| approx.distance(exact).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Average row entropy
/// `J = -(1/N) Σ_mn λ_mn ln(λ_mn / Σ_n' λ_mn')`, with `N` the number of rows.
///
/// Zero entries and zero rows contribute nothing. `J = 0` exactly when each
/// row has a single nonzero entry, i.e. for an ideal measurement.
pub fn row_entropy_measure(lam: &NonidealityMatrix) -> f64 {
    let total: f64 = lam
        .lam
        .iter()
        .map(|row| {
            let row_sum: f64 = row.iter().filter(|&&x| x > 0.0).sum();
            if row_sum <= 0.0 {
                return 0.0;
            }
            row.iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| x * (x / row_sum).ln())
                .sum::<f64>()
        })
        .sum();
    (-total / lam.rows() as f64).max(0.0)
}

/// Recovers `(λ, μ)` relating the row and column marginals of `r` to the
/// target PVMs `e` and `f`.
pub fn joint_nonideal_decomposition(
    r: &BivariatePovm,
    e: &Pvm,
    f: &Pvm,
) -> Result<(NonidealityMatrix, NonidealityMatrix)> {
    let lambda = recover_nonideality(&marginal(r, Axis::Row), &Povm::from(e))?;
    let mu = recover_nonideality(&marginal(r, Axis::Col), &Povm::from(f))?;
    Ok((lambda, mu))
}

/// `-ln max_mn Tr(E_m F_n)`, a property of the two observables alone.
pub fn martens_bound(e: &Pvm, f: &Pvm) -> Result<f64> {
    if e.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: f.dim(),
        });
    }
    let mut max_overlap = f64::NEG_INFINITY;
    for a in e.projectors() {
        for b in f.projectors() {
            max_overlap = max_overlap.max(trace_product(a, b)?.re);
        }
    }
    if max_overlap <= 0.0 {
        return Err(Error::Validation(
            "maximal overlap between the observables is zero".into(),
        ));
    }
    Ok(-max_overlap.ln())
}

/// Evaluates `J(λ) + J(μ) ≥ -ln max Tr E_m F_n` for the joint measurement `r`.
pub fn check_martens(r: &BivariatePovm, e: &Pvm, f: &Pvm) -> Result<InequalityReport> {
    let (lambda, mu) = joint_nonideal_decomposition(r, e, f)?;
    if lambda.residual() >= JOINT_MEASUREMENT_TOL || mu.residual() >= JOINT_MEASUREMENT_TOL {
        return Err(Error::NotJointNonideal {
            lambda_residual: lambda.residual(),
            mu_residual: mu.residual(),
        });
    }
    let lhs = row_entropy_measure(&lambda) + row_entropy_measure(&mu);
    Ok(InequalityReport::new(lhs, martens_bound(e, f)?, MARTENS_SLACK_TOL))
}

/// Evaluates `ΔA ΔB ≥ ½ |Tr ρ [A, B]|`.
pub fn check_heisenberg(rho: &DensityOperator, a: &Operator, b: &Operator) -> Result<InequalityReport> {
    for op in [a, b] {
        if op.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: op.dim(),
            });
        }
    }
    let lhs = std_dev(rho, a)? * std_dev(rho, b)?;
    let rhs = 0.5 * trace_product(rho.op(), &a.commutator(b)?)?.norm();
    Ok(InequalityReport::new(lhs, rhs, HEISENBERG_SLACK_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli;
    use crate::povm::validate_povm;
    use crate::state::{polarization_projector, polarization_pvm, pure_state_real};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, LN_2};

    fn matrix(rows: &[&[f64]]) -> NonidealityMatrix {
        NonidealityMatrix::exact(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn matrix_validation() {
        assert!(NonidealityMatrix::exact(vec![vec![0.5, 0.0], vec![0.4, 1.0]]).is_err());
        assert!(NonidealityMatrix::exact(vec![vec![-0.1, 0.0], vec![1.1, 1.0]]).is_err());
        assert!(NonidealityMatrix::exact(vec![vec![0.3, 0.0], vec![0.7, 1.0]]).is_ok());
    }

    #[test]
    fn row_entropy_examples() {
        assert_eq!(row_entropy_measure(&NonidealityMatrix::identity(3)), 0.0);
        // γ = 0: second row (1, 1) has entropy 2·ln 2 over N = 2 rows.
        let j = row_entropy_measure(&matrix(&[&[0.0, 0.0], &[1.0, 1.0]]));
        assert!((j - LN_2).abs() < 1e-15);
        // γ = ½: -(1/2)[½ ln(⅓) + ln(⅔)] = ¾ ln 3 - ½ ln 2.
        let j = row_entropy_measure(&matrix(&[&[0.5, 0.0], &[0.5, 1.0]]));
        let expected = 0.75 * 3f64.ln() - 0.5 * LN_2;
        assert!((j - expected).abs() < 1e-15);
        assert!((j - 0.4774).abs() < 1e-4);
    }

    #[test]
    fn recovery_of_self_is_identity() {
        let p = validate_povm(polarization_pvm(0.7).projectors().to_vec()).unwrap();
        let lam = recover_nonideality(&p, &p).unwrap();
        assert!(lam.max_abs_diff(&NonidealityMatrix::identity(2)) < 1e-12);
        assert!(lam.residual() < 1e-12);
    }

    #[test]
    fn recovery_of_scaled_projector() {
        let gamma = 0.37;
        let e = polarization_projector(0.2).scale_real(gamma);
        let m = validate_povm(vec![e.clone(), &Operator::identity(2) - &e]).unwrap();
        let n = Povm::from(&polarization_pvm(0.2));
        let lam = recover_nonideality(&m, &n).unwrap();
        let expected = matrix(&[&[gamma, 0.0], &[1.0 - gamma, 1.0]]);
        assert!(lam.max_abs_diff(&expected) < 1e-12);
        assert!(lam.residual() < 1e-12);
    }

    #[test]
    fn recovery_reports_inexact_relation() {
        // A PVM at θ is not a smearing of the PVM at θ + π/4.
        let m = Povm::from(&polarization_pvm(0.0));
        let n = Povm::from(&polarization_pvm(FRAC_PI_4));
        let lam = recover_nonideality(&m, &n).unwrap();
        assert!(lam.residual() > 0.1);
    }

    #[test]
    fn martens_bound_examples() {
        let e = polarization_pvm(0.3);
        assert!(martens_bound(&e, &e).unwrap().abs() < 1e-15);
        let b = martens_bound(&polarization_pvm(0.0), &polarization_pvm(FRAC_PI_4)).unwrap();
        assert!((b - LN_2).abs() < 1e-15);
        let b = martens_bound(&polarization_pvm(0.1), &polarization_pvm(0.1 + FRAC_PI_6)).unwrap();
        assert!((b + 0.75f64.ln()).abs() < 1e-14);
        assert!((b - 0.2877).abs() < 1e-4);
    }

    #[test]
    fn heisenberg_examples() {
        let up = pure_state_real(&[1.0, 0.0]).unwrap();
        let same = check_heisenberg(&up, &pauli::x(), &pauli::x()).unwrap();
        assert_eq!(same.rhs, 0.0);
        assert!(same.satisfied);

        let r = check_heisenberg(&up, &pauli::x(), &pauli::y()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15);
        assert!((r.rhs - 1.0).abs() < 1e-15);
        assert!(r.satisfied && r.is_tight(1e-9));

        assert!(matches!(
            check_heisenberg(&up, &Operator::identity(3), &pauli::x()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn check_martens_rejects_unrelated_grid() {
        // Ideal joint measurement of σz, paired against the σx PVM on the column axis.
        let up = polarization_projector(0.0);
        let down = polarization_projector(std::f64::consts::FRAC_PI_2);
        let zero = Operator::zeros(2);
        let labels = || vec!["+".to_string(), "-".to_string()];
        let r = BivariatePovm::new(
            vec![vec![up.clone(), zero.clone()], vec![zero, down]],
            labels(),
            labels(),
        )
        .unwrap();
        let e = polarization_pvm(0.0);
        let f = polarization_pvm(FRAC_PI_4);
        assert!(matches!(
            check_martens(&r, &e, &f),
            Err(Error::NotJointNonideal { .. })
        ));
        // Against compatible targets the same grid is ideal and the bound is zero.
        let report = check_martens(&r, &e, &e).unwrap();
        assert!(report.lhs.abs() < 1e-12);
        assert!(report.rhs.abs() < 1e-12);
        assert!(report.satisfied);
    }
}
