use thiserror::Error;

use crate::nonideality::NonidealityMatrix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |m - m†| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not unitary (max |u u† - I| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("effect {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    Positivity { index: usize, min_eigenvalue: f64 },

    #[error("effect {index} is not Hermitian (residual {residual:e})")]
    EffectNotHermitian { index: usize, residual: f64 },

    #[error("effect {index} has dimension {found}, expected {expected}")]
    EffectDimension { index: usize, expected: usize, found: usize },

    #[error("effects do not sum to identity (max residual {residual:e})")]
    Closure { residual: f64 },

    #[error("nonideality recovery did not converge after {iterations} iterations (gradient-mapping norm {gradient_norm:e})")]
    SolverNonConvergence {
        iterations: usize,
        gradient_norm: f64,
        best: Box<NonidealityMatrix>,
    },

    #[error("not a joint nonideal measurement of the target observables (residuals {lambda_residual:e}, {mu_residual:e})")]
    NotJointNonideal { lambda_residual: f64, mu_residual: f64 },

    #[error("premeasurement model is inconsistent: {0}")]
    ModelInconsistency(Box<Error>),
}
