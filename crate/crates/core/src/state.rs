//! Preparations and standard observables.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::eig::herm_eig_with_tol;
use crate::error::{Error, Result};
use crate::operator::{c64, Operator, DEFAULT_TOL, ZERO};

/// Eigenvalues closer than this are treated as one degenerate eigenvalue.
pub const EIGENVALUE_CLUSTER_TOL: f64 = 1e-8;

/// Positive semidefinite operator with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_tol(op, DEFAULT_TOL)
    }

    pub fn with_tol(op: Operator, tol: f64) -> Result<Self> {
        op.ensure_hermitian(tol)?;
        let trace = op.trace();
        if (trace - 1.0).norm() > tol {
            return Err(Error::Validation(format!(
                "density operator trace is {trace}, expected 1"
            )));
        }
        let eig = herm_eig_with_tol(&op, tol)?;
        if let Some(&min) = eig.eigenvalues.first() {
            if min < -tol {
                return Err(Error::Validation(format!(
                    "density operator has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self { op })
    }

    /// Maximally mixed state `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: Operator::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            op: self.op.tensor(&other.op),
        }
    }

    /// Reduced state of the first factor.
    pub fn reduce_to_first(&self, dim_first: usize, dim_second: usize) -> Result<DensityOperator> {
        Ok(DensityOperator {
            op: self.op.partial_trace_second(dim_first, dim_second)?,
        })
    }

    /// Wraps an operator known to be a density operator by construction
    /// (e.g. the unitary image of one).
    pub(crate) fn from_trusted(op: Operator) -> Self {
        Self { op }
    }
}

/// Projection-valued measure: orthogonal projectors labeled by eigenvalues.
#[derive(Debug, Clone)]
pub struct Pvm {
    projectors: Vec<Operator>,
    labels: Vec<f64>,
}

impl Pvm {
    /// Validates idempotency, mutual orthogonality and completeness.
    pub fn new(projectors: Vec<Operator>, labels: Vec<f64>) -> Result<Self> {
        Self::with_tol(projectors, labels, DEFAULT_TOL)
    }

    pub fn with_tol(projectors: Vec<Operator>, labels: Vec<f64>, tol: f64) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::Validation("PVM needs at least one projector".into()));
        }
        if projectors.len() != labels.len() {
            return Err(Error::Validation(format!(
                "{} projectors but {} labels",
                projectors.len(),
                labels.len()
            )));
        }
        let dim = projectors[0].dim();
        for (index, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::EffectDimension {
                    index,
                    expected: dim,
                    found: p.dim(),
                });
            }
            let residual = p.hermiticity_residual();
            if residual > tol {
                return Err(Error::EffectNotHermitian { index, residual });
            }
            let idem = (&(p * p) - p).max_abs();
            if idem > tol {
                return Err(Error::Validation(format!(
                    "projector {index} is not idempotent (residual {idem:e})"
                )));
            }
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                let overlap = (&projectors[i] * &projectors[j]).max_abs();
                if overlap > tol {
                    return Err(Error::Validation(format!(
                        "projectors {i} and {j} are not orthogonal (residual {overlap:e})"
                    )));
                }
            }
        }
        let total = crate::operator::sum(&projectors).expect("nonempty");
        let residual = total.distance_max(&Operator::identity(dim));
        if residual > tol {
            return Err(Error::Closure { residual });
        }
        Ok(Self { projectors, labels })
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// `Σ_m a_m E_m`.
    pub fn observable(&self) -> Operator {
        let mut out = Operator::zeros(self.dim());
        for (p, &a) in self.projectors.iter().zip(&self.labels) {
            out = &out + &p.scale_real(a);
        }
        out
    }
}

/// `|v⟩⟨v| / ⟨v|v⟩`.
pub fn pure_state(v: &[Complex64]) -> Result<DensityOperator> {
    let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if v.is_empty() || norm_sqr == 0.0 || !norm_sqr.is_finite() {
        return Err(Error::Validation(
            "pure state needs a nonzero finite vector".into(),
        ));
    }
    let scale = 1.0 / norm_sqr.sqrt();
    let u: Vec<Complex64> = v.iter().map(|&z| z * scale).collect();
    Ok(DensityOperator {
        op: Operator::outer(&u, &u)?,
    })
}

/// Real-vector shorthand for [`pure_state`].
pub fn pure_state_real(v: &[f64]) -> Result<DensityOperator> {
    let v: Vec<Complex64> = v.iter().map(|&x| c64(x, 0.0)).collect();
    pure_state(&v)
}

/// Spectral decomposition of a Hermitian operator into distinct eigenvalues
/// (ascending) and their eigenprojectors.
pub fn spectral_pvm(a: &Operator) -> Result<Pvm> {
    spectral_pvm_with_tol(a, DEFAULT_TOL)
}

pub fn spectral_pvm_with_tol(a: &Operator, tol: f64) -> Result<Pvm> {
    let eig = herm_eig_with_tol(a, tol)?;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        match clusters.last_mut() {
            Some(cluster)
                if lambda - eig.eigenvalues[*cluster.last().unwrap()]
                    <= EIGENVALUE_CLUSTER_TOL =>
            {
                cluster.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }
    let labels = clusters
        .iter()
        .map(|c| c.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / c.len() as f64)
        .collect();
    let projectors = clusters.iter().map(|c| eig.projector(c)).collect();
    Pvm::with_tol(projectors, labels, tol)
}

/// `Re Tr(ρ m)`. The imaginary residue must stay below the default tolerance,
/// which holds whenever `m` is Hermitian.
pub fn expectation(rho: &DensityOperator, m: &Operator) -> Result<f64> {
    let value = trace_product(rho.op(), m)?;
    if value.im.abs() > DEFAULT_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian {
            residual: m.hermiticity_residual(),
        });
    }
    Ok(value.re)
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &Operator, b: &Operator) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    Ok(acc)
}

/// Standard deviation `sqrt(⟨A²⟩ - ⟨A⟩²)`, clamped at zero.
///
/// Evaluated as `Σ_k p_k ‖(A - ⟨A⟩) ψ_k‖²` over the spectral decomposition
/// `ρ = Σ_k p_k |ψ_k⟩⟨ψ_k|`, so round-off enters squared and eigenstates give
/// zero to machine precision.
pub fn std_dev(rho: &DensityOperator, a: &Operator) -> Result<f64> {
    let mean = expectation(rho, a)?;
    let shifted = a - &Operator::identity(a.dim()).scale_real(mean);
    let spectrum = herm_eig_with_tol(rho.op(), DEFAULT_TOL)?;
    let n = a.dim();
    let variance: f64 = spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.eigenvectors)
        // Weights below the round-off floor of a unit-trace state are noise.
        .filter(|(&p, _)| p > 64.0 * f64::EPSILON)
        .map(|(&p, psi)| {
            let norm_sqr: f64 = (0..n)
                .map(|i| (0..n).map(|j| shifted[(i, j)] * psi[j]).sum::<Complex64>().norm_sqr())
                .sum();
            p * norm_sqr
        })
        .sum();
    Ok(variance.max(0.0).sqrt())
}

/// Rank-one projector onto linear polarization `(cos θ, sin θ)`.
pub fn polarization_projector(theta: f64) -> Operator {
    let (s, c) = theta.sin_cos();
    Operator::from_real_rows(&[vec![c * c, c * s], vec![c * s, s * s]])
        .expect("finite for finite theta")
}

/// Two-outcome polarization PVM `{E^θ_+, E^θ_-}` labeled `+1, -1`.
pub fn polarization_pvm(theta: f64) -> Pvm {
    let plus = polarization_projector(theta);
    let minus = &Operator::identity(2) - &plus;
    Pvm {
        projectors: vec![plus, minus],
        labels: vec![1.0, -1.0],
    }
}

/// `(|HH⟩ + |VV⟩)/√2` on the two-photon polarization space.
pub fn entangled_pair_state() -> DensityOperator {
    let s = FRAC_1_SQRT_2;
    pure_state_real(&[s, 0.0, 0.0, s]).expect("nonzero vector")
}
