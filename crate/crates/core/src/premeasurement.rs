//! POVMs induced by an explicit object–apparatus interaction.
//!
//! The object (dimension `d_o`) and apparatus (dimension `d_a`) start in
//! `ρ_o ⊗ ρ_a`, evolve under a joint unitary `U`, and the pointer PVM
//! `{E_am}` is read on the apparatus. The object-side POVM reproducing the
//! pointer statistics is `M_m = Tr_a[(I ⊗ ρ_a) U† (I ⊗ E_am) U]`.
//! The tensor ordering is object ⊗ apparatus throughout.

use crate::eig::exp_hermitian_generator;
use crate::error::{Error, Result};
use crate::operator::{Operator, DEFAULT_TOL};
use crate::povm::Povm;
use crate::state::{expectation, trace_product, DensityOperator, Pvm};

/// Closure/positivity tolerance for induced POVMs.
pub const INDUCED_POVM_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct PremeasurementModel {
    rho_a: DensityOperator,
    u: Operator,
    pointer: Pvm,
    dim_object: usize,
}

impl PremeasurementModel {
    pub fn new(rho_a: DensityOperator, u: Operator, pointer: Pvm, dim_object: usize) -> Result<Self> {
        Self::with_tol(rho_a, u, pointer, dim_object, DEFAULT_TOL)
    }

    pub fn with_tol(
        rho_a: DensityOperator,
        u: Operator,
        pointer: Pvm,
        dim_object: usize,
        tol: f64,
    ) -> Result<Self> {
        let dim_apparatus = rho_a.dim();
        if pointer.dim() != dim_apparatus {
            return Err(Error::DimensionMismatch {
                expected: dim_apparatus,
                found: pointer.dim(),
            });
        }
        if dim_object == 0 || u.dim() != dim_object * dim_apparatus {
            return Err(Error::DimensionMismatch {
                expected: dim_object * dim_apparatus,
                found: u.dim(),
            });
        }
        u.ensure_unitary(tol)?;
        Ok(Self {
            rho_a,
            u,
            pointer,
            dim_object,
        })
    }

    /// Builds `U = exp(-i H T)` (ħ = 1) from a Hermitian interaction Hamiltonian.
    pub fn from_generator(
        rho_a: DensityOperator,
        hamiltonian: &Operator,
        duration: f64,
        pointer: Pvm,
        dim_object: usize,
    ) -> Result<Self> {
        let u = exp_hermitian_generator(hamiltonian, duration)?;
        Self::new(rho_a, u, pointer, dim_object)
    }

    pub fn dim_object(&self) -> usize {
        self.dim_object
    }

    pub fn dim_apparatus(&self) -> usize {
        self.rho_a.dim()
    }

    pub fn unitary(&self) -> &Operator {
        &self.u
    }

    pub fn pointer(&self) -> &Pvm {
        &self.pointer
    }

    pub fn apparatus_state(&self) -> &DensityOperator {
        &self.rho_a
    }

    fn lift_pointer(&self, projector: &Operator) -> Operator {
        Operator::identity(self.dim_object).tensor(projector)
    }
}

/// `U (ρ_o ⊗ ρ_a) U†`.
pub fn evolve_joint(rho_o: &DensityOperator, model: &PremeasurementModel) -> Result<DensityOperator> {
    if rho_o.dim() != model.dim_object {
        return Err(Error::DimensionMismatch {
            expected: model.dim_object,
            found: rho_o.dim(),
        });
    }
    let initial = rho_o.op().tensor(model.rho_a.op());
    let evolved = model.u.matmul(&initial)?.matmul(&model.u.adjoint())?;
    Ok(DensityOperator::from_trusted(evolved))
}

/// The object POVM `{M_m}` induced by the pointer readout.
pub fn induced_povm(model: &PremeasurementModel) -> Result<Povm> {
    let (d_o, d_a) = (model.dim_object, model.dim_apparatus());
    let u_adj = model.u.adjoint();
    let weight = Operator::identity(d_o).tensor(model.rho_a.op());
    let effects = model
        .pointer
        .projectors()
        .iter()
        .map(|p| {
            let heisenberg = u_adj.matmul(&model.lift_pointer(p))?.matmul(&model.u)?;
            weight.matmul(&heisenberg)?.partial_trace_second(d_o, d_a)
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = model.pointer.labels().iter().map(|a| a.to_string()).collect();
    let povm = Povm::with_labels(effects, labels, INDUCED_POVM_TOL)
        .map_err(|e| Error::ModelInconsistency(Box::new(e)))?;
    // Exactly Hermitian in exact arithmetic; drop the round-off.
    let cleaned = povm.effects().iter().map(Operator::hermitian_part).collect();
    Povm::with_labels(cleaned, povm.outcome_labels().to_vec(), INDUCED_POVM_TOL)
        .map_err(|e| Error::ModelInconsistency(Box::new(e)))
}

/// `max_m |Tr[ρ_oaf (I ⊗ E_am)] - Tr[ρ_o M_m]|`; zero up to round-off for any model.
pub fn pointer_consistency(rho_o: &DensityOperator, model: &PremeasurementModel) -> Result<f64> {
    let joint = evolve_joint(rho_o, model)?;
    let povm = induced_povm(model)?;
    let mut worst: f64 = 0.0;
    for (p, m) in model.pointer.projectors().iter().zip(povm.effects()) {
        let pointer_side = trace_product(joint.op(), &model.lift_pointer(p))?.re;
        let object_side = expectation(rho_o, m)?;
        worst = worst.max((pointer_side - object_side).abs());
    }
    Ok(worst)
}

/// Pointer reading probabilities `Tr[ρ_oaf (I ⊗ E_am)]`.
pub fn pointer_distribution(rho_o: &DensityOperator, model: &PremeasurementModel) -> Result<Vec<f64>> {
    let joint = evolve_joint(rho_o, model)?;
    model
        .pointer
        .projectors()
        .iter()
        .map(|p| Ok(trace_product(joint.op(), &model.lift_pointer(p))?.re))
        .collect()
}

/// Swap of two equal-dimension factors, `|i⟩|k⟩ ↦ |k⟩|i⟩`.
pub fn swap_unitary(dim: usize) -> Operator {
    let mut u = Operator::zeros(dim * dim);
    for i in 0..dim {
        for k in 0..dim {
            u[(k * dim + i, i * dim + k)] = crate::operator::ONE;
        }
    }
    u
}

/// Controlled shift: object basis state `|i⟩` shifts the apparatus by `i`
/// (mod `d_a`). For two qubits this is CNOT.
pub fn controlled_shift(dim_object: usize, dim_apparatus: usize) -> Operator {
    let n = dim_object * dim_apparatus;
    let mut u = Operator::zeros(n);
    for i in 0..dim_object {
        for k in 0..dim_apparatus {
            let target = (k + i) % dim_apparatus;
            u[(i * dim_apparatus + target, i * dim_apparatus + k)] = crate::operator::ONE;
        }
    }
    u
}
