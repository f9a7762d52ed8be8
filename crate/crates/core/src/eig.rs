//! Cyclic Jacobi eigendecomposition for complex Hermitian matrices, and the
//! Hermitian-generator exponential built on top of it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{c64, Operator, DEFAULT_TOL, ZERO};

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl HermitianEig {
    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> Complex64) -> Operator {
        let n = self.eigenvalues.len();
        let mut out = Operator::zeros(n);
        for (&lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(lambda);
            if w == ZERO {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Operator {
        self.reconstruct_with(|l| c64(l, 0.0))
    }

    /// Projector onto the span of the eigenvectors with the given indices.
    pub fn projector(&self, indices: &[usize]) -> Operator {
        let n = self.eigenvalues.len();
        let mut out = Operator::zeros(n);
        for &k in indices {
            let v = &self.eigenvectors[k];
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        out
    }
}

pub fn herm_eig(m: &Operator) -> Result<HermitianEig> {
    herm_eig_with_tol(m, DEFAULT_TOL)
}

/// Diagonalizes `m`, which must be Hermitian within `tol` (entrywise).
pub fn herm_eig_with_tol(m: &Operator, tol: f64) -> Result<HermitianEig> {
    m.ensure_hermitian(tol)?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = Operator::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= OFF_DIAGONAL_TOL * scale {
        return Err(Error::Validation(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &Operator) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `D·R` where `D = diag(1, e^{-iφ})` makes the pivot real
/// and `R` is the classical real Jacobi rotation.
fn rotate(a: &mut Operator, v: &mut Operator, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs < f64::MIN_POSITIVE * 1e4 {
        return;
    }
    let phase = apq / abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let conj_phase = phase.conj();
    let r00 = c64(c, 0.0);
    let r01 = c64(s, 0.0);
    let r10 = conj_phase * (-s);
    let r11 = conj_phase * c;

    let n = a.dim();
    // a ← a·J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * r00 + akq * r10;
        a[(k, q)] = akp * r01 + akq * r11;
    }
    // a ← J†·a
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = r00.conj() * apk + r10.conj() * aqk;
        a[(q, k)] = r01.conj() * apk + r11.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = c64(a[(p, p)].re, 0.0);
    a[(q, q)] = c64(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * r00 + vkq * r10;
        v[(k, q)] = vkp * r01 + vkq * r11;
    }
}

/// `exp(-i h t)` for Hermitian `h` (natural units, ħ = 1).
pub fn exp_hermitian_generator(h: &Operator, t: f64) -> Result<Operator> {
    let eig = herm_eig(h)?;
    Ok(eig.reconstruct_with(|lambda| Complex64::from_polar(1.0, -lambda * t)))
}
