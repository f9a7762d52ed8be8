//! Random inputs for property tests. Independent of the library's own
//! eigensolver and exponential: unitaries come from Gram-Schmidt.

#![allow(dead_code)]

use num_complex::Complex64;
use qmeas_core::state::DensityOperator;
use qmeas_core::{c64, Operator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng) -> Complex64 {
    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> Operator {
    Operator::from_vec(dim, (0..dim * dim).map(|_| complex(rng)).collect()).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> Operator {
    random_matrix(rng, dim).hermitian_part()
}

/// `A A† / Tr(A A†)`, full rank with probability one.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> DensityOperator {
    let a = random_matrix(rng, dim);
    let aa = &a * &a.adjoint();
    let tr = aa.trace().re;
    DensityOperator::new(aa.scale_real(1.0 / tr)).unwrap()
}

pub fn random_pure(rng: &mut impl Rng, dim: usize) -> DensityOperator {
    let v: Vec<Complex64> = (0..dim).map(|_| complex(rng)).collect();
    qmeas_core::state::pure_state(&v).unwrap()
}

/// Orthonormal columns by modified Gram-Schmidt on a random matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> Operator {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| complex(rng)).collect();
        for c in &cols {
            let dot: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut u = Operator::zeros(dim);
    for (j, c) in cols.iter().enumerate() {
        for (i, &z) in c.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Rank-one projectors onto an orthonormal basis taken from a random unitary.
pub fn random_basis_projectors(rng: &mut impl Rng, dim: usize) -> Vec<Operator> {
    let u = random_unitary(rng, dim);
    (0..dim)
        .map(|j| {
            let col: Vec<Complex64> = (0..dim).map(|i| u[(i, j)]).collect();
            Operator::outer(&col, &col).unwrap()
        })
        .collect()
}

/// A random POVM with `n` effects: a random orthonormal basis smeared by a
/// random column-stochastic matrix.
pub fn random_povm_effects(rng: &mut impl Rng, dim: usize, n: usize) -> Vec<Operator> {
    let basis = random_basis_projectors(rng, dim);
    let mut weights = vec![vec![0.0; dim]; n];
    for j in 0..dim {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for k in 0..n {
            weights[k][j] = raw[k] / total;
        }
    }
    (0..n)
        .map(|k| {
            basis
                .iter()
                .zip(&weights[k])
                .fold(Operator::zeros(dim), |acc, (p, &w)| &acc + &p.scale_real(w))
        })
        .collect()
}
