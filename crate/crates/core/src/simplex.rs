//! Projected-gradient solver for least squares over column-stochastic matrices.
//!
//! Minimizes `Σ_m ‖M_m - Σ_n λ_mn N_n‖²_F` subject to `λ ≥ 0`, `Σ_m λ_mn = 1`.
//! With `G_nn' = Re Tr(N_n N_n')` and `C_mn = Re Tr(M_m N_n)` the objective is
//! a convex quadratic with gradient `2(λG - C)`.

/// Euclidean projection of `v` onto the probability simplex `{x ≥ 0, Σx = 1}`.
pub fn project_onto_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|&x| (x - shift).max(0.0)).collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub gradient_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gradient_tol: 1e-10,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOutcome {
    /// `lam[m][n]`, every column on the simplex.
    pub lam: Vec<Vec<f64>>,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// Runs projected gradient descent with backtracking from the uniform matrix.
///
/// `gram` is `cols × cols`, `cross` is `rows × cols`.
pub fn solve_column_stochastic(gram: &[Vec<f64>], cross: &[Vec<f64>], options: SolverOptions) -> SolverOutcome {
    let rows = cross.len();
    let cols = gram.len();
    let mut lam = vec![vec![1.0 / rows as f64; cols]; rows];

    let max_diag = (0..cols).map(|n| gram[n][n]).fold(0.0, f64::max);
    let mut step = if max_diag > 0.0 { 0.5 / max_diag } else { 1.0 };

    let mut gradient_norm = f64::INFINITY;
    for iteration in 0..options.max_iterations {
        let grad = gradient(&lam, gram, cross);
        let mut backtracks = 0;
        let (candidate, direction) = loop {
            let candidate = project_columns(&lam, &grad, step);
            let direction = difference(&candidate, &lam);
            let norm_sqr = frobenius_sqr(&direction);
            // f is quadratic, so f(x + d) - f(x) - <∇f, d> = Σ_m d_m G d_mᵀ exactly.
            let curvature = quadratic_form(&direction, gram);
            if curvature <= norm_sqr / (2.0 * step) || backtracks >= 60 {
                break (candidate, direction);
            }
            step *= 0.5;
            backtracks += 1;
        };
        gradient_norm = frobenius_sqr(&direction).sqrt() / step;
        lam = candidate;
        if gradient_norm < options.gradient_tol {
            return SolverOutcome {
                lam,
                iterations: iteration + 1,
                gradient_norm,
                converged: true,
            };
        }
    }
    SolverOutcome {
        lam,
        iterations: options.max_iterations,
        gradient_norm,
        converged: false,
    }
}

fn gradient(lam: &[Vec<f64>], gram: &[Vec<f64>], cross: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = gram.len();
    lam.iter()
        .zip(cross)
        .map(|(row, c)| {
            (0..cols)
                .map(|n| {
                    let lg: f64 = row.iter().zip(gram).map(|(l, g)| l * g[n]).sum();
                    2.0 * (lg - c[n])
                })
                .collect()
        })
        .collect()
}

fn project_columns(lam: &[Vec<f64>], grad: &[Vec<f64>], step: f64) -> Vec<Vec<f64>> {
    let rows = lam.len();
    let cols = lam[0].len();
    let mut out = vec![vec![0.0; cols]; rows];
    let mut column = vec![0.0; rows];
    for n in 0..cols {
        for m in 0..rows {
            column[m] = lam[m][n] - step * grad[m][n];
        }
        for (m, x) in project_onto_simplex(&column).into_iter().enumerate() {
            out[m][n] = x;
        }
    }
    out
}

fn difference(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
        .collect()
}

fn frobenius_sqr(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().map(|x| x * x).sum()
}

fn quadratic_form(d: &[Vec<f64>], gram: &[Vec<f64>]) -> f64 {
    d.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(n, &dn)| dn * row.iter().zip(&gram[n]).map(|(dk, g)| dk * g).sum::<f64>())
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_examples() {
        assert_eq!(project_onto_simplex(&[0.2, 0.8]), vec![0.2, 0.8]);
        assert_eq!(project_onto_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_onto_simplex(&[0.0, 0.0, 0.0]);
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(project_onto_simplex(&[-1.0, 5.0, 0.5]), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn identity_gram_recovers_cross_matrix() {
        let gram = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let cross = vec![vec![0.3, 0.0], vec![0.7, 1.0]];
        let out = solve_column_stochastic(&gram, &cross, SolverOptions::default());
        assert!(out.converged);
        for (row, target) in out.lam.iter().zip(&cross) {
            for (x, y) in row.iter().zip(target) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reports_non_convergence() {
        let gram = vec![vec![1.0, 0.999], vec![0.999, 1.0]];
        let cross = vec![vec![0.6, 0.5], vec![0.4, 0.5]];
        let options = SolverOptions {
            gradient_tol: 0.0,
            max_iterations: 3,
        };
        let out = solve_column_stochastic(&gram, &cross, options);
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
    }

    proptest! {
        #[test]
        fn projection_lands_on_simplex(v in prop::collection::vec(-5.0f64..5.0, 1..8)) {
            let p = project_onto_simplex(&v);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn projection_is_idempotent(v in prop::collection::vec(-5.0f64..5.0, 1..8)) {
            let p = project_onto_simplex(&v);
            let q = project_onto_simplex(&p);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
