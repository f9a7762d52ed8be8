//! Generalized observables: validated POVMs and their multivariate grids.

use crate::eig::herm_eig_with_tol;
use crate::error::{Error, Result};
use crate::operator::{Operator, DEFAULT_TOL};
use crate::state::{expectation, DensityOperator, Pvm};

/// Detection outcome label.
pub const PLUS: &str = "+";
/// Non-detection outcome label.
pub const MINUS: &str = "-";

/// Positive effects resolving the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<Operator>,
    outcome_labels: Vec<String>,
}

/// Validates `effects` as a POVM with labels `"0"`, `"1"`, ...
pub fn validate_povm(effects: Vec<Operator>) -> Result<Povm> {
    let labels = (0..effects.len()).map(|i| i.to_string()).collect();
    Povm::with_labels(effects, labels, DEFAULT_TOL)
}

impl Povm {
    /// Checks dimensions, Hermiticity, positivity and closure, in that order.
    pub fn with_labels(effects: Vec<Operator>, outcome_labels: Vec<String>, tol: f64) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::Validation("POVM needs at least one effect".into()));
        };
        if outcome_labels.len() != effects.len() {
            return Err(Error::Validation(format!(
                "{} effects but {} labels",
                effects.len(),
                outcome_labels.len()
            )));
        }
        let dim = first.dim();
        for (index, e) in effects.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::EffectDimension {
                    index,
                    expected: dim,
                    found: e.dim(),
                });
            }
        }
        for (index, e) in effects.iter().enumerate() {
            let residual = e.hermiticity_residual();
            if residual > tol {
                return Err(Error::EffectNotHermitian { index, residual });
            }
            let eig = herm_eig_with_tol(&e.hermitian_part(), tol)?;
            let min_eigenvalue = eig.eigenvalues[0];
            if min_eigenvalue < -tol {
                return Err(Error::Positivity {
                    index,
                    min_eigenvalue,
                });
            }
        }
        let residual = closure_residual(&effects);
        if residual > tol {
            return Err(Error::Closure { residual });
        }
        Ok(Self {
            effects,
            outcome_labels,
        })
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// True iff every effect is idempotent within `tol`.
    pub fn is_pvm_with_tol(&self, tol: f64) -> bool {
        self.effects.iter().all(|e| (&(e * e) - e).max_abs() <= tol)
    }
}

impl From<&Pvm> for Povm {
    /// A PVM is already a valid POVM; outcome labels are its eigenvalues.
    fn from(pvm: &Pvm) -> Self {
        Povm {
            effects: pvm.projectors().to_vec(),
            outcome_labels: pvm.labels().iter().map(|a| a.to_string()).collect(),
        }
    }
}

pub fn is_pvm(p: &Povm) -> bool {
    p.is_pvm_with_tol(DEFAULT_TOL)
}

/// Largest entrywise deviation of `Σ effects` from the identity.
pub fn closure_residual(effects: &[Operator]) -> f64 {
    let total = crate::operator::sum(effects).expect("nonempty effect list");
    total.distance_max(&Operator::identity(total.dim()))
}

/// Outcome probabilities laid out in the POVM's outcome shape (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probabilities: Vec<f64>,
    shape: Vec<usize>,
}

impl OutcomeDistribution {
    pub fn new(probabilities: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != probabilities.len() {
            return Err(Error::DimensionMismatch {
                expected,
                found: probabilities.len(),
            });
        }
        Ok(Self {
            probabilities,
            shape,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Probability at a multi-index.
    pub fn get(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.shape.len(), "index rank must match shape");
        let flat = index
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| {
                assert!(i < n, "index out of range");
                acc * n + i
            });
        self.probabilities[flat]
    }

    /// Entries ≥ -tol and total within tol of one.
    pub fn is_normalized(&self, tol: f64) -> bool {
        self.probabilities.iter().all(|&p| p >= -tol) && (self.total() - 1.0).abs() <= tol
    }

    /// Total-variation distance `½ Σ |p - q|`.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        assert_eq!(self.shape, other.shape, "distributions must share a shape");
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

/// `p_m = Tr ρ M_m` for every effect.
pub fn distribution(rho: &DensityOperator, p: &Povm) -> Result<OutcomeDistribution> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: rho.dim(),
        });
    }
    let probabilities = p
        .effects
        .iter()
        .map(|e| expectation(rho, e))
        .collect::<Result<Vec<_>>>()?;
    OutcomeDistribution::new(probabilities, vec![p.len()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Col,
}

/// Joint POVM `{R_mn}` on a rows × cols outcome grid.
#[derive(Debug, Clone)]
pub struct BivariatePovm {
    rows: usize,
    cols: usize,
    grid: Vec<Operator>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl BivariatePovm {
    /// `grid[m][n]` is the effect for outcome pair `(m, n)`.
    pub fn new(
        grid: Vec<Vec<Operator>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        Self::with_tol(grid, row_labels, col_labels, DEFAULT_TOL)
    }

    pub fn with_tol(
        grid: Vec<Vec<Operator>>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        tol: f64,
    ) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || grid.iter().any(|r| r.len() != cols) {
            return Err(Error::Validation("bivariate grid must be a nonempty rectangle".into()));
        }
        if row_labels.len() != rows || col_labels.len() != cols {
            return Err(Error::Validation("grid labels do not match grid shape".into()));
        }
        let flat: Vec<Operator> = grid.into_iter().flatten().collect();
        let labels = pair_labels(&row_labels, &col_labels);
        Povm::with_labels(flat.clone(), labels, tol)?;
        Ok(Self {
            rows,
            cols,
            grid: flat,
            row_labels,
            col_labels,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.grid[0].dim()
    }

    pub fn effect(&self, m: usize, n: usize) -> &Operator {
        &self.grid[m * self.cols + n]
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// The grid as a flat POVM in row-major outcome order.
    pub fn flatten(&self) -> Povm {
        Povm {
            effects: self.grid.clone(),
            outcome_labels: pair_labels(&self.row_labels, &self.col_labels),
        }
    }

    /// Joint outcome distribution with shape `[rows, cols]`.
    pub fn distribution(&self, rho: &DensityOperator) -> Result<OutcomeDistribution> {
        let flat = distribution(rho, &self.flatten())?;
        OutcomeDistribution::new(flat.probabilities, vec![self.rows, self.cols])
    }
}

fn pair_labels(rows: &[String], cols: &[String]) -> Vec<String> {
    rows.iter()
        .flat_map(|r| cols.iter().map(move |c| format!("{r}{c}")))
        .collect()
}

/// Marginal POVM: `{Σ_n R_mn}` for [`Axis::Row`], `{Σ_m R_mn}` for [`Axis::Col`].
pub fn marginal(b: &BivariatePovm, axis: Axis) -> Povm {
    let (effects, labels) = match axis {
        Axis::Row => (
            (0..b.rows)
                .map(|m| sum_all((0..b.cols).map(|n| b.effect(m, n))))
                .collect(),
            b.row_labels.clone(),
        ),
        Axis::Col => (
            (0..b.cols)
                .map(|n| sum_all((0..b.rows).map(|m| b.effect(m, n))))
                .collect(),
            b.col_labels.clone(),
        ),
    };
    Povm {
        effects,
        outcome_labels: labels,
    }
}

fn sum_all<'a>(ops: impl Iterator<Item = &'a Operator>) -> Operator {
    crate::operator::sum(ops).expect("nonempty")
}

/// Outcome axes of the two-arm experiment, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadAxis {
    M1 = 0,
    N1 = 1,
    M2 = 2,
    N2 = 3,
}

impl QuadAxis {
    pub const ALL: [QuadAxis; 4] = [QuadAxis::M1, QuadAxis::N1, QuadAxis::M2, QuadAxis::N2];

    pub fn name(self) -> &'static str {
        match self {
            QuadAxis::M1 => "m1",
            QuadAxis::N1 => "n1",
            QuadAxis::M2 => "m2",
            QuadAxis::N2 => "n2",
        }
    }
}

/// `{R_{m1 n1 m2 n2}}` with every axis two-valued (`+`, `-`).
#[derive(Debug, Clone)]
pub struct QuadrivariatePovm {
    grid: Vec<Operator>,
}

impl QuadrivariatePovm {
    /// `effects` is indexed by `((m1·2 + n1)·2 + m2)·2 + n2`, outcome 0 = `+`.
    pub fn new(effects: Vec<Operator>) -> Result<Self> {
        Self::with_tol(effects, DEFAULT_TOL)
    }

    pub fn with_tol(effects: Vec<Operator>, tol: f64) -> Result<Self> {
        if effects.len() != 16 {
            return Err(Error::Validation(format!(
                "quadrivariate POVM needs 16 effects, got {}",
                effects.len()
            )));
        }
        Povm::with_labels(effects.clone(), quad_labels(), tol)?;
        Ok(Self { grid: effects })
    }

    pub fn index(outcome: [usize; 4]) -> usize {
        ((outcome[0] * 2 + outcome[1]) * 2 + outcome[2]) * 2 + outcome[3]
    }

    pub fn outcome(index: usize) -> [usize; 4] {
        [(index >> 3) & 1, (index >> 2) & 1, (index >> 1) & 1, index & 1]
    }

    pub fn effect(&self, outcome: [usize; 4]) -> &Operator {
        &self.grid[Self::index(outcome)]
    }

    pub fn dim(&self) -> usize {
        self.grid[0].dim()
    }

    pub fn flatten(&self) -> Povm {
        Povm {
            effects: self.grid.clone(),
            outcome_labels: quad_labels(),
        }
    }

    /// Distribution with shape `[2, 2, 2, 2]`.
    pub fn distribution(&self, rho: &DensityOperator) -> Result<OutcomeDistribution> {
        let flat = distribution(rho, &self.flatten())?;
        OutcomeDistribution::new(flat.probabilities, vec![2, 2, 2, 2])
    }
}

fn outcome_label(i: usize) -> &'static str {
    if i == 0 {
        PLUS
    } else {
        MINUS
    }
}

fn quad_labels() -> Vec<String> {
    (0..16)
        .map(|k| {
            QuadrivariatePovm::outcome(k)
                .iter()
                .map(|&i| outcome_label(i))
                .collect()
        })
        .collect()
}

/// Bivariate marginal over the axis pair `(axis_i, axis_j)`, summing the other two.
pub fn marginal_pair(q: &QuadrivariatePovm, axis_i: QuadAxis, axis_j: QuadAxis) -> Result<BivariatePovm> {
    if axis_i == axis_j {
        return Err(Error::Validation(format!(
            "marginal axes must differ (both {})",
            axis_i.name()
        )));
    }
    let dim = q.dim();
    let mut grid = vec![vec![Operator::zeros(dim), Operator::zeros(dim)]; 2];
    for k in 0..16 {
        let outcome = QuadrivariatePovm::outcome(k);
        let (a, b) = (outcome[axis_i as usize], outcome[axis_j as usize]);
        grid[a][b] = &grid[a][b] + &q.grid[k];
    }
    let labels = || vec![PLUS.to_string(), MINUS.to_string()];
    Ok(BivariatePovm {
        rows: 2,
        cols: 2,
        grid: grid.into_iter().flatten().collect(),
        row_labels: labels(),
        col_labels: labels(),
    })
}
