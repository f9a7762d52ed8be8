//! Concrete polarization experiments.
//!
//! A which-way measurement sends a photon through a nonpolarizing mirror
//! (transmission probability `γ`) to one of two linear analyzers at `θ`
//! (transmitted branch, detector `D`) and `θ'` (reflected branch, detector
//! `D'`). The row outcome `m` records `D`, the column outcome `n` records
//! `D'`; `+` is a detection, `-` a non-detection. Two such arms acting on an
//! entangled photon pair form the generalized EPR-Bell experiment; its four
//! corners `γ1, γ2 ∈ {0, 1}` are the ordinary Aspect arrangements.

use crate::error::{Error, Result};
use crate::nonideality::{
    joint_nonideal_decomposition, martens_bound, row_entropy_measure, NonidealityMatrix,
    MARTENS_SLACK_TOL,
};
use crate::operator::Operator;
use crate::povm::{BivariatePovm, OutcomeDistribution, QuadAxis, QuadrivariatePovm, MINUS, PLUS};
use crate::rng::Mcg64;
use crate::state::{polarization_projector, polarization_pvm, DensityOperator};

/// Bound on `|S|` for statistics drawn from one joint distribution.
pub const CHSH_LOCAL_BOUND: f64 = 2.0;
pub const CHSH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhichWayConfig {
    pub theta: f64,
    pub theta_prime: f64,
    pub gamma: f64,
}

impl WhichWayConfig {
    pub fn new(theta: f64, theta_prime: f64, gamma: f64) -> Result<Self> {
        let config = Self {
            theta,
            theta_prime,
            gamma,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Validation(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if !self.theta.is_finite() || !self.theta_prime.is_finite() {
            return Err(Error::Validation("analyzer angles must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprBellConfig {
    pub arm1: WhichWayConfig,
    pub arm2: WhichWayConfig,
}

impl EprBellConfig {
    pub fn new(arm1: WhichWayConfig, arm2: WhichWayConfig) -> Result<Self> {
        arm1.validate()?;
        arm2.validate()?;
        Ok(Self { arm1, arm2 })
    }
}

fn pm_labels() -> Vec<String> {
    vec![PLUS.to_string(), MINUS.to_string()]
}

/// The 2×2 which-way grid
/// `[[O, γE^θ_+], [(1-γ)E^θ'_+, I - γE^θ_+ - (1-γ)E^θ'_+]]`.
///
/// Absorption in either analyzer falls in the `(-, -)` cell; `(+, +)` is
/// exactly zero.
pub fn whichway_povm(c: &WhichWayConfig) -> Result<BivariatePovm> {
    c.validate()?;
    let transmitted = polarization_projector(c.theta).scale_real(c.gamma);
    let reflected = polarization_projector(c.theta_prime).scale_real(1.0 - c.gamma);
    let neither = &(&Operator::identity(2) - &transmitted) - &reflected;
    BivariatePovm::new(
        vec![
            vec![Operator::zeros(2), transmitted],
            vec![reflected, neither],
        ],
        pm_labels(),
        pm_labels(),
    )
}

/// Recovers `(λ, μ)` for the which-way grid against the polarization PVMs
/// at `θ` and `θ'`.
pub fn whichway_nonideality(c: &WhichWayConfig) -> Result<(NonidealityMatrix, NonidealityMatrix)> {
    let grid = whichway_povm(c)?;
    joint_nonideal_decomposition(&grid, &polarization_pvm(c.theta), &polarization_pvm(c.theta_prime))
}

/// Closed-form which-way nonideality matrices
/// `λ = [[γ, 0], [1-γ, 1]]`, `μ = [[1-γ, 0], [γ, 1]]`.
pub fn whichway_nonideality_exact(gamma: f64) -> Result<(NonidealityMatrix, NonidealityMatrix)> {
    let lambda = NonidealityMatrix::exact(vec![vec![gamma, 0.0], vec![1.0 - gamma, 1.0]])?;
    let mu = NonidealityMatrix::exact(vec![vec![1.0 - gamma, 0.0], vec![gamma, 1.0]])?;
    Ok((lambda, mu))
}

/// One point of the `J(λ)` versus `J(μ)` curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MartensRow {
    pub gamma: f64,
    pub j_lambda: f64,
    pub j_mu: f64,
    pub bound: f64,
    /// `j_lambda + j_mu - bound`.
    pub slack: f64,
}

/// Evaluates the which-way experiment on the uniform grid
/// `γ = k / (n_points - 1)`.
pub fn martens_sweep(theta: f64, theta_prime: f64, n_points: usize) -> Result<Vec<MartensRow>> {
    if n_points < 2 {
        return Err(Error::Validation(format!(
            "a sweep needs at least 2 points, got {n_points}"
        )));
    }
    let bound = martens_bound(&polarization_pvm(theta), &polarization_pvm(theta_prime))?;
    (0..n_points)
        .map(|k| {
            let gamma = k as f64 / (n_points - 1) as f64;
            let (lambda, mu) = whichway_nonideality(&WhichWayConfig::new(theta, theta_prime, gamma)?)?;
            let j_lambda = row_entropy_measure(&lambda);
            let j_mu = row_entropy_measure(&mu);
            Ok(MartensRow {
                gamma,
                j_lambda,
                j_mu,
                bound,
                slack: j_lambda + j_mu - bound,
            })
        })
        .collect()
}

/// True iff every sweep row satisfies the Martens inequality.
pub fn sweep_satisfies_martens(rows: &[MartensRow]) -> bool {
    rows.iter().all(|r| r.slack >= -MARTENS_SLACK_TOL)
}

/// `R_{m1 n1 m2 n2} = R^(1)_{m1 n1} ⊗ R^(2)_{m2 n2}` on the two-photon space.
pub fn eprbell_povm(c: &EprBellConfig) -> Result<QuadrivariatePovm> {
    let arm1 = whichway_povm(&c.arm1)?;
    let arm2 = whichway_povm(&c.arm2)?;
    let effects = (0..16)
        .map(|k| {
            let [m1, n1, m2, n2] = QuadrivariatePovm::outcome(k);
            arm1.effect(m1, n1).tensor(arm2.effect(m2, n2))
        })
        .collect();
    QuadrivariatePovm::new(effects)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    /// `E(a,b), E(a,b'), E(a',b), E(a',b')`.
    pub correlations: [f64; 4],
    pub s_value: f64,
    pub violates: bool,
}

impl ChshResult {
    /// `S = E(a,b) - E(a,b') + E(a',b) + E(a',b')`.
    pub fn from_correlations(correlations: [f64; 4]) -> Self {
        let [ab, ab2, a2b, a2b2] = correlations;
        let s_value = ab - ab2 + a2b + a2b2;
        Self {
            correlations,
            s_value,
            violates: s_value.abs() > CHSH_LOCAL_BOUND + CHSH_TOL,
        }
    }
}

fn outcome_value(i: usize) -> f64 {
    if i == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Σ p(m1,n1,m2,n2) v_i v_j` with `+ ↦ +1`, `- ↦ -1`.
pub fn pair_correlation(dist: &OutcomeDistribution, axis_i: QuadAxis, axis_j: QuadAxis) -> f64 {
    assert_eq!(dist.shape(), &[2, 2, 2, 2], "expected a quadrivariate distribution");
    dist.probabilities()
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let outcome = QuadrivariatePovm::outcome(k);
            p * outcome_value(outcome[axis_i as usize]) * outcome_value(outcome[axis_j as usize])
        })
        .sum()
}

/// CHSH over the four cross-arm pairs of one quadrivariate distribution.
pub fn chsh_from_distribution(dist: &OutcomeDistribution) -> ChshResult {
    use QuadAxis::*;
    ChshResult::from_correlations([
        pair_correlation(dist, M1, M2),
        pair_correlation(dist, M1, N2),
        pair_correlation(dist, N1, M2),
        pair_correlation(dist, N1, N2),
    ])
}

/// CHSH evaluated within a single setup. All four correlations come from one
/// joint distribution, so `|S| ≤ 2` always.
pub fn chsh_single_setup(rho: &DensityOperator, c: &EprBellConfig) -> Result<ChshResult> {
    let dist = eprbell_povm(c)?.distribution(rho)?;
    Ok(chsh_from_distribution(&dist))
}

/// CHSH assembled from the four Aspect corners, each contributing one
/// correlation from its own distribution.
///
/// An arm at `γ = 1` measures its transmitted observable (axis `m`, angle
/// `θ`); at `γ = 0` its reflected one (axis `n`, angle `θ'`).
pub fn chsh_pasted_aspect(
    rho: &DensityOperator,
    theta1: f64,
    theta1_prime: f64,
    theta2: f64,
    theta2_prime: f64,
) -> Result<ChshResult> {
    use QuadAxis::*;
    let corner = |gamma1: f64, gamma2: f64, axis1: QuadAxis, axis2: QuadAxis| -> Result<f64> {
        let config = EprBellConfig::new(
            WhichWayConfig::new(theta1, theta1_prime, gamma1)?,
            WhichWayConfig::new(theta2, theta2_prime, gamma2)?,
        )?;
        let dist = eprbell_povm(&config)?.distribution(rho)?;
        Ok(pair_correlation(&dist, axis1, axis2))
    };
    Ok(ChshResult::from_correlations([
        corner(1.0, 1.0, M1, M2)?,
        corner(1.0, 0.0, M1, N2)?,
        corner(0.0, 1.0, N1, M2)?,
        corner(0.0, 0.0, N1, N2)?,
    ]))
}

#[derive(Debug, Clone)]
pub struct SampleReport {
    pub exact: OutcomeDistribution,
    pub empirical: OutcomeDistribution,
    pub counts: Vec<u64>,
    pub total_variation: f64,
}

impl SampleReport {
    /// `3 sqrt(ln 16 / n)`, asserted for `n ≥ 10^5`.
    pub fn tv_threshold(&self) -> f64 {
        tv_threshold(self.counts.iter().sum())
    }
}

pub fn tv_threshold(n_samples: u64) -> f64 {
    3.0 * (16f64.ln() / n_samples as f64).sqrt()
}

/// Draws `n_samples` i.i.d. quadruples `(m1, n1, m2, n2)` from the exact
/// distribution and compares the empirical frequencies with it.
pub fn quadruple_sample_check(
    rho: &DensityOperator,
    c: &EprBellConfig,
    n_samples: u64,
    seed: u64,
) -> Result<SampleReport> {
    if n_samples == 0 {
        return Err(Error::Validation("n_samples must be at least 1".into()));
    }
    let exact = eprbell_povm(c)?.distribution(rho)?;
    let mut rng = Mcg64::new(seed);
    let mut counts = vec![0u64; 16];
    for _ in 0..n_samples {
        counts[rng.sample_index(exact.probabilities())] += 1;
    }
    let empirical = OutcomeDistribution::new(
        counts.iter().map(|&k| k as f64 / n_samples as f64).collect(),
        vec![2, 2, 2, 2],
    )?;
    let total_variation = exact.total_variation(&empirical);
    Ok(SampleReport {
        exact,
        empirical,
        counts,
        total_variation,
    })
}
