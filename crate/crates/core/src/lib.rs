//! Generalized quantum measurement toolkit.
//!
//! Builds POVMs from explicit measurement models, quantifies how far a
//! measurement is from ideal through stochastic nonideality matrices and
//! their average row entropy, and checks the Martens, Heisenberg and CHSH
//! inequalities on polarization experiments.
//!
//! - [`operator`], [`eig`]: small dense complex linear algebra.
//! - [`state`]: density operators, PVMs, polarization projectors.
//! - [`povm`]: validated POVMs and bivariate/quadrivariate outcome grids.
//! - [`nonideality`]: nonideality recovery, entropy measure, inequality reports.
//! - [`premeasurement`]: POVMs induced by object–apparatus interactions.
//! - [`experiments`]: which-way and EPR-Bell polarization experiments.

pub mod eig;
pub mod error;
pub mod experiments;
pub mod nonideality;
pub mod operator;
pub mod povm;
pub mod premeasurement;
pub mod rng;
pub mod simplex;
pub mod state;

pub use error::{Error, Result};
pub use operator::{c64, Operator, DEFAULT_TOL};
