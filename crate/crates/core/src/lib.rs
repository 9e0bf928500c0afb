//! Recurrence classification and passage-time moments for Markov chains on
//! half-strips `R+ x S` whose drift is of (generalized) Lamperti type.
//!
//! The analytic pipeline runs
//! [`drift::fit_asymptotics`] → [`drift::check_regime`] →
//! [`classify`] (constant drift, Lamperti, or generalized Lamperti through the
//! drift-eliminating shift `X + a_eta`) → [`classify::moment_threshold`].
//! Every verdict can be cross-checked by [`lyapunov`] increment estimates and by
//! the Monte Carlo engine in [`sim`].
//!
//! The linear algebra on the modulating chain and the decision rules are generic
//! over the scalar type ([`Field`] for exact arithmetic such as rationals,
//! [`Real`] where roots and powers are needed). Kernels and simulation work in
//! `f64`; the aliases at the crate root fix that choice.

pub mod classify;
pub mod cli;
pub mod drift;
pub mod error;
pub mod lyapunov;
pub mod markov_core;
pub mod model;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

pub use classify::{Classification, MomentReport, Verdict};
pub use drift::RegimeTag;
pub use model::{ChainModel, Kernel, State};

/// Limiting transition matrix of the modulating chain, in `f64`.
pub type Matrix = markov_core::StochasticMatrix<f64>;
/// Stationary distribution of [`Matrix`].
pub type Stationary = markov_core::StationaryDistribution<f64>;
/// Solution `a` of the Poisson system `d_i + sum_j (a_j - a_i) q_ij = 0`.
pub type Poisson = markov_core::PoissonSolution<f64>;
/// Generalized-Lamperti coefficients `(d, e, t2, d_ij, gamma_ij, q_ij, pi)`.
pub type Coefficients = drift::AsymptoticCoefficients<f64>;
/// Lamperti coefficients `(c, s2, q_ij, pi)`.
pub type Lamperti = classify::LampertiCoefficients<f64>;
/// Lyapunov function parameters `(nu, b, x0)`.
pub type Lyapunov = lyapunov::LyapunovSpec<f64>;
