//! Numerical toolkit for balanced multi-species mean-field spin glasses.
//!
//! The crate is organised around five layers:
//!
//! - [`mixture`]: model specifications (species ratios and interaction
//!   strengths), covariance polynomials, the balanced condition and the
//!   single-species reduction.
//! - [`parisi`]: Ising and spherical Parisi functionals over discrete
//!   order parameters, their optimisation and zero-temperature extrapolation.
//! - [`reference`]: closed-form and low-dimensional variational reference
//!   values (bipartite spherical SK, the two-parameter pure bound, `E0(p)`).
//! - [`simulate`]: finite-N experiments (exact Ising enumeration, spherical
//!   ground-state search, covariance / Lipschitz / concentration checks).
//! - [`tensor`]: injective norms of Gaussian tensors and their translation
//!   into a multi-species ground-state problem.
//!
//! The [`cli`] module backs the `msglass` binary; every capability is also
//! shown as a runnable program under `examples/`.

pub mod cli;
pub mod error;
pub mod mixture;
pub mod optim;
pub mod parisi;
pub mod quadrature;
pub mod reference;
pub mod seeding;
pub mod simulate;
pub mod stats;
pub mod tensor;

pub use error::{Error, Result};
pub use mixture::{FiniteSizes, MixtureFunction, ModelSpec};
pub use parisi::{Ensemble, ParisiPath};
