//! Model algebra: species configuration, interaction strengths, covariance
//! polynomials, the balanced condition and the single-species reductions.

mod balance;
mod function;
pub mod io;
pub mod models;
pub mod random;
mod spec;

pub use balance::{
    check_balanced, diagonal_lift, key_inequality_margin, reduce_beta, BalanceReport, BetaSquares,
    KeyMargin, DEFAULT_BALANCE_TOL,
};
pub use function::{build_mixture, MixtureFunction, Monomial};
pub use spec::{FiniteSizes, Fraction, ModelSpec, Multiset};
