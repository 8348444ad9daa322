//! Finite-N experiments: disorder sampling, Hamiltonians, exact Ising
//! enumeration, spherical ground-state search, and Monte Carlo checks of
//! the covariance structure and comparison inequalities.

mod checks;
mod config;
mod disorder;
mod hamiltonian;
mod ising;
mod spherical;

pub use checks::{
    concentration_check, covariance_check, ising_disorder_average, lipschitz_bound_check,
    spherical_gse_average, sup_on_cube, ConcentrationReport, CovariancePair, CovarianceReport,
    GseAverage, IsingAverage, LipschitzReport, LIPSCHITZ_MAX_N,
};
pub use config::{overlap, Configuration};
pub use disorder::{Block, DisorderSample, DEFAULT_ENTRY_BUDGET};
pub use hamiltonian::{hamiltonian, hamiltonian_gradient};
pub use ising::{ising_exact_free_energy, ising_naive_free_energy, ISING_EXACT_MAX_N};
pub use spherical::{spherical_gse_search, GseOptions, GseResult, STALL_TOL};

use crate::seeding::{self, tag};

/// Seed of disorder replica `r` under a master seed.
pub fn replica_seed(master: u64, r: usize) -> u64 {
    seeding::derive(master, &[tag::REPLICA, r as u64])
}
