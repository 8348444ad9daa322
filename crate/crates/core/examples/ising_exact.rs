//! Exact Ising free energies by Gray-code enumeration, against the
//! annealed bound and the Parisi value.

use msglass::mixture::{build_mixture, models};
use msglass::parisi::{optimize_path, Ensemble, OptimizeOptions};
use msglass::simulate::ising_disorder_average;
use msglass::{FiniteSizes, Result};

fn main() -> Result<()> {
    for beta in [0.4, 1.0, 2.0] {
        let spec = models::sk(beta);
        let parisi = optimize_path(
            &build_mixture(&spec, None)?,
            Ensemble::Ising,
            2,
            &OptimizeOptions::default(),
        )?;
        println!("SK beta {beta}: Parisi value {:.5}", parisi.value.value);
        for n in [8, 12, 16] {
            let r = ising_disorder_average(&spec, &FiniteSizes::new(vec![n])?, 100, 1)?;
            println!(
                "  N {n:>2}: F = {:.5} +- {:.5}, annealed {:.5}, every sample below: {}",
                r.summary.mean, r.summary.stderr, r.annealed, r.strictly_below_annealed
            );
        }
    }
    Ok(())
}
