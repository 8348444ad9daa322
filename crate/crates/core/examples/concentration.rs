//! Spread of the spherical ground state across disorders.

use msglass::mixture::models;
use msglass::simulate::{concentration_check, GseOptions};
use msglass::{FiniteSizes, Result};

fn main() -> Result<()> {
    let spec = models::bipartite_sk(1.0);
    for d in [10, 20, 40] {
        let r = concentration_check(
            &spec,
            &FiniteSizes::new(vec![d, d])?,
            200,
            9,
            &GseOptions {
                restarts: 4,
                ..Default::default()
            },
        )?;
        println!(
            "N {:>2}: mean {:.4}, std {:.4}, std*sqrt(N) {:.3}, exceedances at t={:.3}: {} (bound {:.2e})",
            r.n,
            r.mean,
            r.std,
            r.std * (r.n as f64).sqrt(),
            r.t,
            r.exceedances,
            r.bound
        );
    }
    Ok(())
}
