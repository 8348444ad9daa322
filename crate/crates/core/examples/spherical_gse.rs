//! Spherical ground states of the bipartite SK model at growing N.

use msglass::mixture::models;
use msglass::simulate::{spherical_gse_average, GseOptions};
use msglass::{FiniteSizes, Result};

fn main() -> Result<()> {
    let spec = models::bipartite_sk(1.0);
    println!("single-species reference: {:.6}", 2f64.sqrt());
    for d in [10, 20, 40, 80] {
        let sizes = FiniteSizes::new(vec![d, d])?;
        let r = spherical_gse_average(
            &spec,
            &sizes,
            20,
            3,
            &GseOptions {
                restarts: 4,
                ..Default::default()
            },
        )?;
        println!(
            "N {:>3}: max H/N = {:.5} +- {:.5}",
            2 * d,
            r.summary.mean,
            r.summary.stderr
        );
    }
    Ok(())
}
