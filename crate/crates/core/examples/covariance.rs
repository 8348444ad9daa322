//! Sample covariance of H(sigma), H(tau) over disorders against N xi_N(R).

use msglass::mixture::models;
use msglass::simulate::covariance_check;
use msglass::{FiniteSizes, Result};

fn main() -> Result<()> {
    let spec = models::pure_bipartite(1, 2, 1.0);
    let sizes = FiniteSizes::new(vec![6, 12])?;
    let r = covariance_check(&spec, &sizes, 8, 3000, 5)?;
    for p in &r.pairs {
        println!(
            "R = {:?}: expected {:.4}, estimate {:.4} +- {:.4} (z {:+.2})",
            p.overlap
                .iter()
                .map(|x| (x * 1e3).round() / 1e3)
                .collect::<Vec<_>>(),
            p.expected,
            p.estimate,
            p.stderr,
            p.z
        );
    }
    println!("max |z| = {:.2}, holds: {}", r.max_abs_z, r.holds);
    Ok(())
}
