//! Injective norm of a Gaussian tensor against the ground state of the
//! translated multi-species spin glass.

use msglass::tensor::{correspondence_check, translate_to_model};
use msglass::Result;

fn main() -> Result<()> {
    let (spec, sizes) = translate_to_model(3, 6)?;
    println!(
        "p = 3 translation: {:?} with blocks {:?}",
        spec.interactions(),
        sizes.block_sizes()
    );
    for (p, d) in [(2, 10), (3, 8)] {
        let r = correspondence_check(p, d, 50, 10, 1)?;
        println!(
            "p {p}, d {d}: tensor {:.4} +- {:.4}, spin {:.4} +- {:.4}, z {:+.2}",
            r.tensor.mean, r.tensor.stderr, r.spin.mean, r.spin.stderr, r.z
        );
    }
    Ok(())
}
