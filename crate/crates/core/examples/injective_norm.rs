//! Injective norms of Gaussian tensors by multi-start alternating
//! maximisation, plus a GTEN round trip.

use msglass::tensor::{asymptote, injective_norm_estimate, GaussianTensor, InjectiveOptions};
use msglass::Result;

fn main() -> Result<()> {
    for (p, d) in [(2, 10), (2, 20), (2, 40), (3, 8), (3, 12)] {
        let values: Vec<f64> = (0..10)
            .map(|i| {
                let t = GaussianTensor::generate(p, d, i)?;
                Ok(injective_norm_estimate(
                    &t,
                    &InjectiveOptions {
                        seed: i,
                        ..Default::default()
                    },
                )?
                .value
                    / (d as f64).sqrt())
            })
            .collect::<Result<_>>()?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        println!(
            "p {p}, d {d:>2}: mean ||T||/sqrt(d) = {mean:.4}, limit {:.4}",
            asymptote(p)?
        );
    }
    let t = GaussianTensor::generate(3, 5, 42)?;
    let path = std::env::temp_dir().join("msglass-example.gten");
    t.save(&path)?;
    let back = GaussianTensor::load(&path)?;
    println!(
        "GTEN round trip identical: {}",
        back.entries() == t.entries()
    );
    std::fs::remove_file(path)?;
    Ok(())
}
