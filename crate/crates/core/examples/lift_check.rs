//! A balanced multi-species functional evaluated on a lifted path equals
//! the single-species functional of its beta reduction.

use msglass::mixture::random::random_balanced_spec;
use msglass::mixture::{build_mixture, reduce_beta};
use msglass::parisi::{
    ising_functional, lift_path, spherical_functional, IsingOptions, ParisiPath,
};
use msglass::{seeding, MixtureFunction, Result};

fn main() -> Result<()> {
    let mut rng = seeding::stream(11, &[]);
    let spec = random_balanced_spec(&mut rng, 3, 3);
    println!("random balanced spec: lambda {:?}", spec.lambda_values());
    let multi = build_mixture(&spec, None)?;
    let single = MixtureFunction::single_species(reduce_beta(&spec).as_slice());
    let path = ParisiPath::single(vec![0.0, 0.4, 1.0], vec![0.0, 0.3, 0.8, 1.0])?;
    let lifted = lift_path(&path, spec.species_count())?;
    let a = spherical_functional(&multi, &lifted)?.value;
    let b = spherical_functional(&single, &path)?.value;
    println!(
        "spherical: multi {a:.12}, single {b:.12}, residual {:.2e}",
        (a - b).abs()
    );
    let opts = IsingOptions::default();
    let a = ising_functional(&multi, &lifted, &opts)?.value;
    let b = ising_functional(&single, &path, &opts)?.value;
    println!(
        "Ising:     multi {a:.12}, single {b:.12}, residual {:.2e}",
        (a - b).abs()
    );
    Ok(())
}
