//! Optimise Ising and spherical Parisi functionals over k-level paths.

use msglass::mixture::{build_mixture, models, reduce_beta};
use msglass::parisi::{optimize_path, Ensemble, OptimizeOptions};
use msglass::reference::bipartite_sk_free_energy;
use msglass::{MixtureFunction, Result};

fn main() -> Result<()> {
    let opts = OptimizeOptions::default();
    for beta in [0.5, 1.0, 1.5] {
        let f = build_mixture(&models::sk(beta), None)?;
        let r = optimize_path(&f, Ensemble::Ising, 2, &opts)?;
        println!("Ising SK beta {beta}: ladder {:?}", r.ladder);
        println!("  q = {:?}, m = {:?}", r.path.q(), r.path.m());
    }
    // Bipartite SK is balanced, so its value is the single-species
    // functional of the reduced mixture. Free species-dependent paths are
    // not a bound here: the model is not convex and their minimum falls
    // below the free energy.
    for beta in [0.5, 1.0, 2.0] {
        let spec = models::bipartite_sk(beta);
        let reduced = MixtureFunction::single_species(reduce_beta(&spec).as_slice());
        let r = optimize_path(&reduced, Ensemble::Spherical, 2, &opts)?;
        let free = optimize_path(&build_mixture(&spec, None)?, Ensemble::Spherical, 2, &opts)?;
        println!(
            "spherical bipartite SK beta {beta}: reduced {:.8}, closed form {:.8}, free two-species minimum {:.3e}",
            r.value.value,
            bipartite_sk_free_energy(beta)?,
            free.value.value
        );
    }
    Ok(())
}
