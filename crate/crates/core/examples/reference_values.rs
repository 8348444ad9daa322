//! Closed-form and low-dimensional reference values.

use msglass::mixture::{build_mixture, models};
use msglass::reference::{
    annealed_bound, bipartite_sk_free_energy, e0_extrapolation, pure_bound_argmin,
    sk_critical_check, E0Options,
};
use msglass::Result;

fn main() -> Result<()> {
    for beta in [0.2, std::f64::consts::FRAC_1_SQRT_2, 1.0, 2.0] {
        let (m, a, v) = pure_bound_argmin(beta, 1, 1)?;
        println!(
            "beta {beta:.4}: bipartite {:.8}, two-parameter bound {v:.8} at m {m:.4}, a {a:.4}",
            bipartite_sk_free_energy(beta)?
        );
    }
    for p in [2, 3, 4] {
        let e = e0_extrapolation(p, &E0Options::default())?;
        println!(
            "E0({p}) = {:.6} (fit residual {:.1e}, monotone {})",
            e.limit, e.residual_rms, e.monotone
        );
    }
    let f = build_mixture(&models::pure_bipartite(2, 2, 1.3), None)?;
    println!(
        "annealed bound of pure (2,2) at beta 1.3: {}",
        annealed_bound(&f)
    );
    let crit = sk_critical_check(&models::bipartite_sk(std::f64::consts::FRAC_1_SQRT_2))?;
    println!("critical surface check for bipartite SK at 1/sqrt 2: {crit}");
    Ok(())
}
