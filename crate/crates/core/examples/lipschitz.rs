//! Free-energy differences between two models against the sup of their
//! mixture difference.

use msglass::mixture::{diagonal_lift, models};
use msglass::simulate::lipschitz_bound_check;
use msglass::{FiniteSizes, Result};

fn main() -> Result<()> {
    let r = lipschitz_bound_check(
        &models::sk(0.3),
        &models::sk(0.5),
        &FiniteSizes::new(vec![12])?,
        200,
        1,
    )?;
    println!("SK 0.3 vs 0.5: {r:#?}");
    let bip = models::bipartite_sk(0.8);
    let r = lipschitz_bound_check(
        &bip,
        &diagonal_lift(&bip),
        &FiniteSizes::new(vec![8, 8])?,
        200,
        2,
    )?;
    println!("bipartite SK vs its diagonal lift: {r:#?}");
    Ok(())
}
