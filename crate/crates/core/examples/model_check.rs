//! Build, validate and reduce multi-species models.
//!
//! Run with `cargo run --example model_check [model.json]`.

use msglass::mixture::{
    build_mixture, check_balanced, diagonal_lift, io, key_inequality_margin, models, reduce_beta,
};
use msglass::{ModelSpec, Result};

fn describe(name: &str, spec: &ModelSpec) -> Result<()> {
    let report = check_balanced(spec, 1e-10);
    let xi = build_mixture(spec, None)?;
    println!(
        "{name}: species {:?}, lambda {:?}",
        spec.species(),
        spec.lambda_values()
    );
    println!(
        "  balanced: {} (max discrepancy {:.2e})",
        report.balanced, report.max_discrepancy
    );
    println!(
        "  xi(1) = {:.6}",
        xi.eval(&vec![1.0; spec.species_count()])?
    );
    for (p, b) in reduce_beta(spec).iter() {
        println!("  beta_{p}^2 = {b:.6}");
    }
    if report.balanced {
        let lift = diagonal_lift(spec);
        println!("  diagonal lift: {:?}", lift.interactions());
        let grid: Vec<Vec<f64>> = (0..=20)
            .flat_map(|i| (0..=20).map(move |j| vec![i as f64 / 20.0, j as f64 / 20.0]))
            .filter(|_| spec.species_count() == 2)
            .collect();
        if !grid.is_empty() {
            let m = key_inequality_margin(spec, &grid)?;
            println!(
                "  key inequality: min margin {:.3e} at {:?}",
                m.min_margin, m.argmin
            );
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    if let Some(path) = std::env::args().nth(1) {
        return describe(&path, &io::load(&path)?);
    }
    describe("bipartite SK (beta 1)", &models::bipartite_sk(1.0))?;
    describe("pure (1,2) bipartite", &models::pure_bipartite(1, 2, 1.0))?;
    let spec = io::from_json(
        r#"{ "species": ["a", "b"], "lambda": ["1/2", "1/2"],
             "interactions": [ { "species": ["a", "a"], "delta_sq": 1 }, { "species": ["b", "b"], "delta_sq": 2 } ] }"#,
    )?;
    describe("unequal diagonal", &spec)?;
    println!(
        "\nJSON form of the bipartite model:\n{}",
        io::to_json(&models::bipartite_sk(1.0))
    );
    Ok(())
}
