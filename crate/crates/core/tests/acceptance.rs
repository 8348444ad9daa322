//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Integer arguments select a subset, e.g.
//! `cargo test --test acceptance -- 3 5`.

use std::time::Instant;

use msglass::mixture::random::random_balanced_spec;
use msglass::mixture::{build_mixture, key_inequality_margin, models, reduce_beta, Fraction};
use msglass::parisi::{
    ising_functional, lift_path, spherical_functional, IsingOptions, ParisiPath,
};
use msglass::reference::{
    bipartite_sk_free_energy, e0_extrapolation, pure_bound_2param, E0Options,
};
use msglass::seeding;
use msglass::simulate::{
    covariance_check, ising_disorder_average, lipschitz_bound_check, spherical_gse_search,
    DisorderSample, GseOptions,
};
use msglass::tensor::{
    correspondence_check, injective_norm_estimate, GaussianTensor, InjectiveOptions,
};
use msglass::{FiniteSizes, MixtureFunction, ModelSpec};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_single_path(rng: &mut impl Rng) -> ParisiPath {
    let k = rng.random_range(1..=3usize);
    let mut m: Vec<f64> = (0..k - 1).map(|_| rng.random_range(0.02..0.98)).collect();
    m.sort_by(f64::total_cmp);
    m.dedup();
    m.insert(0, 0.0);
    m.push(1.0);
    let k = m.len() - 1;
    let mut q: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
    q.sort_by(f64::total_cmp);
    q.insert(0, 0.0);
    q.push(1.0);
    ParisiPath::single(m, q).unwrap()
}

fn criterion_1() -> Outcome {
    let mut worst_sph: f64 = 0.0;
    let mut worst_ising: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = seeding::stream(2024, &[i]);
        let s = rng.random_range(2..=3usize);
        let spec = random_balanced_spec(&mut rng, s, 4);
        let multi = build_mixture(&spec, None).unwrap();
        let single = MixtureFunction::single_species(reduce_beta(&spec).as_slice());
        for _ in 0..20 {
            let path = random_single_path(&mut rng);
            let lifted = lift_path(&path, s).unwrap();
            let a = spherical_functional(&multi, &lifted).unwrap().value;
            let b = spherical_functional(&single, &path).unwrap().value;
            worst_sph = worst_sph.max((a - b).abs());
            let opts = IsingOptions::default();
            let a = ising_functional(&multi, &lifted, &opts).unwrap().value;
            let b = ising_functional(&single, &path, &opts).unwrap().value;
            worst_ising = worst_ising.max((a - b).abs());
        }
    }
    Outcome {
        pass: worst_sph <= 1e-8 && worst_ising <= 5e-3,
        detail: format!("max spherical residual {worst_sph:.2e} (tol 1e-8), max Ising residual {worst_ising:.2e} (tol 5e-3)"),
    }
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in [0.2, std::f64::consts::FRAC_1_SQRT_2, 1.0, 2.0, 5.0] {
        let a = pure_bound_2param(beta, 1, 1).unwrap();
        let b = bipartite_sk_free_energy(beta).unwrap();
        worst = worst.max((a - b).abs());
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("max |two-parameter bound - closed form| = {worst:.2e} (tol 1e-6)"),
    }
}

fn criterion_3() -> Outcome {
    let e = e0_extrapolation(2, &E0Options::default()).unwrap();
    let rel = (e.limit - std::f64::consts::SQRT_2).abs() / std::f64::consts::SQRT_2;
    Outcome {
        pass: rel <= 0.01,
        detail: format!(
            "extrapolated E0(2) = {:.8}, relative error {rel:.2e} (tol 1e-2)",
            e.limit
        ),
    }
}

fn criterion_4() -> Outcome {
    let spec = ModelSpec::with_numbered_species(
        vec![
            Fraction::exact(1, 5),
            Fraction::exact(2, 5),
            Fraction::exact(2, 5),
        ],
        vec![
            (vec![0], 0.4),
            (vec![0, 1], 1.0),
            (vec![2, 2], 0.8),
            (vec![1, 2], 0.5),
            (vec![0, 1, 2], 1.5),
            (vec![1, 1, 2], 0.6),
        ],
    )
    .unwrap();
    let sizes = FiniteSizes::new(vec![6, 12, 12]).unwrap();
    let r = covariance_check(&spec, &sizes, 20, 5000, 77).unwrap();
    Outcome {
        pass: r.holds,
        detail: format!(
            "S = 3, N = {}, {} pairs x {} disorders: max |z| = {:.2} (tol 4)",
            r.n,
            r.pairs.len(),
            r.n_disorders,
            r.max_abs_z
        ),
    }
}

fn criterion_5() -> Outcome {
    let sizes = FiniteSizes::new(vec![12]).unwrap();
    let low = ising_disorder_average(&models::sk(3.0), &sizes, 100, 5).unwrap();
    let max = low
        .free_energies
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut means_ok = true;
    let mut notes = Vec::new();
    for beta in [0.5, 1.0, 3.0] {
        let r = ising_disorder_average(&models::sk(beta), &sizes, 400, 6).unwrap();
        means_ok &= r.mean_below_annealed;
        notes.push(format!(
            "beta {beta}: mean {:.4} +- {:.4} < {:.4}",
            r.summary.mean, r.summary.stderr, r.annealed
        ));
    }
    Outcome {
        pass: low.strictly_below_annealed && means_ok,
        detail: format!(
            "SK beta 3, N 12, 100 disorders: max F = {max:.4} < {:.4} in every sample: {}; disorder means: {}",
            low.annealed,
            low.strictly_below_annealed,
            notes.join(", ")
        ),
    }
}

fn criterion_6() -> Outcome {
    let sk12 = FiniteSizes::new(vec![12]).unwrap();
    let bip = models::bipartite_sk(0.8);
    let bip16 = FiniteSizes::proportional(&bip, 16).unwrap();
    let lift = msglass::mixture::diagonal_lift(&bip);
    let pairs = [
        (
            "SK 0.5 vs itself",
            models::sk(0.5),
            models::sk(0.5),
            sk12.clone(),
        ),
        ("SK 0.3 vs SK 0.5", models::sk(0.3), models::sk(0.5), sk12),
        ("bipartite SK 0.8 vs its diagonal lift", bip, lift, bip16),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, a, b, sizes) in pairs {
        let r = lipschitz_bound_check(&a, &b, &sizes, 200, 31).unwrap();
        pass &= r.holds && r.one_sided_holds;
        notes.push(format!(
            "{name} (N {}): |dF| {:.4} +- {:.4} <= {:.4}, one-sided {:.4} <= {:.4}",
            r.n,
            r.mean_difference.abs(),
            r.stderr,
            r.sup_abs_difference,
            r.one_sided_lhs,
            r.one_sided_rhs
        ));
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn criterion_7() -> Outcome {
    let mut worst_margin = f64::INFINITY;
    let mut worst_gap: f64 = 0.0;
    let mut count = 0;
    for i in 0..100u64 {
        let mut rng = seeding::stream(99, &[i]);
        let s = rng.random_range(2..=3usize);
        let spec = random_balanced_spec(&mut rng, s, 4);
        let per_axis: usize = if s == 2 { 100 } else { 22 };
        let grid: Vec<Vec<f64>> = (0..per_axis.pow(s as u32))
            .map(|mut k| {
                (0..s)
                    .map(|_| {
                        let v = (k % per_axis) as f64 / (per_axis - 1) as f64;
                        k /= per_axis;
                        v
                    })
                    .collect()
            })
            .collect();
        let m = key_inequality_margin(&spec, &grid).unwrap();
        worst_margin = worst_margin.min(m.min_margin);
        worst_gap = worst_gap.max(m.ones_gap.abs());
        count += 1;
    }
    Outcome {
        pass: worst_margin >= -1e-12 && worst_gap <= 1e-12,
        detail: format!("{count} balanced specs, >= 1e4 grid points each: min margin {worst_margin:.2e}, max |gap at 1| {worst_gap:.2e}"),
    }
}

// max over product of spheres of the bilinear form: √Δ²/√N · d · s_max(G12 + G21ᵀ) / N,
// with s_max from power iteration on MᵀM.
fn bipartite_oracle(spec: &ModelSpec, d: usize, disorder: &DisorderSample) -> f64 {
    let mut m = vec![0.0; d * d];
    for b in disorder.blocks() {
        for i in 0..d {
            for j in 0..d {
                if b.species == [0, 1] {
                    m[i * d + j] += b.g[i * d + j];
                } else {
                    m[i * d + j] += b.g[j * d + i];
                }
            }
        }
    }
    let mut v = vec![1.0; d];
    let mut s = 0.0;
    for _ in 0..100_000 {
        let mv: Vec<f64> = (0..d)
            .map(|i| (0..d).map(|j| m[i * d + j] * v[j]).sum())
            .collect();
        let mut w: Vec<f64> = (0..d)
            .map(|j| (0..d).map(|i| m[i * d + j] * mv[i]).sum())
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
        let next = norm.sqrt();
        if (next - s).abs() <= 1e-15 * next {
            s = next;
            break;
        }
        s = next;
    }
    let n = 2.0 * d as f64;
    spec.delta_sq(&[0, 1]).sqrt() / n.sqrt() * d as f64 * s / n
}

fn criterion_8() -> Outcome {
    let d = 40;
    let spec = models::bipartite_sk(1.0);
    let sizes = FiniteSizes::new(vec![d, d]).unwrap();
    let mut worst: f64 = 0.0;
    for r in 0..20 {
        let disorder = DisorderSample::generate(&spec, &sizes, 1000 + r).unwrap();
        let found = spherical_gse_search(
            &spec,
            &sizes,
            &disorder,
            &GseOptions {
                restarts: 4,
                seed: r,
                ..Default::default()
            },
        )
        .unwrap();
        worst = worst.max((found.value - bipartite_oracle(&spec, d, &disorder)).abs());
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("d = 40, 20 disorders: max |search - oracle| = {worst:.2e} (tol 1e-6)"),
    }
}

fn top_singular(t: &GaussianTensor) -> f64 {
    let d = t.dim();
    let a = t.entries();
    let mut v = vec![1.0; d];
    let mut s = 0.0;
    for _ in 0..100_000 {
        let av: Vec<f64> = (0..d)
            .map(|i| (0..d).map(|j| a[i * d + j] * v[j]).sum())
            .collect();
        let mut w: Vec<f64> = (0..d)
            .map(|j| (0..d).map(|i| a[i * d + j] * av[i]).sum())
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
        let next = norm.sqrt();
        if (next - s).abs() <= 1e-15 * next {
            return next;
        }
        s = next;
    }
    s
}

fn criterion_9() -> Outcome {
    let d = 40;
    let mut worst: f64 = 0.0;
    let mut total = 0.0;
    for i in 0..50 {
        let t = GaussianTensor::generate(2, d, 500 + i).unwrap();
        let e = injective_norm_estimate(
            &t,
            &InjectiveOptions {
                seed: i,
                ..Default::default()
            },
        )
        .unwrap();
        worst = worst.max((e.value - top_singular(&t)).abs());
        total += e.value / (d as f64).sqrt();
    }
    let mean = total / 50.0;
    let rel = (mean - 2.0).abs() / 2.0;
    Outcome {
        pass: rel <= 0.05 && worst <= 1e-8,
        detail: format!("mean ||T||/sqrt(d) = {mean:.4} ({:.2}% from 2, tol 5%), max |ALS - oracle| = {worst:.2e} (tol 1e-8)", 100.0 * rel),
    }
}

fn criterion_10() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (p, d) in [(2, 20), (3, 15)] {
        let r = correspondence_check(p, d, 100, 20, 10 + p as u64).unwrap();
        pass &= r.holds;
        notes.push(format!(
            "(p {p}, d {d}): tensor {:.4} +- {:.4}, spin {:.4} +- {:.4}, z = {:.2}",
            r.tensor.mean, r.tensor.stderr, r.spin.mean, r.spin.stderr, r.z
        ));
    }
    Outcome {
        pass,
        detail: format!("{} (tol |z| <= 3)", notes.join("; ")),
    }
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 10] = [
        (1, "diagonal-lift equality", criterion_1),
        (
            2,
            "two-parameter bound vs bipartite closed form",
            criterion_2,
        ),
        (
            3,
            "zero-temperature extrapolation of the 2-spin model",
            criterion_3,
        ),
        (4, "covariance identity", criterion_4),
        (5, "annealed bound strictness", criterion_5),
        (6, "Lipschitz comparison", criterion_6),
        (7, "key inequality", criterion_7),
        (
            8,
            "bipartite ground state vs singular-value oracle",
            criterion_8,
        ),
        (9, "injective norm of order-2 tensors", criterion_9),
        (10, "tensor / spin-glass correspondence", criterion_10),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failures = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {verdict} [{:.1}s] {name}: {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        if !outcome.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
