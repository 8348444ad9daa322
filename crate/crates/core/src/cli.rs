//! Command-line front end behind the `msglass` binary.
//!
//! Every command builds a [`Report`]: a JSON summary (parameters with all
//! defaults filled in, plus results) and a CSV table. CSV tables start with
//! the master seed; tables of Monte Carlo estimates end with
//! `estimate,stderr`. Exit codes: 0 success, 1 validation failure (a JSON
//! error object on stderr), 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::mixture::{build_mixture, check_balanced, io, reduce_beta, DEFAULT_BALANCE_TOL};
use crate::parisi::{
    ising_functional, lift_path, optimize_path, spherical_functional, Ensemble, IsingOptions,
    OptimizeOptions, ParisiPath, DEFAULT_NODES,
};
use crate::reference::{bipartite_sk_free_energy, e0_extrapolation, pure_bound_argmin, E0Options};
use crate::seeding::{self, tag};
use crate::simulate::{
    concentration_check, covariance_check, ising_disorder_average, lipschitz_bound_check,
    spherical_gse_average, GseOptions,
};
use crate::stats::Summary;
use crate::tensor::{
    asymptote, correspondence_check, injective_norm_estimate, GaussianTensor, InjectiveOptions,
};
use crate::{FiniteSizes, MixtureFunction, ModelSpec};

/// Environment variable for the default worker count.
pub const WORKERS_ENV: &str = "MSGLASS_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "msglass",
    version,
    about = "Balanced multi-species spin glass toolkit"
)]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Model files: hypotheses, β_p table, balanced verdict.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Parisi functionals.
    #[command(subcommand)]
    Parisi(ParisiCmd),
    /// Closed-form and variational reference values.
    #[command(subcommand)]
    Reference(ReferenceCmd),
    /// Finite-N experiments.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Gaussian tensor injective norms.
    #[command(subcommand)]
    Tensor(TensorCmd),
}

#[derive(Debug, Subcommand)]
enum ModelCmd {
    Check {
        file: PathBuf,
        /// Relative tolerance of the balanced check.
        #[arg(long, default_value_t = DEFAULT_BALANCE_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand)]
enum ParisiCmd {
    /// Minimise the functional over k-level paths.
    Solve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_parser = parse_ensemble)]
        ensemble: Ensemble,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Gauss–Hermite nodes per level (Ising).
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
    },
    /// Compare lifted multi-species and single-species functionals on random paths.
    LiftCheck {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 20)]
        paths: usize,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
    },
}

#[derive(Debug, Subcommand)]
enum ReferenceCmd {
    /// Free energy of the balanced bipartite spherical SK model.
    Bipartite {
        #[arg(long)]
        beta: f64,
    },
    /// Two-parameter bound for the pure bipartite spherical model.
    PureBound {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Zero-temperature extrapolation of the pure p-spin ground state.
    E0 {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
    },
}

#[derive(Debug, Args)]
struct Sizing {
    #[arg(long)]
    model: PathBuf,
    /// Total N, split in proportion to λ.
    #[arg(long, required_unless_present = "sizes")]
    n: Option<usize>,
    /// Explicit block sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
}

#[derive(Debug, Subcommand)]
enum SimulateCmd {
    /// Exact Ising free energies by enumeration.
    IsingExact {
        #[command(flatten)]
        sizing: Sizing,
        #[arg(long, default_value_t = 1)]
        disorders: usize,
    },
    /// Spherical ground-state search.
    SphericalGse {
        #[command(flatten)]
        sizing: Sizing,
        #[arg(long, default_value_t = 1)]
        disorders: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Sample covariance of H against N ξ_N(R).
    Covariance {
        #[command(flatten)]
        sizing: Sizing,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 5000)]
        disorders: usize,
    },
    /// Paired free-energy difference against the sup of the mixture difference.
    Lipschitz {
        #[command(flatten)]
        sizing: Sizing,
        /// Second model; must have the same species.
        #[arg(long)]
        other: PathBuf,
        #[arg(long, default_value_t = 200)]
        disorders: usize,
    },
    /// Spread of the ground state across disorders against the Gaussian tail.
    Concentration {
        #[command(flatten)]
        sizing: Sizing,
        #[arg(long, default_value_t = 200)]
        disorders: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
}

#[derive(Debug, Subcommand)]
enum TensorCmd {
    /// Injective-norm estimates of Gaussian tensors.
    Injnorm {
        #[arg(long, required_unless_present = "load")]
        p: Option<usize>,
        #[arg(long, required_unless_present = "load")]
        d: Option<usize>,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// Defaults to 10·p·d.
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = 5000)]
        iters: usize,
        /// Estimate a tensor read from a GTEN file instead.
        #[arg(long, conflicts_with_all = ["p", "d", "samples"])]
        load: Option<PathBuf>,
        /// Save the first generated tensor as a GTEN file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Two-sample comparison with the translated spin-glass model.
    Correspondence {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
}

fn parse_ensemble(s: &str) -> std::result::Result<Ensemble, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A command's output in both formats.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    fn new(command: &str, seed: u64, parameters: Value, result: Value, header: &[&str]) -> Self {
        Report {
            json: json!({ "command": command, "seed": seed, "parameters": parameters, "result": result }),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn row(mut self, cells: Vec<String>) -> Self {
        self.rows.push(cells);
        self
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.header).map_err(io_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(io_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report serialises");
        s.push('\n');
        s
    }
}

fn cell(v: impl ToString) -> String {
    v.to_string()
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("result serialises")
}

fn load_model(path: &Path) -> Result<ModelSpec> {
    io::load(path).map_err(|e| match e {
        Error::Io(err) => Error::Io(std::io::Error::new(
            err.kind(),
            format!("{}: {err}", path.display()),
        )),
        other => other,
    })
}

fn sizes_for(spec: &ModelSpec, sizing: &Sizing) -> Result<FiniteSizes> {
    let sizes = match (&sizing.sizes, sizing.n) {
        (Some(s), _) => FiniteSizes::new(s.clone())?,
        (None, Some(n)) => FiniteSizes::proportional(spec, n)?,
        (None, None) => return Err(Error::InvalidArgument("give --n or --sizes".into())),
    };
    sizes.check_matches(spec)?;
    Ok(sizes)
}

fn model_check(file: &Path, tol: f64, seed: u64) -> Result<Report> {
    let spec = load_model(file)?;
    let report = check_balanced(&spec, tol);
    let betas = reduce_beta(&spec);
    let xi1 = build_mixture(&spec, None)?.eval(&vec![1.0; spec.species_count()])?;
    let lambda: Vec<String> = spec.lambda().iter().map(|l| l.to_string()).collect();
    let result = json!({
        "species": spec.species(),
        "lambda": lambda,
        "hypotheses": {
            "ratios_positive_and_sum_to_one": true,
            "finite_mixture": true,
            "balanced": report.balanced,
        },
        "beta_sq": betas.as_slice(),
        "xi_at_ones": xi1,
        "balance": to_value(&report),
    });
    let params = json!({ "file": file.display().to_string(), "tol": tol });
    let mut out = Report::new(
        "model check",
        seed,
        params,
        result,
        &["seed", "degree", "beta_sq", "discrepancy"],
    );
    for (p, b) in betas.iter() {
        let disc = report.discrepancy.get(&p).copied().unwrap_or(0.0);
        out = out.row(vec![cell(seed), cell(p), cell(b), cell(disc)]);
    }
    Ok(out)
}

fn parisi_solve(
    model: &Path,
    ensemble: Ensemble,
    k: usize,
    restarts: usize,
    nodes: usize,
    seed: u64,
) -> Result<Report> {
    let spec = load_model(model)?;
    let f = build_mixture(&spec, None)?;
    let opts = OptimizeOptions {
        restarts,
        seed,
        nodes,
        ..Default::default()
    };
    let r = optimize_path(&f, ensemble, k, &opts)?;
    let params = json!({
        "model": model.display().to_string(),
        "ensemble": ensemble,
        "k": k,
        "restarts": opts.restarts,
        "nodes": opts.nodes,
        "max_iters": opts.max_iters,
        "tol": opts.tol,
        "ladder": opts.ladder,
    });
    let result = json!({
        "value": r.value.value,
        "functional": to_value(&r.value),
        "path": to_value(&r.path),
        "ladder": r.ladder,
        "converged": r.converged,
    });
    let mut out = Report::new(
        "parisi solve",
        seed,
        params,
        result,
        &["seed", "ensemble", "k", "value"],
    );
    for (level, v) in &r.ladder {
        out = out.row(vec![cell(seed), cell(ensemble), cell(level), cell(v)]);
    }
    Ok(out)
}

fn random_single_path(rng: &mut impl Rng) -> Result<ParisiPath> {
    let k = rng.random_range(1..=3usize);
    let mut m: Vec<f64> = (0..k - 1).map(|_| rng.random_range(0.02..0.98)).collect();
    m.sort_by(f64::total_cmp);
    m.dedup();
    m.insert(0, 0.0);
    m.push(1.0);
    let mut q: Vec<f64> = (0..m.len() - 1)
        .map(|_| rng.random_range(0.0..1.0))
        .collect();
    q.sort_by(f64::total_cmp);
    q.insert(0, 0.0);
    q.push(1.0);
    ParisiPath::single(m, q)
}

fn lift_check(model: &Path, paths: usize, nodes: usize, seed: u64) -> Result<Report> {
    let spec = load_model(model)?;
    let balance = check_balanced(&spec, DEFAULT_BALANCE_TOL);
    if !balance.balanced {
        return Err(Error::Unbalanced(balance.max_discrepancy));
    }
    let multi = build_mixture(&spec, None)?;
    let single = MixtureFunction::single_species(reduce_beta(&spec).as_slice());
    let ising = IsingOptions {
        nodes,
        ..Default::default()
    };
    let s = spec.species_count();
    let mut out_rows = Vec::new();
    let mut records = Vec::new();
    let (mut worst_sph, mut worst_ising) = (0.0f64, 0.0f64);
    for i in 0..paths {
        let path = random_single_path(&mut seeding::stream(seed, &[tag::PATH, i as u64]))?;
        let lifted = lift_path(&path, s)?;
        let sph = (
            spherical_functional(&multi, &lifted)?.value,
            spherical_functional(&single, &path)?.value,
        );
        let isg = (
            ising_functional(&multi, &lifted, &ising)?.value,
            ising_functional(&single, &path, &ising)?.value,
        );
        worst_sph = worst_sph.max((sph.0 - sph.1).abs());
        worst_ising = worst_ising.max((isg.0 - isg.1).abs());
        records.push(json!({
            "path": to_value(&path),
            "spherical": [sph.0, sph.1],
            "ising": [isg.0, isg.1],
        }));
        out_rows.push(vec![
            cell(seed),
            cell(i),
            cell(path.k()),
            cell(sph.0),
            cell(sph.1),
            cell((sph.0 - sph.1).abs()),
            cell(isg.0),
            cell(isg.1),
            cell((isg.0 - isg.1).abs()),
        ]);
    }
    let params = json!({ "model": model.display().to_string(), "paths": paths, "nodes": nodes });
    let result = json!({
        "max_spherical_residual": worst_sph,
        "max_ising_residual": worst_ising,
        "paths": records,
    });
    let header = [
        "seed",
        "path",
        "k",
        "spherical_multi",
        "spherical_single",
        "spherical_residual",
        "ising_multi",
        "ising_single",
        "ising_residual",
    ];
    let mut out = Report::new("parisi lift-check", seed, params, result, &header);
    out.rows = out_rows;
    Ok(out)
}

fn reference(cmd: &ReferenceCmd, seed: u64) -> Result<Report> {
    Ok(match *cmd {
        ReferenceCmd::Bipartite { beta } => {
            let v = bipartite_sk_free_energy(beta)?;
            Report::new(
                "reference bipartite",
                seed,
                json!({ "beta": beta }),
                json!({ "value": v }),
                &["seed", "beta", "value"],
            )
            .row(vec![cell(seed), cell(beta), cell(v)])
        }
        ReferenceCmd::PureBound { beta, p, q } => {
            let (m, a, v) = pure_bound_argmin(beta, p, q)?;
            let params = json!({ "beta": beta, "p": p, "q": q, "grid": [200, 200], "m_floor": crate::reference::M_FLOOR, "a_ceil": crate::reference::A_CEIL });
            Report::new(
                "reference pure-bound",
                seed,
                params,
                json!({ "value": v, "m": m, "a": a }),
                &["seed", "beta", "p", "q", "m", "a", "value"],
            )
            .row(vec![
                cell(seed),
                cell(beta),
                cell(p),
                cell(q),
                cell(m),
                cell(a),
                cell(v),
            ])
        }
        ReferenceCmd::E0 { p, k, restarts } => {
            let opts = E0Options {
                k,
                restarts,
                seed,
                ..Default::default()
            };
            let e = e0_extrapolation(p, &opts)?;
            let params = json!({ "p": p, "k": k, "restarts": restarts, "alphas": opts.alphas });
            let mut out = Report::new(
                "reference e0",
                seed,
                params,
                to_value(&e),
                &["seed", "p", "alpha", "value"],
            );
            for (a, v) in e.alphas.iter().zip(&e.values) {
                out = out.row(vec![cell(seed), cell(p), cell(a), cell(v)]);
            }
            out
        }
    })
}

fn summary_cells(s: &Summary) -> [String; 2] {
    [cell(s.mean), cell(s.stderr)]
}

fn simulate(cmd: &SimulateCmd, seed: u64) -> Result<Report> {
    match cmd {
        SimulateCmd::IsingExact { sizing, disorders } => {
            let spec = load_model(&sizing.model)?;
            let sizes = sizes_for(&spec, sizing)?;
            let r = ising_disorder_average(&spec, &sizes, *disorders, seed)?;
            let params = json!({ "model": sizing.model.display().to_string(), "sizes": sizes.block_sizes(), "disorders": disorders });
            let [m, se] = summary_cells(&r.summary);
            Ok(Report::new(
                "simulate ising-exact",
                seed,
                params,
                to_value(&r),
                &["seed", "n", "disorders", "annealed", "estimate", "stderr"],
            )
            .row(vec![
                cell(seed),
                cell(r.n),
                cell(disorders),
                cell(r.annealed),
                m,
                se,
            ]))
        }
        SimulateCmd::SphericalGse {
            sizing,
            disorders,
            restarts,
        } => {
            let spec = load_model(&sizing.model)?;
            let sizes = sizes_for(&spec, sizing)?;
            let opts = GseOptions {
                restarts: *restarts,
                ..Default::default()
            };
            let r = spherical_gse_average(&spec, &sizes, *disorders, seed, &opts)?;
            let params = json!({
                "model": sizing.model.display().to_string(),
                "sizes": sizes.block_sizes(),
                "disorders": disorders,
                "search": to_value(&opts),
            });
            let [m, se] = summary_cells(&r.summary);
            Ok(Report::new(
                "simulate spherical-gse",
                seed,
                params,
                to_value(&r),
                &["seed", "n", "disorders", "restarts", "estimate", "stderr"],
            )
            .row(vec![
                cell(seed),
                cell(r.n),
                cell(disorders),
                cell(restarts),
                m,
                se,
            ]))
        }
        SimulateCmd::Covariance {
            sizing,
            pairs,
            disorders,
        } => {
            let spec = load_model(&sizing.model)?;
            let sizes = sizes_for(&spec, sizing)?;
            let r = covariance_check(&spec, &sizes, *pairs, *disorders, seed)?;
            let params = json!({ "model": sizing.model.display().to_string(), "sizes": sizes.block_sizes(), "pairs": pairs, "disorders": disorders });
            let mut out = Report::new(
                "simulate covariance",
                seed,
                params,
                to_value(&r),
                &[
                    "seed", "pair", "overlap", "expected", "z", "estimate", "stderr",
                ],
            );
            for (i, p) in r.pairs.iter().enumerate() {
                let overlap: Vec<String> = p.overlap.iter().map(cell).collect();
                out = out.row(vec![
                    cell(seed),
                    cell(i),
                    overlap.join(";"),
                    cell(p.expected),
                    cell(p.z),
                    cell(p.estimate),
                    cell(p.stderr),
                ]);
            }
            Ok(out)
        }
        SimulateCmd::Lipschitz {
            sizing,
            other,
            disorders,
        } => {
            let spec = load_model(&sizing.model)?;
            let spec_b = load_model(other)?;
            let sizes = sizes_for(&spec, sizing)?;
            let r = lipschitz_bound_check(&spec, &spec_b, &sizes, *disorders, seed)?;
            let params = json!({
                "model": sizing.model.display().to_string(),
                "other": other.display().to_string(),
                "sizes": sizes.block_sizes(),
                "disorders": disorders,
            });
            Ok(Report::new(
                "simulate lipschitz",
                seed,
                params,
                to_value(&r),
                &[
                    "seed",
                    "n",
                    "disorders",
                    "sup_abs_difference",
                    "estimate",
                    "stderr",
                ],
            )
            .row(vec![
                cell(seed),
                cell(r.n),
                cell(disorders),
                cell(r.sup_abs_difference),
                cell(r.mean_difference),
                cell(r.stderr),
            ]))
        }
        SimulateCmd::Concentration {
            sizing,
            disorders,
            restarts,
        } => {
            let spec = load_model(&sizing.model)?;
            let sizes = sizes_for(&spec, sizing)?;
            let opts = GseOptions {
                restarts: *restarts,
                ..Default::default()
            };
            let r = concentration_check(&spec, &sizes, *disorders, seed, &opts)?;
            let params = json!({
                "model": sizing.model.display().to_string(),
                "sizes": sizes.block_sizes(),
                "disorders": disorders,
                "search": to_value(&opts),
            });
            let stderr = r.std / (r.n_disorders as f64).sqrt();
            Ok(Report::new(
                "simulate concentration",
                seed,
                params,
                to_value(&r),
                &[
                    "seed",
                    "n",
                    "disorders",
                    "std",
                    "t",
                    "exceedances",
                    "bound",
                    "estimate",
                    "stderr",
                ],
            )
            .row(vec![
                cell(seed),
                cell(r.n),
                cell(disorders),
                cell(r.std),
                cell(r.t),
                cell(r.exceedances),
                cell(r.bound),
                cell(r.mean),
                cell(stderr),
            ]))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn injnorm(
    p: Option<usize>,
    d: Option<usize>,
    samples: usize,
    restarts: Option<usize>,
    iters: usize,
    load: Option<&Path>,
    save: Option<&Path>,
    seed: u64,
) -> Result<Report> {
    let tensors: Vec<(Option<u64>, GaussianTensor)> = match load {
        Some(path) => vec![(None, GaussianTensor::load(path)?)],
        None => {
            let (p, d) = (p.expect("clap requires p"), d.expect("clap requires d"));
            if samples == 0 {
                return Err(Error::InvalidArgument("need at least one sample".into()));
            }
            (0..samples)
                .map(|i| {
                    let s = seeding::derive(seed, &[tag::TENSOR, i as u64]);
                    Ok((Some(s), GaussianTensor::generate(p, d, s)?))
                })
                .collect::<Result<_>>()?
        }
    };
    if let Some(path) = save {
        tensors[0].1.save(path)?;
    }
    let (p, d) = (tensors[0].1.order(), tensors[0].1.dim());
    let opts = InjectiveOptions {
        restarts,
        iters,
        seed,
        ..Default::default()
    };
    let mut values = Vec::new();
    let mut records = Vec::new();
    for (s, t) in &tensors {
        let e = injective_norm_estimate(
            t,
            &InjectiveOptions {
                seed: s.unwrap_or(seed),
                ..opts.clone()
            },
        )?;
        let scaled = e.value / (d as f64).sqrt();
        values.push(scaled);
        records.push(json!({ "tensor_seed": s, "value": e.value, "scaled": scaled, "converged_restarts": e.converged }));
    }
    let summary = Summary::of(&values);
    let limit = if p >= 2 {
        Some(asymptote(p)?)
    } else {
        Some(1.0)
    };
    let params = json!({
        "p": p,
        "d": d,
        "samples": tensors.len(),
        "restarts": restarts.unwrap_or(10 * p * d),
        "iters": iters,
        "tol": opts.tol,
        "load": load.map(|l| l.display().to_string()),
    });
    let result = json!({ "summary": to_value(&summary), "asymptote": limit, "samples": records });
    let [m, se] = summary_cells(&summary);
    Ok(Report::new(
        "tensor injnorm",
        seed,
        params,
        result,
        &["seed", "p", "d", "samples", "estimate", "stderr"],
    )
    .row(vec![
        cell(seed),
        cell(p),
        cell(d),
        cell(tensors.len()),
        m,
        se,
    ]))
}

fn tensor(cmd: &TensorCmd, seed: u64) -> Result<Report> {
    match cmd {
        TensorCmd::Injnorm {
            p,
            d,
            samples,
            restarts,
            iters,
            load,
            save,
        } => injnorm(
            *p,
            *d,
            *samples,
            *restarts,
            *iters,
            load.as_deref(),
            save.as_deref(),
            seed,
        ),
        TensorCmd::Correspondence {
            p,
            d,
            samples,
            restarts,
        } => {
            let r = correspondence_check(*p, *d, *samples, *restarts, seed)?;
            let params = json!({ "p": p, "d": d, "samples": samples, "restarts": restarts });
            let pooled = (r.tensor.stderr.powi(2) + r.spin.stderr.powi(2)).sqrt();
            let header = [
                "seed",
                "p",
                "d",
                "samples",
                "tensor_mean",
                "spin_mean",
                "z",
                "estimate",
                "stderr",
            ];
            Ok(
                Report::new("tensor correspondence", seed, params, to_value(&r), &header).row(
                    vec![
                        cell(seed),
                        cell(p),
                        cell(d),
                        cell(samples),
                        cell(r.tensor.mean),
                        cell(r.spin.mean),
                        cell(r.z),
                        cell(r.tensor.mean - r.spin.mean),
                        cell(pooled),
                    ],
                ),
            )
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let seed = cli.seed;
    match &cli.command {
        Command::Model(ModelCmd::Check { file, tol }) => model_check(file, *tol, seed),
        Command::Parisi(ParisiCmd::Solve {
            model,
            ensemble,
            k,
            restarts,
            nodes,
        }) => parisi_solve(model, *ensemble, *k, *restarts, *nodes, seed),
        Command::Parisi(ParisiCmd::LiftCheck {
            model,
            paths,
            nodes,
        }) => lift_check(model, *paths, *nodes, seed),
        Command::Reference(cmd) => reference(cmd, seed),
        Command::Simulate(cmd) => simulate(cmd, seed),
        Command::Tensor(cmd) => tensor(cmd, seed),
    }
}

fn execute(cli: &Cli) -> Result<String> {
    let report = match cli.workers {
        Some(0) => return Err(Error::InvalidArgument("--workers must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?
            .install(|| dispatch(cli))?,
        None => dispatch(cli)?,
    };
    match cli.format {
        Format::Json => Ok(report.to_json()),
        Format::Csv => report.to_csv(),
    }
}

fn error_json(e: &Error) -> String {
    let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    format!("{}\n", serde_json::to_string(&v).expect("error serialises"))
}

/// Run with `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let written = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    });
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = stderr.write_all(error_json(&e).as_bytes());
            1
        }
    }
}
