//! Thin wrappers around `argmin` used by the variational solvers.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::brent::BrentOpt;
use argmin::solver::neldermead::NelderMead;

/// Outcome of a local minimisation.
#[derive(Debug, Clone)]
pub struct LocalMin {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: u64,
}

struct Objective<'a, F: Fn(&[f64]) -> f64> {
    f: &'a F,
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        let v = (self.f)(p);
        // NaN would poison the simplex ordering; treat it as infeasible.
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

fn run_simplex<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: f64,
    max_iters: u64,
    tol: f64,
) -> LocalMin {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let start_value = f(x0);
    let fallback = LocalMin {
        x: x0.to_vec(),
        value: start_value,
        converged: false,
        iterations: 0,
    };
    let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(tol) else {
        return fallback;
    };
    let run = Executor::new(Objective { f }, solver)
        .configure(|s| s.max_iters(max_iters))
        .timer(false)
        .run();
    match run {
        Ok(res) => {
            let state = res.state();
            let converged = matches!(
                state.get_termination_status(),
                TerminationStatus::Terminated(TerminationReason::SolverConverged)
            );
            match state.get_best_param() {
                Some(x) if state.get_best_cost() <= start_value || start_value.is_nan() => {
                    LocalMin {
                        x: x.clone(),
                        value: state.get_best_cost(),
                        converged,
                        iterations: state.get_iter(),
                    }
                }
                _ => LocalMin {
                    converged,
                    iterations: state.get_iter(),
                    ..fallback
                },
            }
        }
        Err(_) => fallback,
    }
}

/// Nelder–Mead from `x0` with an axis-aligned initial simplex of size
/// `step`, followed by restarts from the incumbent until a restart no
/// longer improves the value. The returned point is never worse than `x0`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: f64,
    max_iters: u64,
    tol: f64,
) -> LocalMin {
    if x0.is_empty() {
        return LocalMin {
            x: vec![],
            value: f(x0),
            converged: true,
            iterations: 0,
        };
    }
    let mut best = run_simplex(f, x0, step, max_iters, tol);
    let mut iterations = best.iterations;
    let mut scale = step;
    for _ in 0..4 {
        scale *= 0.25;
        let next = run_simplex(f, &best.x, scale.max(1e-6), max_iters, tol);
        iterations += next.iterations;
        let improved = next.value < best.value - tol;
        if next.value <= best.value {
            best = LocalMin {
                converged: next.converged,
                ..next
            };
        }
        if !improved {
            break;
        }
    }
    best.iterations = iterations;
    best
}

struct Scalar<'a, F: Fn(f64) -> f64> {
    f: &'a F,
}

impl<F: Fn(f64) -> f64> CostFunction for Scalar<'_, F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, p: &f64) -> Result<f64, argmin::core::Error> {
        Ok((self.f)(*p))
    }
}

/// Brent's method (golden section with parabolic steps) on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn brent<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let solver = BrentOpt::new(lo, hi).set_tolerance(tol, 1e-300);
    let run = Executor::new(Scalar { f }, solver)
        .configure(|s| s.max_iters(500))
        .timer(false)
        .run();
    match run {
        Ok(res) => {
            let state = res.state();
            let x = state.get_best_param().copied().unwrap_or(0.5 * (lo + hi));
            (x, state.get_best_cost())
        }
        Err(_) => {
            let x = 0.5 * (lo + hi);
            (x, f(x))
        }
    }
}

/// Scan `n` points of `grid` (assumed sorted) and refine the best with
/// Brent between its neighbours.
pub fn scan_then_brent<F: Fn(f64) -> f64>(f: &F, grid: &[f64], tol: f64) -> (f64, f64) {
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let (i, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let (x, v) = if hi > lo {
        brent(f, lo, hi, tol)
    } else {
        (grid[i], values[i])
    };
    if v <= values[i] {
        (x, v)
    } else {
        (grid[i], values[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(&f, &[-1.2, 1.0], 0.5, 5000, 1e-14);
        assert!((r.x[0] - 1.0).abs() < 1e-5, "{:?}", r);
        assert!((r.x[1] - 1.0).abs() < 1e-5, "{:?}", r);
        assert!(r.value < 1e-10);
    }

    #[test]
    fn nelder_mead_never_worse_than_start() {
        let f = |x: &[f64]| x[0].abs();
        let r = nelder_mead(&f, &[0.0], 1.0, 100, 1e-12);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn brent_parabola() {
        let f = |x: f64| (x - 0.3).powi(2) + 2.0;
        let (x, v) = brent(&f, -1.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn scan_finds_global_of_multimodal() {
        let f = |x: f64| (3.0 * x).cos() + 0.1 * x;
        let grid: Vec<f64> = (0..=200).map(|i| -5.0 + 0.05 * i as f64).collect();
        let (x, _) = scan_then_brent(&f, &grid, 1e-10);
        // global min on [-5, 5] is the well near -pi
        assert!((x + std::f64::consts::PI).abs() < 0.1, "x = {x}");
    }
}
