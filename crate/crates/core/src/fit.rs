//! Damped Gauss–Newton (Levenberg–Marquardt) least squares.
//!
//! Small dense problems only: the Jacobian is formed by central differences
//! and the damped normal equations are solved with a Cholesky factorisation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub initial_damping: f64,
    pub damping_factor: f64,
    /// Relative tolerance on both the cost decrease and the step size.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            initial_damping: 1e-3,
            damping_factor: 10.0,
            tolerance: 1e-9,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub params: Vec<f64>,
    /// Sum of squared residuals at `params`.
    pub cost: f64,
    pub residual_rms: f64,
    pub iterations: usize,
}

const MAX_DAMPING: f64 = 1e16;

/// Minimises `Σ r_i(p)²`. `residuals(p, out)` must fill all `n_residuals`
/// entries. `scales` gives a typical magnitude per parameter and sets the
/// finite-difference step.
pub fn levenberg_marquardt<F>(
    residuals: F,
    n_residuals: usize,
    initial: &[f64],
    scales: &[f64],
    opts: &LmOptions,
) -> Result<LmReport>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = initial.len();
    assert_eq!(scales.len(), n);
    let mut p = initial.to_vec();
    let mut r = vec![0.0; n_residuals];
    residuals(&p, &mut r);
    let mut cost = sum_sq(&r);
    if !cost.is_finite() {
        return Err(Error::FitFailed {
            iterations: 0,
            residual_rms: f64::NAN,
        });
    }
    let mut damping = opts.initial_damping;
    let mut jac = DMatrix::<f64>::zeros(n_residuals, n);
    let mut r_plus = vec![0.0; n_residuals];
    let mut r_minus = vec![0.0; n_residuals];
    let mut trial = vec![0.0; n_residuals];

    for iteration in 1..=opts.max_iterations {
        for j in 0..n {
            let h = 1e-6 * p[j].abs().max(scales[j]);
            let mut q = p.clone();
            q[j] = p[j] + h;
            residuals(&q, &mut r_plus);
            q[j] = p[j] - h;
            residuals(&q, &mut r_minus);
            for i in 0..n_residuals {
                jac[(i, j)] = (r_plus[i] - r_minus[i]) / (2.0 * h);
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * rv;

        loop {
            let mut a = jtj.clone();
            for j in 0..n {
                let d = jtj[(j, j)].max(1e-300);
                a[(j, j)] += damping * d;
            }
            let step = match a.clone().cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => match a.lu().solve(&(-&grad)) {
                    Some(s) => s,
                    None => {
                        damping *= opts.damping_factor;
                        if damping > MAX_DAMPING {
                            return Ok(report(p, cost, n_residuals, iteration));
                        }
                        continue;
                    }
                },
            };
            let candidate: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            residuals(&candidate, &mut trial);
            let new_cost = sum_sq(&trial);
            if new_cost.is_finite() && new_cost < cost {
                let decrease = cost - new_cost;
                let small_step = step
                    .iter()
                    .zip(p.iter())
                    .all(|(s, v)| s.abs() <= opts.tolerance * (v.abs() + opts.tolerance));
                p = candidate;
                std::mem::swap(&mut r, &mut trial);
                let converged = decrease <= opts.tolerance * cost || small_step;
                cost = new_cost;
                damping = (damping / opts.damping_factor).max(1e-15);
                if converged || cost == 0.0 {
                    return Ok(report(p, cost, n_residuals, iteration));
                }
                break;
            }
            damping *= opts.damping_factor;
            if damping > MAX_DAMPING {
                // no descent direction left: stationary point to working precision
                return Ok(report(p, cost, n_residuals, iteration));
            }
        }
    }
    Err(Error::FitFailed {
        iterations: opts.max_iterations,
        residual_rms: (cost / n_residuals as f64).sqrt(),
    })
}

fn report(params: Vec<f64>, cost: f64, m: usize, iterations: usize) -> LmReport {
    LmReport {
        params,
        cost,
        residual_rms: (cost / m as f64).sqrt(),
        iterations,
    }
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}
