//! Quasi-Newton minimization: dense inverse-Hessian BFGS with a backtracking
//! Armijo line search, plus central finite differences.

use crate::error::Result;

/// A scalar cost to minimize.
///
/// `&mut self` lets sampled objectives advance an internal seed counter.
pub trait Objective {
    fn value(&mut self, x: &[f64]) -> Result<f64>;

    /// Central differences with step `h`.
    fn gradient(&mut self, x: &[f64], h: f64) -> Result<Vec<f64>> {
        central_difference_gradient(|p| self.value(p), x, h)
    }
}

impl<F: FnMut(&[f64]) -> Result<f64>> Objective for F {
    fn value(&mut self, x: &[f64]) -> Result<f64> {
        self(x)
    }
}

/// `(f(x + heᵢ) − f(x − heᵢ)) / 2h` for every component.
pub fn central_difference_gradient(mut f: impl FnMut(&[f64]) -> Result<f64>, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe)?;
        probe[i] = x[i] - h;
        let down = f(&probe)?;
        probe[i] = x[i];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsConfig {
    pub max_iterations: usize,
    pub gradient_step: f64,
    pub gradient_tolerance: f64,
    pub energy_tolerance: f64,
    pub initial_step: f64,
    pub contraction: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for BfgsConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_step: 1e-5,
            gradient_tolerance: 1e-6,
            energy_tolerance: 1e-12,
            initial_step: 1.0,
            contraction: 0.5,
            armijo: 1e-4,
            max_backtracks: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    GradientTolerance,
    EnergyTolerance,
    MaxIterations,
    LineSearchFailed,
    Stopped,
}

/// State after an accepted step (iteration 0 is the starting point).
#[derive(Debug, Clone, Copy)]
pub struct Progress<'a> {
    pub iteration: usize,
    pub x: &'a [f64],
    pub value: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Row-major n×n identity.
fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

/// Minimizes `objective` from `x0`. `observe` is called at iteration 0 and
/// after every accepted step; returning `false` stops the run.
pub fn minimize(
    objective: &mut impl Objective,
    x0: &[f64],
    config: &BfgsConfig,
    mut observe: impl FnMut(&Progress) -> Result<bool>,
) -> Result<Minimum> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut value = objective.value(&x)?;
    let mut grad = objective.gradient(&x, config.gradient_step)?;
    let mut h_inv = identity(n);
    let mut fresh = true;
    let mut restarts = 0;
    let mut iteration = 0;

    let finish = |x: Vec<f64>, value, grad: &[f64], iterations, termination, restarts| Minimum {
        x,
        value,
        gradient_norm: norm(grad),
        iterations,
        termination,
        restarts,
    };

    let keep_going = observe(&Progress {
        iteration,
        x: &x,
        value,
        gradient_norm: norm(&grad),
    })?;
    if !keep_going {
        return Ok(finish(x, value, &grad, iteration, Termination::Stopped, restarts));
    }

    loop {
        if norm(&grad) <= config.gradient_tolerance {
            return Ok(finish(x, value, &grad, iteration, Termination::GradientTolerance, restarts));
        }
        if iteration >= config.max_iterations {
            return Ok(finish(x, value, &grad, iteration, Termination::MaxIterations, restarts));
        }

        let mut step = None;
        for attempt in 0..2 {
            if attempt == 1 {
                if fresh {
                    break;
                }
                h_inv = identity(n);
                fresh = true;
                restarts += 1;
            }
            let direction: Vec<f64> = (0..n).map(|i| -dot(&h_inv[i * n..(i + 1) * n], &grad)).collect();
            let slope = dot(&direction, &grad);
            if !(slope < 0.0) {
                continue;
            }
            let mut alpha = config.initial_step;
            for _ in 0..config.max_backtracks {
                let trial: Vec<f64> = x.iter().zip(&direction).map(|(xi, di)| xi + alpha * di).collect();
                let trial_value = objective.value(&trial)?;
                if trial_value <= value + config.armijo * alpha * slope {
                    step = Some((trial, trial_value));
                    break;
                }
                alpha *= config.contraction;
            }
            if step.is_some() {
                break;
            }
        }
        let Some((next, next_value)) = step else {
            return Ok(finish(x, value, &grad, iteration, Termination::LineSearchFailed, restarts));
        };

        let next_grad = objective.gradient(&next, config.gradient_step)?;
        let s: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 * norm(&s) * norm(&y) {
            if fresh {
                let scale = sy / dot(&y, &y);
                h_inv.iter_mut().for_each(|v| *v *= scale);
                fresh = false;
            }
            // H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&h_inv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h_inv[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }

        let delta = (value - next_value).abs();
        x = next;
        value = next_value;
        grad = next_grad;
        iteration += 1;

        let keep_going = observe(&Progress {
            iteration,
            x: &x,
            value,
            gradient_norm: norm(&grad),
        })?;
        if !keep_going {
            return Ok(finish(x, value, &grad, iteration, Termination::Stopped, restarts));
        }
        if delta < config.energy_tolerance {
            return Ok(finish(x, value, &grad, iteration, Termination::EnergyTolerance, restarts));
        }
    }
}
