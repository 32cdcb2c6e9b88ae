//! Probit regression of a binary outcome on one covariate, fitted by
//! Newton's method with analytic derivatives and step halving.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `ln Φ(z)`, using the asymptotic tail expansion where Φ underflows.
fn ln_cdf(z: f64) -> f64 {
    if z > -20.0 {
        cdf(z).ln()
    } else {
        let z2 = z * z;
        -0.5 * z2 - (-z).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            + (1.0 - 1.0 / z2 + 3.0 / (z2 * z2)).ln()
    }
}

/// Inverse Mills ratio `φ(z) / Φ(z)`.
fn mills(z: f64) -> f64 {
    if z > -20.0 {
        pdf(z) / cdf(z)
    } else {
        let z2 = z * z;
        -z / (1.0 - 1.0 / z2 + 3.0 / (z2 * z2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbitOptions {
    /// Adds an intercept term. The printed model has none.
    pub intercept: bool,
    pub level: f64,
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for ProbitOptions {
    fn default() -> Self {
        ProbitOptions {
            intercept: false,
            level: 0.95,
            max_iter: 100,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbitFit {
    /// Slope on the covariate.
    pub beta: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub intercept: Option<f64>,
    pub converged: bool,
    /// Set when the likelihood keeps increasing as |beta| grows, i.e. the
    /// outcomes are perfectly separated by the sign of the linear predictor.
    pub separation: bool,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub n: usize,
}

/// Linear predictor of row `i` under `theta = [slope]` or `[slope, intercept]`.
fn eta(theta: &[f64], x: f64) -> f64 {
    theta[0] * x + theta.get(1).copied().unwrap_or(0.0)
}

fn loglik(theta: &[f64], x: &[f64], y: &[bool]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let z = eta(theta, xi);
            if yi {
                ln_cdf(z)
            } else {
                ln_cdf(-z)
            }
        })
        .sum()
}

/// Gradient and Hessian of the log-likelihood in `theta`.
fn derivatives(theta: &[f64], x: &[f64], y: &[bool]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let p = theta.len();
    let mut g = vec![0.0; p];
    let mut h = vec![vec![0.0; p]; p];
    for (&xi, &yi) in x.iter().zip(y) {
        let z = eta(theta, xi);
        // d/dz of the row log-likelihood and its second derivative
        let (d1, d2) = if yi {
            let l = mills(z);
            (l, -l * (z + l))
        } else {
            let l = mills(-z);
            (-l, -l * (l - z))
        };
        let row = [xi, 1.0];
        for a in 0..p {
            g[a] += d1 * row[a];
            for b in 0..p {
                h[a][b] += d2 * row[a] * row[b];
            }
        }
    }
    (g, h)
}

/// `Σ y ln Φ(βx) + (1 - y) ln(1 - Φ(βx))` for the no-intercept model.
pub fn probit_log_likelihood(beta: f64, x: &[f64], y: &[bool]) -> f64 {
    loglik(&[beta], x, y)
}

/// Analytic first derivative of [`probit_log_likelihood`] in `beta`.
pub fn probit_gradient(beta: f64, x: &[f64], y: &[bool]) -> f64 {
    derivatives(&[beta], x, y).0[0]
}

/// Analytic second derivative of [`probit_log_likelihood`] in `beta`.
pub fn probit_hessian(beta: f64, x: &[f64], y: &[bool]) -> f64 {
    derivatives(&[beta], x, y).1[0][0]
}

/// Solves `h * step = -g` for p = 1 or 2.
fn newton_step(g: &[f64], h: &[Vec<f64>]) -> Option<Vec<f64>> {
    match g.len() {
        1 => (h[0][0] != 0.0).then(|| vec![-g[0] / h[0][0]]),
        2 => {
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            Some(vec![
                -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                -(-h[1][0] * g[0] + h[0][0] * g[1]) / det,
            ])
        }
        _ => unreachable!("at most two parameters"),
    }
}

/// Variance of the slope from the observed information.
fn slope_variance(h: &[Vec<f64>]) -> f64 {
    match h.len() {
        1 => -1.0 / h[0][0],
        _ => {
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            -h[1][1] / det
        }
    }
}

pub fn probit_fit(ages: &[f64], outcomes: &[bool]) -> Result<ProbitFit> {
    probit_fit_with(ages, outcomes, &ProbitOptions::default())
}

/// Maximum-likelihood probit fit with a Wald interval for the slope.
pub fn probit_fit_with(x: &[f64], y: &[bool], opts: &ProbitOptions) -> Result<ProbitFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument("probit covariate and outcome lengths differ".into()));
    }
    if x.len() < 10 {
        return Err(Error::InsufficientData(format!("probit needs n >= 10, got {}", x.len())));
    }
    if y.iter().all(|v| *v) || y.iter().all(|v| !*v) {
        return Err(Error::InsufficientData(
            "probit needs at least one positive and one negative outcome".into(),
        ));
    }
    if !(opts.level > 0.0 && opts.level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {} outside (0, 1)", opts.level)));
    }
    let mut theta = vec![0.0; if opts.intercept { 2 } else { 1 }];
    let mut ll = loglik(&theta, x, y);
    let mut converged = false;
    let mut iterations = 0;
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);

    while iterations < opts.max_iter {
        iterations += 1;
        let (g, h) = derivatives(&theta, x, y);
        let Some(step) = newton_step(&g, &h) else { break };
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let cand_ll = loglik(&cand, x, y);
            if cand_ll.is_finite() && cand_ll >= ll {
                accepted = Some((cand, cand_ll));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, cand_ll)) = accepted else { break };
        let moved = cand
            .iter()
            .zip(&theta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        theta = cand;
        ll = cand_ll;
        if moved <= opts.tolerance * (1.0 + theta[0].abs()) {
            converged = true;
            break;
        }
    }

    let (_, h) = derivatives(&theta, x, y);
    let var = slope_variance(&h);
    let se = if var.is_finite() && var > 0.0 { var.sqrt() } else { f64::INFINITY };
    // |beta * x| this large with a still-rising likelihood means separation
    let separation = (theta[0] * scale).abs() > 35.0 && ll > -1e-6;
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - (1.0 - opts.level) / 2.0);
    Ok(ProbitFit {
        beta: theta[0],
        se,
        ci_low: theta[0] - z * se,
        ci_high: theta[0] + z * se,
        intercept: theta.get(1).copied(),
        converged: converged && !separation,
        separation,
        log_likelihood: ll,
        iterations,
        n: x.len(),
    })
}
