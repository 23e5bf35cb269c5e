//! Two-point boundary value problems q″ = f(t, q) with Dirichlet data.
//!
//! Discretised with the fourth-order Numerov scheme on a uniform mesh and
//! solved by damped Newton; each Newton step is one tridiagonal solve.

use serde::{Deserialize, Serialize};

use super::linalg::solve_tridiagonal;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub start: f64,
    pub end: f64,
    pub intervals: usize,
}

impl Mesh {
    pub fn new(start: f64, end: f64, intervals: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || end <= start || intervals < 2 {
            return Err(Error::input("mesh needs finite start < end and at least two intervals"));
        }
        Ok(Mesh { start, end, intervals })
    }

    /// Mesh over [start, end] whose spacing is at most `h`.
    pub fn with_spacing(start: f64, end: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::input("mesh spacing must be positive"));
        }
        Mesh::new(start, end, ((end - start) / h).ceil().max(2.0) as usize)
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / self.intervals as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.intervals).map(|i| self.start + h * i as f64).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BvpOptions {
    /// Target for the largest interior residual.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for BvpOptions {
    fn default() -> Self {
        BvpOptions { tol: 1e-10, max_iterations: 100 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BvpSolution {
    pub t: Vec<f64>,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    /// Max-norm of the Numerov residual over interior nodes.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves q″ = f(t, q), q(start) = left, q(end) = right. `rhs` returns
/// `(f, ∂f/∂q)`; `guess` seeds Newton.
pub fn solve_bvp(
    rhs: impl Fn(f64, f64) -> (f64, f64),
    left: f64,
    right: f64,
    mesh: Mesh,
    guess: impl Fn(f64) -> f64,
    opts: BvpOptions,
) -> Result<BvpSolution> {
    if !(left.is_finite() && right.is_finite()) {
        return Err(Error::input("boundary values must be finite"));
    }
    let t = mesh.points();
    let n = mesh.intervals;
    let h = mesh.step();
    let h2 = h * h;
    let mut q: Vec<f64> = t.iter().map(|&x| guess(x)).collect();
    q[0] = left;
    q[n] = right;

    let residual = |q: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let (f, df): (Vec<f64>, Vec<f64>) = t.iter().zip(q).map(|(&x, &y)| rhs(x, y)).unzip();
        let r = (1..n)
            .map(|i| (q[i + 1] - 2.0 * q[i] + q[i - 1]) / h2 - (f[i + 1] + 10.0 * f[i] + f[i - 1]) / 12.0)
            .collect();
        (r, df)
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let (mut r, mut df) = residual(&q);
    let mut rn = norm(&r);
    let mut iterations = 0;
    while rn > opts.tol {
        if iterations >= opts.max_iterations || !rn.is_finite() {
            return Err(Error::Solver(format!(
                "Newton did not converge after {iterations} iterations (residual {rn:e}, q midpoint {:e})",
                q[n / 2]
            )));
        }
        iterations += 1;
        let m = n - 1;
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            diag[k] = -2.0 / h2 - 10.0 * df[i] / 12.0;
            if k > 0 {
                sub[k] = 1.0 / h2 - df[i - 1] / 12.0;
            }
            if k + 1 < m {
                sup[k] = 1.0 / h2 - df[i + 1] / 12.0;
            }
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = solve_tridiagonal(&sub, &diag, &sup, &neg)?;

        let mut lambda = 1.0;
        loop {
            let mut trial = q.clone();
            for k in 0..m {
                trial[k + 1] += lambda * delta[k];
            }
            let (tr, tdf) = residual(&trial);
            let tn = norm(&tr);
            if tn.is_finite() && (tn < rn || lambda < 1e-3) {
                q = trial;
                r = tr;
                df = tdf;
                rn = tn;
                break;
            }
            lambda *= 0.5;
        }
    }

    let f: Vec<f64> = t.iter().zip(&q).map(|(&x, &y)| rhs(x, y).0).collect();
    let dq = numerov_derivative(&q, &f, h);
    Ok(BvpSolution { t, q, dq, residual: rn, iterations })
}

/// Fourth-order first derivative consistent with q″ = f.
fn numerov_derivative(q: &[f64], f: &[f64], h: f64) -> Vec<f64> {
    let n = q.len() - 1;
    let mut dq = vec![0.0; n + 1];
    for i in 1..n {
        dq[i] = (q[i + 1] - q[i - 1]) / (2.0 * h) - h * (f[i + 1] - f[i - 1]) / 12.0;
    }
    dq[0] = (q[1] - q[0]) / h - h * (2.0 * f[0] + f[1]) / 6.0;
    dq[n] = (q[n] - q[n - 1]) / h + h * (2.0 * f[n] + f[n - 1]) / 6.0;
    if n >= 2 {
        // h³q⁗/24 corrections, q⁗ from the second difference of f
        dq[0] += h * (f[0] - 2.0 * f[1] + f[2]) / 24.0;
        dq[n] -= h * (f[n] - 2.0 * f[n - 1] + f[n - 2]) / 24.0;
    }
    dq
}
