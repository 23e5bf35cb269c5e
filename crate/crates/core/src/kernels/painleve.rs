//! The Hastings–McLeod solution of q″ = 2q³ + tq.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::airy::airy;
use crate::error::{Error, Result};
use crate::numerics::bvp::{solve_bvp, BvpOptions, Mesh};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PainleveSolution {
    pub t: Vec<f64>,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    pub residual: f64,
}

pub const DEFAULT_LEFT: f64 = 20.0;
pub const DEFAULT_RIGHT: f64 = 8.0;
pub const DEFAULT_INTERVALS: usize = 5600;

/// Solves the boundary value problem on [−L, T] with q(−L) = √(L/2) and
/// q(T) = Ai(T), starting Newton from a blend of the two asymptotic
/// regimes.
pub fn hastings_mcleod(left: f64, right: f64, intervals: usize) -> Result<PainleveSolution> {
    if !(left >= 6.0 && right >= 6.0) {
        return Err(Error::input("Hastings–McLeod interval needs L ≥ 6 and T ≥ 6"));
    }
    if right > 40.0 {
        return Err(Error::input("right end must lie in the Airy range"));
    }
    let mesh = Mesh::new(-left, right, intervals)?;
    let guess = |t: f64| {
        let s = 1.0 / (1.0 + (2.0 * t).exp());
        let ai = airy(t.clamp(-40.0, 40.0)).map(|a| a.ai).unwrap_or(0.0);
        s * (0.5 * (-t).max(0.0)).sqrt() + (1.0 - s) * ai.max(0.0)
    };
    let opts = BvpOptions { tol: 1e-9, max_iterations: 60 };
    let sol = solve_bvp(
        |t, q| (2.0 * q * q * q + t * q, 6.0 * q * q + t),
        (0.5 * left).sqrt(),
        airy(right)?.ai,
        mesh,
        guess,
        opts,
    )
    .map_err(|e| Error::Solver(format!("{e}; retry with a finer mesh")))?;
    if let Some(i) = sol.q.iter().position(|&v| v <= 0.0) {
        return Err(Error::Solver(format!(
            "Newton reached a non-separatrix branch (q ≤ 0 at t = {}); retry with a finer mesh",
            sol.t[i]
        )));
    }
    Ok(PainleveSolution { t: sol.t, q: sol.q, dq: sol.dq, residual: sol.residual })
}

/// Solution on the default interval [−20, 8], computed once.
pub fn default_solution() -> &'static PainleveSolution {
    static SOL: OnceLock<PainleveSolution> = OnceLock::new();
    SOL.get_or_init(|| {
        hastings_mcleod(DEFAULT_LEFT, DEFAULT_RIGHT, DEFAULT_INTERVALS).expect("default Hastings–McLeod solve")
    })
}

impl PainleveSolution {
    pub fn step(&self) -> f64 {
        self.t[1] - self.t[0]
    }

    /// Cubic Hermite interpolation of q and q′ at t inside the grid.
    pub fn interpolate(&self, t: f64) -> (f64, f64) {
        let h = self.step();
        let n = self.t.len() - 1;
        let i = (((t - self.t[0]) / h).floor() as usize).min(n - 1);
        let s = (t - self.t[i]) / h;
        let (q0, q1, d0, d1) = (self.q[i], self.q[i + 1], self.dq[i] * h, self.dq[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let q = (2.0 * s3 - 3.0 * s2 + 1.0) * q0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * q1 + (s3 - s2) * d1;
        let dq = ((6.0 * s2 - 6.0 * s) * q0 + (3.0 * s2 - 4.0 * s + 1.0) * d0 + (-6.0 * s2 + 6.0 * s) * q1 + (3.0 * s2 - 2.0 * s) * d1) / h;
        (q, dq)
    }

    /// H = q′² − tq² − q⁴ on the grid; H′ = −q².
    pub fn hamiltonian(&self) -> Vec<f64> {
        self.t.iter().zip(self.q.iter().zip(&self.dq)).map(|(&t, (&q, &d))| d * d - t * q * q - q.powi(4)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_behaviour() {
        let s = default_solution();
        assert!(s.residual < 1e-8);
        assert!(s.q.iter().all(|&v| v > 0.0));
        let (q6, _) = s.interpolate(6.0);
        assert!((q6 - airy(6.0).unwrap().ai).abs() < 1e-5);
        let (qm8, _) = s.interpolate(-8.0);
        assert!((qm8 / 2.0 - 1.0).abs() < 0.02, "{qm8}");
        assert_eq!(*s.q.last().unwrap(), airy(8.0).unwrap().ai);
    }

    #[test]
    fn known_value_at_zero() {
        // q(0) of the Hastings–McLeod solution, 0.36706155...
        let (q0, _) = default_solution().interpolate(0.0);
        assert!((q0 - 0.367_061_552_9).abs() < 1e-7, "{q0}");
    }

    #[test]
    fn hamiltonian_derivative_identity() {
        let s = default_solution();
        let h = s.hamiltonian();
        let dt = s.step();
        for i in (2..s.t.len() - 2).step_by(37) {
            let d = (-h[i + 2] + 8.0 * h[i + 1] - 8.0 * h[i - 1] + h[i - 2]) / (12.0 * dt);
            assert!((d + s.q[i] * s.q[i]).abs() < 1e-6, "t={}", s.t[i]);
        }
    }

    #[test]
    fn rejects_short_interval() {
        assert!(hastings_mcleod(4.0, 8.0, 1000).is_err());
    }
}
