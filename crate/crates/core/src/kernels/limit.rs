//! Sine and Airy limit kernels and the comparison against finite-n GUE
//! kernels.

use serde::{Deserialize, Serialize};

use super::airy::{airy_unbounded, AIRY_MIN};
use super::fredholm::{fredholm_det, FredholmConfig, FredholmValue};
use crate::error::{Error, Result};
use crate::numerics::quadrature::Domain;
use crate::orthopoly::{cd_kernel, CDContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Sine,
    Airy,
}

/// Below this separation the confluent (diagonal) limit is used.
const CONFLUENT: f64 = 1e-8;

/// K(X, Y) for the sine or Airy kernel. The Airy kernel needs both
/// arguments ≥ −40.
pub fn kernel_eval(kind: KernelKind, x: f64, y: f64) -> Result<f64> {
    match kind {
        KernelKind::Sine => Ok(sine_kernel(x, y)),
        KernelKind::Airy => {
            if x.min(y) < AIRY_MIN {
                return Err(Error::input(format!("Airy kernel argument below {AIRY_MIN}")));
            }
            Ok(airy_kernel(x, y))
        }
    }
}

fn sine_kernel(x: f64, y: f64) -> f64 {
    let d = std::f64::consts::PI * (x - y);
    if d.abs() < 1e-4 {
        1.0 - d * d / 6.0 + d.powi(4) / 120.0
    } else {
        d.sin() / d
    }
}

pub(crate) fn airy_kernel(x: f64, y: f64) -> f64 {
    if (x - y).abs() < CONFLUENT {
        let a = airy_unbounded(0.5 * (x + y));
        return a.ai_prime * a.ai_prime - a.x * a.ai * a.ai;
    }
    let a = airy_unbounded(x);
    let b = airy_unbounded(y);
    (a.ai * b.ai_prime - a.ai_prime * b.ai) / (x - y)
}

/// Airy kernel on a node set, one Airy evaluation per node.
pub(crate) fn airy_table(nodes: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let vals: Vec<_> = nodes.iter().map(|&x| airy_unbounded(x)).collect();
    let mut k = vec![0.0; m * m];
    for i in 0..m {
        let a = vals[i];
        k[i * m + i] = a.ai_prime * a.ai_prime - a.x * a.ai * a.ai;
        for j in i + 1..m {
            let b = vals[j];
            let v = if (a.x - b.x).abs() < CONFLUENT {
                airy_kernel(a.x, b.x)
            } else {
                (a.ai * b.ai_prime - a.ai_prime * b.ai) / (a.x - b.x)
            };
            k[i * m + j] = v;
            k[j * m + i] = v;
        }
    }
    k
}

/// P[λ_max ≤ a] for the GUE of size n (σ² = 1) as det(I − K̃_n) on
/// (a, ∞). The Gaussian decay lets the domain be truncated where the
/// kernel is below 1e−40.
pub fn gue_gap_probability(n: usize, a: f64, cfg: &FredholmConfig) -> Result<FredholmValue> {
    let ctx = CDContext::new(n)?;
    let b = a.max(2.0) + 14.0 / (n as f64).sqrt();
    let cfg = FredholmConfig { contraction: true, ..*cfg };
    fredholm_det(&|x, y| cd_kernel(&ctx, x, y), Domain::Finite { a, b }, &cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Bulk { x0: f64 },
    Edge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelLimitReport {
    pub n: usize,
    pub regime: Regime,
    /// Square window [lo, hi]² in scaled coordinates.
    pub window: (f64, f64),
    pub grid_points: usize,
    pub sup_error: f64,
    /// Bulk only: |K̃_n(x₀, x₀)/n − ρ_sc(x₀)|.
    pub density_error: Option<f64>,
}

const WINDOW: (f64, f64) = (-2.0, 2.0);
const GRID: usize = 41;

/// Sup-distance between the rescaled GUE kernel (σ² = 1, N = n) and its
/// limit. Bulk: (nρ)⁻¹K̃_n(x₀ + X/(nρ), x₀ + Y/(nρ)) against the sine kernel,
/// ρ the semicircle density at x₀. Edge: n^{−2/3}K̃_n(2 + n^{−2/3}X, 2 +
/// n^{−2/3}Y) against the Airy kernel.
pub fn kernel_limit_check(n: usize, regime: Regime) -> Result<KernelLimitReport> {
    if n < 20 {
        return Err(Error::input("kernel limit check needs n ≥ 20"));
    }
    let ctx = CDContext::new(n)?;
    let nf = n as f64;
    let grid: Vec<f64> =
        (0..GRID).map(|i| WINDOW.0 + (WINDOW.1 - WINDOW.0) * i as f64 / (GRID - 1) as f64).collect();
    let (scaled, limit, density_error): (Box<dyn Fn(f64, f64) -> f64>, KernelKind, _) = match regime {
        Regime::Bulk { x0 } => {
            if !(x0 > -2.0 && x0 < 2.0) {
                return Err(Error::input("bulk point must lie in (−2, 2)"));
            }
            let rho = (4.0 - x0 * x0).sqrt() / (2.0 * std::f64::consts::PI);
            let c = nf * rho;
            let derr = (cd_kernel(&ctx, x0, x0) / nf - rho).abs();
            (Box::new(move |x, y| cd_kernel(&ctx, x0 + x / c, x0 + y / c) / c), KernelKind::Sine, Some(derr))
        }
        Regime::Edge => {
            let c = nf.powf(-2.0 / 3.0);
            (Box::new(move |x, y| c * cd_kernel(&ctx, 2.0 + c * x, 2.0 + c * y)), KernelKind::Airy, None)
        }
    };
    let mut sup: f64 = 0.0;
    for (i, &x) in grid.iter().enumerate() {
        for &y in &grid[i..] {
            sup = sup.max((scaled(x, y) - kernel_eval(limit, x, y)?).abs());
        }
    }
    Ok(KernelLimitReport { n, regime, window: WINDOW, grid_points: GRID * GRID, sup_error: sup, density_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EnsembleKind;
    use crate::numerics::quadrature::{integrate_adaptive, AdaptiveOptions};
    use crate::orthopoly::{joint_pdf_log, partition_log, JointParams};
    use crate::kernels::airy::airy;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn diagonals_and_symmetry() {
        assert_eq!(kernel_eval(KernelKind::Sine, 0.7, 0.7).unwrap(), 1.0);
        for x in [-3.0, 0.0, 1.4] {
            let a = airy(x).unwrap();
            let k = kernel_eval(KernelKind::Airy, x, x).unwrap();
            assert!((k - (a.ai_prime.powi(2) - x * a.ai.powi(2))).abs() < 1e-15);
            let near = kernel_eval(KernelKind::Airy, x, x + 1e-5).unwrap();
            assert!((near - k).abs() < 1e-5);
        }
        let mut state = 17u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0
        };
        for _ in 0..200 {
            let (x, y) = (rnd(), rnd());
            for kind in [KernelKind::Sine, KernelKind::Airy] {
                assert_eq!(kernel_eval(kind, x, y).unwrap(), kernel_eval(kind, y, x).unwrap());
            }
        }
        assert!(kernel_eval(KernelKind::Airy, -41.0, 0.0).is_err());
    }

    #[test]
    fn one_by_one_gap_is_gaussian_cdf() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        for a in [-1.5, 0.0, 0.8, 2.5] {
            let v = gue_gap_probability(1, a, &FredholmConfig::default()).unwrap();
            assert!((v.value - normal.cdf(a)).abs() < 1e-8, "a={a}");
        }
    }

    #[test]
    fn two_by_two_gap_matches_joint_density() {
        let p = JointParams { sigma2: 1.0, n: 2 };
        let z = partition_log(2).unwrap().exp();
        for a in [-0.5, 0.3, 1.2] {
            let inner = |x: f64| {
                integrate_adaptive(
                    |y| joint_pdf_log(EnsembleKind::Gue, &[x, y], p).unwrap().exp(),
                    f64::NEG_INFINITY,
                    a,
                    AdaptiveOptions::with_tol(1e-13),
                )
                .unwrap()
            };
            let brute = integrate_adaptive(inner, f64::NEG_INFINITY, a, AdaptiveOptions::with_tol(1e-12)).unwrap() / z;
            let fred = gue_gap_probability(2, a, &FredholmConfig::default()).unwrap().value;
            assert!((brute - fred).abs() < 1e-6, "a={a}: {brute} vs {fred}");
        }
    }

    #[test]
    fn bulk_limit() {
        let r200 = kernel_limit_check(200, Regime::Bulk { x0: 0.0 }).unwrap();
        let r50 = kernel_limit_check(50, Regime::Bulk { x0: 0.0 }).unwrap();
        assert!(r200.sup_error < 0.05, "{}", r200.sup_error);
        assert!(r200.sup_error < r50.sup_error);
        let r400 = kernel_limit_check(400, Regime::Bulk { x0: 0.0 }).unwrap();
        assert!(r400.density_error.unwrap() < 0.02);
    }

    #[test]
    fn edge_limit() {
        let r200 = kernel_limit_check(200, Regime::Edge).unwrap();
        let r50 = kernel_limit_check(50, Regime::Edge).unwrap();
        assert!(r200.sup_error < r50.sup_error, "{} vs {}", r200.sup_error, r50.sup_error);
        assert!(kernel_limit_check(10, Regime::Edge).is_err());
        assert!(kernel_limit_check(100, Regime::Bulk { x0: 2.0 }).is_err());
    }
}
