//! Hermite wave functions, Christoffel–Darboux kernels and exact finite-n
//! eigenvalue statistics of the GUE.
//!
//! The Gaussian weight is e^{−Nx²/2}. Wave functions are
//! φ_k(u) = e^{−u²/4} He_k(u) / √(√(2π) k!), orthonormal on ℝ, and the GUE
//! kernel is K̃_n(x, y) = √N Σ_{k<n} φ_k(√N x) φ_k(√N y).

use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleKind;
use crate::error::{Error, Result};
use crate::numerics::linalg::determinant;

const RESCALE_AT: f64 = 1e150;

/// φ_n, φ_{n−1}, φ_{n−2} and φ_n′ at one abscissa. Stored values are
/// mantissas: the actual value is `phi · exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveFunctionEval {
    pub n: usize,
    pub x: f64,
    pub phi: f64,
    pub phi_prev: f64,
    pub phi_prev2: f64,
    pub dphi: f64,
    pub log_scale: f64,
}

impl WaveFunctionEval {
    pub fn value(&self) -> f64 {
        self.phi * self.log_scale.exp()
    }

    pub fn prev(&self) -> f64 {
        self.phi_prev * self.log_scale.exp()
    }

    pub fn derivative(&self) -> f64 {
        self.dphi * self.log_scale.exp()
    }
}

/// Evaluates φ_n(x) by the three-term recurrence
/// φ_{k+1} = (x φ_k − √k φ_{k−1})/√(k+1), carrying a separate log-magnitude
/// so nothing overflows or underflows; φ_n′ = −(x/2)φ_n + √n φ_{n−1}.
pub fn hermite_phi(n: usize, x: f64) -> WaveFunctionEval {
    let mut log_scale = -0.25 * x * x;
    let mut prev2 = 0.0;
    let mut prev = 0.0;
    let mut cur = (2.0 * std::f64::consts::PI).powf(-0.25);
    for k in 0..n {
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev2 = prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            prev /= RESCALE_AT;
            prev2 /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
    }
    let dphi = -0.5 * x * cur + (n as f64).sqrt() * prev;
    WaveFunctionEval { n, x, phi: cur, phi_prev: prev, phi_prev2: prev2, dphi, log_scale }
}

/// Monic (probabilists') Hermite polynomial He_n(x) by plain recurrence.
pub fn hermite_poly(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let c = x * b - k as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Kernel context: matrix size n and weight scale N.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CDContext {
    pub n: usize,
    pub weight_scale: f64,
}

impl CDContext {
    /// The GUE normalisation N = n.
    pub fn new(n: usize) -> Result<Self> {
        CDContext::with_weight(n, n as f64)
    }

    pub fn with_weight(n: usize, weight_scale: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("kernel needs n ≥ 1"));
        }
        if !(weight_scale > 0.0 && weight_scale.is_finite()) {
            return Err(Error::input("weight scale must be positive"));
        }
        Ok(CDContext { n, weight_scale })
    }

    /// log h_{n−1}, the squared norm of the monic P_{n−1} for this weight.
    pub fn log_norm_prev(&self) -> f64 {
        log_h(self.n - 1, self.weight_scale)
    }
}

/// Threshold below which the confluent formula replaces the divided difference.
pub const CONFLUENT_THRESHOLD: f64 = 1e-6;

/// K̃_n(x, y) via the Christoffel–Darboux formula.
pub fn cd_kernel(ctx: &CDContext, x: f64, y: f64) -> f64 {
    let sn = ctx.weight_scale.sqrt();
    let n = ctx.n;
    let nf = n as f64;
    if (x - y).abs() < CONFLUENT_THRESHOLD {
        let m = 0.5 * (x + y);
        let e = hermite_phi(n, sn * m);
        let s = (2.0 * e.log_scale).exp();
        let v = nf * e.phi_prev * e.phi_prev - (nf * (nf - 1.0)).sqrt() * e.phi_prev2 * e.phi;
        return sn * v * s;
    }
    let a = hermite_phi(n, sn * x);
    let b = hermite_phi(n, sn * y);
    let s = (a.log_scale + b.log_scale).exp();
    nf.sqrt() * (a.phi * b.phi_prev - a.phi_prev * b.phi) * s / (x - y)
}

/// k-point correlation det[K̃_n(xᵢ, xⱼ)].
pub fn janossy(ctx: &CDContext, points: &[f64]) -> Result<f64> {
    let k = points.len();
    if k > ctx.n {
        return Err(Error::input(format!("{k} points exceed n = {}; the correlation vanishes identically", ctx.n)));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let mut a = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let v = cd_kernel(ctx, points[i], points[j]);
            a[i * k + j] = v;
            a[j * k + i] = v;
        }
    }
    Ok(determinant(a, k))
}

/// One-point density ρ_n⁽¹⁾(x) = K̃_n(x, x) of the GUE with N = n; it
/// integrates to n.
pub fn exact_gue_density(n: usize, x: f64) -> Result<f64> {
    Ok(cd_kernel(&CDContext::new(n)?, x, x).max(0.0))
}

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

/// log h_m with h_m = √(2π) m! N^{−(m+1/2)}.
fn log_h(m: usize, big_n: f64) -> f64 {
    0.5 * (2.0 * std::f64::consts::PI).ln() + ln_factorial(m) - (m as f64 + 0.5) * big_n.ln()
}

/// log Z_n = log(n! ∏_{m<n} h_m) for the weight e^{−Nx²/2} with N = n.
pub fn partition_log(n: usize) -> Result<f64> {
    partition_log_with_weight(n, n as f64)
}

pub fn partition_log_with_weight(n: usize, big_n: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::input("partition function needs n ≥ 1"));
    }
    Ok(ln_factorial(n) + (0..n).map(|m| log_h(m, big_n)).sum::<f64>())
}

/// (log|Δ|, sign of Δ) for Δ = ∏_{i<j}(λⱼ − λᵢ).
pub fn vandermonde_log(lambdas: &[f64]) -> (f64, f64) {
    let mut log = 0.0;
    let mut sign = 1.0;
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            let d = lambdas[j] - lambdas[i];
            if d == 0.0 {
                return (f64::NEG_INFINITY, 0.0);
            }
            log += d.abs().ln();
            if d < 0.0 {
                sign = -sign;
            }
        }
    }
    (log, sign)
}

/// Parameters of the unnormalised joint eigenvalue density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointParams {
    pub sigma2: f64,
    /// Number of observations for Wishart; ignored for GOE/GUE, whose
    /// matrix order is the number of eigenvalues.
    pub n: usize,
}

/// Log of the unnormalised joint eigenvalue density:
/// GOE/GUE |Δ|^β exp(−(nβ/4σ²) Σλ²);
/// Wishart |Δ|^β ∏ λ^{(β/2)(n−p)+(β−2)/2} exp(−(nβ/2σ²) Σλ).
pub fn joint_pdf_log(kind: EnsembleKind, lambdas: &[f64], params: JointParams) -> Result<f64> {
    if !(params.sigma2 > 0.0) {
        return Err(Error::input("σ² must be positive"));
    }
    let beta = kind.beta() as f64;
    let (logv, _) = vandermonde_log(lambdas);
    if logv == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    match kind {
        EnsembleKind::Goe | EnsembleKind::Gue => {
            let n = lambdas.len() as f64;
            let sq: f64 = lambdas.iter().map(|l| l * l).sum();
            Ok(beta * logv - n * beta / (4.0 * params.sigma2) * sq)
        }
        EnsembleKind::WishartReal | EnsembleKind::WishartComplex => {
            if lambdas.iter().any(|&l| l < 0.0) {
                return Err(Error::input("Wishart eigenvalues must be nonnegative"));
            }
            let p = lambdas.len() as f64;
            let n = params.n as f64;
            let expo = 0.5 * beta * (n - p) + 0.5 * (beta - 2.0);
            let log_prod: f64 = lambdas.iter().map(|l| l.ln()).sum();
            let sum: f64 = lambdas.iter().sum();
            let pow = if expo == 0.0 { 0.0 } else { expo * log_prod };
            Ok(beta * logv + pow - n * beta / (2.0 * params.sigma2) * sum)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{gauss_legendre, integrate_adaptive, AdaptiveOptions, Domain};

    #[test]
    fn raw_hermite() {
        assert_eq!(hermite_poly(2, 0.0), -1.0);
        for x in [0.3, 1.7, -2.2] {
            assert!((hermite_poly(3, -x) + hermite_poly(3, x)).abs() < 1e-14);
            assert!((hermite_poly(3, x) - (x * x * x - 3.0 * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_matches_raw_formula() {
        for n in [0usize, 1, 2, 5, 12] {
            for x in [-2.5, 0.0, 0.7, 3.1] {
                let raw = (-x * x / 4.0f64).exp() * hermite_poly(n, x)
                    / ((2.0 * std::f64::consts::PI).sqrt() * (1..=n).map(|k| k as f64).product::<f64>()).sqrt();
                assert!((hermite_phi(n, x).value() - raw).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn phi_orthonormal() {
        for n in [0usize, 1, 7, 20, 50] {
            let v = integrate_adaptive(|x| hermite_phi(n, x).value().powi(2), f64::NEG_INFINITY, f64::INFINITY, AdaptiveOptions::with_tol(1e-12))
                .unwrap();
            assert!((v - 1.0).abs() < 1e-8, "n={n}: {v}");
        }
        let cross =
            integrate_adaptive(|x| hermite_phi(4, x).value() * hermite_phi(6, x).value(), f64::NEG_INFINITY, f64::INFINITY, AdaptiveOptions::default())
                .unwrap();
        assert!(cross.abs() < 1e-9);
    }

    #[test]
    fn derivative_identity() {
        let h = 1e-5;
        for x in [-1.3, 0.2, 2.9] {
            let fd = (hermite_phi(9, x + h).value() - hermite_phi(9, x - h).value()) / (2.0 * h);
            assert!((fd - hermite_phi(9, x).derivative()).abs() < 1e-8);
        }
    }

    #[test]
    fn n1_kernel_is_gaussian() {
        let ctx = CDContext::with_weight(1, 1.0).unwrap();
        for x in [-2.0, 0.0, 0.4, 1.5] {
            let g = (-x * x / 2.0f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((cd_kernel(&ctx, x, x) - g).abs() < 1e-15);
            assert!((exact_gue_density(1, x).unwrap() - g).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_matches_direct_sum() {
        let ctx = CDContext::new(7).unwrap();
        let sn = 7f64.sqrt();
        for (x, y) in [(0.1, 0.5), (-0.7, 1.2), (0.3, 0.3 + 1e-8)] {
            let direct: f64 = (0..7).map(|k| hermite_phi(k, sn * x).value() * hermite_phi(k, sn * y).value()).sum::<f64>() * sn;
            assert!((cd_kernel(&ctx, x, y) - direct).abs() < 1e-9, "({x},{y})");
            assert_eq!(cd_kernel(&ctx, x, y), cd_kernel(&ctx, y, x));
        }
    }

    #[test]
    fn density_integrates_to_n() {
        for n in [1usize, 5, 10, 50] {
            let v = integrate_adaptive(|x| exact_gue_density(n, x).unwrap(), f64::NEG_INFINITY, f64::INFINITY, AdaptiveOptions::with_tol(1e-11))
                .unwrap();
            assert!((v - n as f64).abs() < 1e-8, "n={n}: {v}");
        }
    }

    #[test]
    fn reproducing_property() {
        let ctx = CDContext::new(5).unwrap();
        for (x, y) in [(0.2, -0.4), (1.0, 0.9), (-1.3, 0.0)] {
            let v = integrate_adaptive(|z| cd_kernel(&ctx, x, z) * cd_kernel(&ctx, z, y), f64::NEG_INFINITY, f64::INFINITY, AdaptiveOptions::with_tol(1e-12))
                .unwrap();
            assert!((v - cd_kernel(&ctx, x, y)).abs() < 1e-7);
        }
    }

    fn tensor_integral(ctx: &CDContext, k: usize) -> f64 {
        let rule = gauss_legendre(60, Domain::Finite { a: -5.0, b: 5.0 }).unwrap();
        let m = rule.len();
        let table: Vec<f64> =
            (0..m * m).map(|ij| cd_kernel(ctx, rule.nodes[ij / m], rule.nodes[ij % m])).collect();
        let mut total = 0.0;
        let mut idx = vec![0usize; k];
        loop {
            let mut a = vec![0.0; k * k];
            let mut w = 1.0;
            for r in 0..k {
                w *= rule.weights[idx[r]];
                for c in 0..k {
                    a[r * k + c] = table[idx[r] * m + idx[c]];
                }
            }
            total += w * determinant(a, k);
            let mut pos = 0;
            loop {
                if pos == k {
                    return total;
                }
                idx[pos] += 1;
                if idx[pos] < m {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn correlation_normalisation() {
        for (n, k) in [(3usize, 2usize), (4, 2), (5, 2), (5, 3)] {
            let ctx = CDContext::new(n).unwrap();
            let want: f64 = (n - k + 1..=n).map(|v| v as f64).product();
            let got = tensor_integral(&ctx, k);
            assert!((got - want).abs() < 1e-6, "n={n} k={k}: {got}");
        }
    }

    #[test]
    fn janossy_basics() {
        let ctx = CDContext::new(4).unwrap();
        assert!((janossy(&ctx, &[0.3]).unwrap() - cd_kernel(&ctx, 0.3, 0.3)).abs() < 1e-15);
        assert!(janossy(&ctx, &[0.5, 0.5]).unwrap().abs() < 1e-10);
        assert!(janossy(&ctx, &[0.0; 5]).is_err());
    }

    #[test]
    fn partition_values() {
        assert!((partition_log_with_weight(1, 1.0).unwrap() - 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-15);
        assert!((partition_log(2).unwrap() - std::f64::consts::PI.ln()).abs() < 1e-14);
        let vals: Vec<f64> = (1..=200).map(|n| partition_log(n).unwrap()).collect();
        assert!(vals.iter().all(|v| v.is_finite()));
        // Z₁ = √(2π) < Z₂ = π, then strictly decreasing
        assert!(vals[1] > vals[0]);
        assert!(vals[1..].windows(2).all(|w| w[1] < w[0]));
        assert!(partition_log(1000).unwrap().is_finite());
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_log(&[0.0, 1.0]).0, 0.0);
        assert!((vandermonde_log(&[1.0, 2.0, 3.0]).0 - 2f64.ln()).abs() < 1e-15);
        assert_eq!(vandermonde_log(&[1.0, 1.0]).0, f64::NEG_INFINITY);
        let pts: [f64; 5] = [0.3, -1.2, 2.5, 0.9, -0.4];
        let mut a = vec![0.0; 25];
        for i in 0..5 {
            for j in 0..5 {
                a[i * 5 + j] = pts[j].powi(i as i32);
            }
        }
        let det = determinant(a, 5);
        let (lg, sign) = vandermonde_log(&pts);
        assert!((lg - det.abs().ln()).abs() < 1e-10);
        assert_eq!(sign, det.signum());
    }

    #[test]
    fn joint_density_gue2_normalises_to_partition() {
        let p = JointParams { sigma2: 1.0, n: 2 };
        let inner = |x: f64| {
            integrate_adaptive(
                |y| joint_pdf_log(EnsembleKind::Gue, &[x, y], p).unwrap().exp(),
                f64::NEG_INFINITY,
                f64::INFINITY,
                AdaptiveOptions::with_tol(1e-12),
            )
            .unwrap()
        };
        let z = integrate_adaptive(inner, f64::NEG_INFINITY, f64::INFINITY, AdaptiveOptions::with_tol(1e-11)).unwrap();
        let exact = partition_log(2).unwrap().exp();
        assert!(((z - exact) / exact).abs() < 1e-6, "{z} vs {exact}");
    }

    #[test]
    fn joint_density_edge_cases() {
        let p = JointParams { sigma2: 1.0, n: 5 };
        assert_eq!(joint_pdf_log(EnsembleKind::Goe, &[0.5, 0.5], p).unwrap(), f64::NEG_INFINITY);
        assert!(joint_pdf_log(EnsembleKind::WishartReal, &[1.0, -0.1], p).is_err());
        let a = joint_pdf_log(EnsembleKind::WishartComplex, &[1.0, 2.0, 0.5], p).unwrap();
        let b = joint_pdf_log(EnsembleKind::WishartComplex, &[0.5, 1.0, 2.0], p).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn overflow_safety() {
        let ctx = CDContext::new(2000).unwrap();
        for x in [-3.0, -2.0, 0.0, 1.99, 2.5, 3.0] {
            let v = cd_kernel(&ctx, x, x);
            assert!(v.is_finite(), "x={x}");
            assert!(cd_kernel(&ctx, x, x + 0.01).is_finite());
        }
        assert!(hermite_phi(10000, 1000.0).value().is_finite());
    }
}
