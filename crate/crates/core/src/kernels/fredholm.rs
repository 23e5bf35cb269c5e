//! Fredholm determinants by Nyström discretisation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::determinant;
use crate::numerics::quadrature::{gauss_legendre, Domain, DEFAULT_MAP_SCALE};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FredholmConfig {
    /// Initial Gauss–Legendre node count; doubled up to twice.
    pub nodes: usize,
    /// Scale L of u ↦ s + L(1+u)/(1−u) on semi-infinite domains.
    pub map_scale: f64,
    /// Accepted difference between successive node counts.
    pub tol: f64,
    /// Kernel is a contraction, so the determinant lies in [0, 1].
    pub contraction: bool,
}

impl Default for FredholmConfig {
    fn default() -> Self {
        FredholmConfig { nodes: 40, map_scale: DEFAULT_MAP_SCALE, tol: 1e-10, contraction: false }
    }
}

impl FredholmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::input("Fredholm discretisation needs at least 8 nodes"));
        }
        if !(self.map_scale > 0.0 && self.tol > 0.0) {
            return Err(Error::input("map scale and tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FredholmValue {
    pub value: f64,
    /// Unclipped determinant at the accepted node count.
    pub raw: f64,
    /// |det(m) − det(m/2)| at acceptance.
    pub difference: f64,
    pub nodes: usize,
    /// The raw value fell outside [−1e−8, 1 + 1e−8] for a contraction kernel.
    pub clipped: bool,
}

/// Kernel evaluated on a whole node set at once, returning the row-major
/// matrix K(xᵢ, xⱼ). Lets kernels share per-node work.
pub type KernelTable<'a> = dyn Fn(&[f64]) -> Vec<f64> + Sync + 'a;

/// Nyström determinant det(I − √w K √w) at a fixed node count.
pub fn nystrom_det(kernel: &(dyn Fn(f64, f64) -> f64 + Sync), domain: Domain, m: usize) -> Result<f64> {
    nystrom_det_tabulated(&pointwise(kernel), domain, m)
}

fn pointwise<'a>(kernel: &'a (dyn Fn(f64, f64) -> f64 + Sync)) -> impl Fn(&[f64]) -> Vec<f64> + Sync + 'a {
    move |x: &[f64]| {
        let m = x.len();
        let mut k = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = kernel(x[i], x[j]);
                k[i * m + j] = v;
                k[j * m + i] = v;
            }
        }
        k
    }
}

fn nystrom_det_tabulated(table: &KernelTable<'_>, domain: Domain, m: usize) -> Result<f64> {
    let rule = gauss_legendre(m, domain)?;
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut a = table(&rule.nodes);
    for i in 0..m {
        for j in 0..m {
            let k = a[i * m + j];
            a[i * m + j] = if k.is_finite() { -sw[i] * k * sw[j] } else { 0.0 };
        }
        a[i * m + i] += 1.0;
    }
    Ok(determinant(a, m))
}

/// det(I − K) on `domain` for a symmetric kernel. A semi-infinite domain
/// takes its map scale from `cfg`. Starting from `cfg.nodes`
/// the node count is doubled until two successive values agree within
/// `cfg.tol`; after two doublings without agreement a numerical error
/// carrying the finest estimate is returned.
pub fn fredholm_det(
    kernel: &(dyn Fn(f64, f64) -> f64 + Sync),
    domain: Domain,
    cfg: &FredholmConfig,
) -> Result<FredholmValue> {
    fredholm_det_tabulated(&pointwise(kernel), domain, cfg)
}

/// [`fredholm_det`] for a kernel supplied as a [`KernelTable`].
pub fn fredholm_det_tabulated(table: &KernelTable<'_>, domain: Domain, cfg: &FredholmConfig) -> Result<FredholmValue> {
    cfg.validate()?;
    let domain = match domain {
        Domain::UpperTail { start, .. } => Domain::UpperTail { start, scale: cfg.map_scale },
        d => d,
    };
    let mut m = cfg.nodes;
    let mut prev = nystrom_det_tabulated(table, domain, m)?;
    for _ in 0..2 {
        m *= 2;
        let cur = nystrom_det_tabulated(table, domain, m)?;
        let difference = (cur - prev).abs();
        if difference < cfg.tol {
            let clipped = cfg.contraction && !(-1e-8..=1.0 + 1e-8).contains(&cur);
            let value = if cfg.contraction { cur.clamp(0.0, 1.0) } else { cur };
            return Ok(FredholmValue { value, raw: cur, difference, nodes: m, clipped });
        }
        prev = cur;
    }
    Err(Error::numerical(format!("Fredholm determinant not converged at {m} nodes"), prev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate_adaptive, AdaptiveOptions};

    #[test]
    fn zero_kernel() {
        let v = fredholm_det(&|_, _| 0.0, Domain::Finite { a: 0.0, b: 1.0 }, &FredholmConfig::default()).unwrap();
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn rank_one() {
        let f = |x: f64| (3.0 * x).sin() * (-x).exp();
        let norm = integrate_adaptive(|x| f(x) * f(x), 0.0, 1.0, AdaptiveOptions::with_tol(1e-14)).unwrap();
        let v = fredholm_det(&|x, y| f(x) * f(y), Domain::Finite { a: 0.0, b: 1.0 }, &FredholmConfig::default())
            .unwrap();
        assert!((v.value - (1.0 - norm)).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_rank_one() {
        // f = e^{−x} on (1, ∞): ∫f² = e^{−2}/2
        let v = fredholm_det(
            &|x, y| (-x - y).exp(),
            Domain::UpperTail { start: 1.0, scale: 1.0 },
            &FredholmConfig { map_scale: 2.0, ..Default::default() },
        )
        .unwrap();
        assert!((v.value - (1.0 - (-2f64).exp() / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn unresolved_kernel_errors() {
        let cfg = FredholmConfig { nodes: 8, tol: 1e-14, ..Default::default() };
        let r = fredholm_det(&|x, y| 50.0 * ((200.0 * (x - y)).cos()), Domain::Finite { a: 0.0, b: 1.0 }, &cfg);
        assert!(matches!(r, Err(Error::Numerical { .. })));
    }

    #[test]
    fn clipping_flag() {
        let cfg = FredholmConfig { contraction: true, ..Default::default() };
        let v = fredholm_det(&|_, _| 2.0, Domain::Finite { a: 0.0, b: 1.0 }, &cfg).unwrap();
        assert!(v.clipped);
        assert_eq!(v.value, 0.0);
        assert!((v.raw + 1.0).abs() < 1e-12);
        assert!(FredholmConfig { nodes: 4, ..Default::default() }.validate().is_err());
    }
}
