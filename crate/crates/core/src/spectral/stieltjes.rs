use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::law::{mp_edges, LawDescriptor};
use super::Spectrum;
use crate::error::{Error, Result};

/// W(z) = ∫ dμ(x)/(z − x) for z off the support of `law`.
pub fn stieltjes(law: &LawDescriptor, z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::input("Stieltjes argument must be finite"));
    }
    let on_support = |lo: f64, hi: f64| z.im == 0.0 && z.re >= lo && z.re <= hi;
    match law {
        LawDescriptor::Semicircle { sigma2 } => {
            let e = 2.0 * sigma2.sqrt();
            if on_support(-e, e) {
                return Err(Error::input(format!("z = {z} lies on the semicircle support")));
            }
            // z − √(z² − 4σ²) written without cancellation
            Ok(2.0 / (z + edge_root(z, -e, e)))
        }
        LawDescriptor::MarchenkoPastur { sigma2, gamma } => {
            let (a, b) = mp_edges(*sigma2, *gamma);
            if on_support(a, b) || (*gamma < 1.0 && z == Complex64::new(0.0, 0.0)) {
                return Err(Error::input(format!("z = {z} lies on the Marčenko–Pastur support")));
            }
            if z.norm() < 1e-12 * sigma2 {
                // removable singularity at the origin when γ > 1
                let d = 1e-6 * a;
                let up = stieltjes(law, Complex64::new(d, 0.0))?;
                let down = stieltjes(law, Complex64::new(-d, 0.0))?;
                return Ok(0.5 * (up + down));
            }
            let num = (1.0 - gamma) * sigma2 + gamma * ((a + b) * z - a * b) / (z + edge_root(z, a, b));
            Ok(num / (2.0 * sigma2 * z))
        }
        LawDescriptor::AtomicMixture { atoms } => {
            if atoms.iter().any(|a| a.1 > 0.0 && z.im == 0.0 && z.re == a.0) {
                return Err(Error::input(format!("z = {z} is an atom")));
            }
            Ok(atoms.iter().map(|&(x, m)| m / (z - x)).sum())
        }
        LawDescriptor::GridDensity { x, density, atoms } => {
            if on_support(x[0], x[x.len() - 1]) || atoms.iter().any(|a| z.im == 0.0 && z.re == a.0) {
                return Err(Error::input(format!("z = {z} lies on the grid law support")));
            }
            let mut w: Complex64 = atoms.iter().map(|&(x0, m)| m / (z - x0)).sum();
            for k in 1..x.len() {
                let h = x[k] - x[k - 1];
                w += 0.5 * h * (density[k - 1] / (z - x[k - 1]) + density[k] / (z - x[k]));
            }
            Ok(w)
        }
    }
}

/// √((z − hi)(z − lo)) on the branch that behaves like z at infinity, taken as
/// the product of principal roots (cut exactly on [lo, hi]).
fn edge_root(z: Complex64, lo: f64, hi: f64) -> Complex64 {
    (z - hi).sqrt() * (z - lo).sqrt()
}

/// n⁻¹ Σ 1/(z − λᵢ).
pub fn empirical_stieltjes(spec: &Spectrum, z: Complex64) -> Complex64 {
    let n = spec.len() as f64;
    spec.values().iter().map(|&l| 1.0 / (z - l)).sum::<Complex64>() / n
}

/// Decreasing η values used to approach the real axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaSchedule(pub Vec<f64>);

impl Default for EtaSchedule {
    fn default() -> Self {
        EtaSchedule((0..=6).map(|k| 1e-2 * 0.5f64.powi(k)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    /// Extrapolated density (meaningless when `atom_mass` is set).
    pub density: f64,
    pub error: f64,
    /// Residue estimate when −Im W grows like 1/η.
    pub atom_mass: Option<f64>,
}

/// Recovers the density at `x` from −(1/π) Im W(x + iη) as η → 0.
pub fn density_from_stieltjes(
    w: impl Fn(Complex64) -> Complex64,
    x: f64,
    schedule: &EtaSchedule,
) -> Result<DensityEstimate> {
    let etas = &schedule.0;
    if etas.len() < 2 || etas.iter().any(|&e| !(e > 0.0)) || !etas.windows(2).all(|p| p[0] > p[1]) {
        return Err(Error::input("η schedule must be strictly decreasing, positive, length ≥ 2"));
    }
    let d: Vec<f64> = etas.iter().map(|&eta| -w(Complex64::new(x, eta)).im / std::f64::consts::PI).collect();
    let k = d.len() - 1;
    let ratio = etas[k - 1] / etas[k];
    // Smoothed atomic mass scales like 1/η; a smooth density tends to a limit.
    let growth = d[k] / d[k - 1];
    if d[k] > 0.0 && growth > 0.8 * ratio {
        let res = |i: usize| std::f64::consts::PI * etas[i] * d[i];
        let (r1, r0) = (res(k), res(k - 1));
        let t = etas[k] / etas[k - 1];
        let extrap = (r1 - t * r0) / (1.0 - t);
        return Ok(DensityEstimate { density: f64::INFINITY, error: (extrap - r1).abs(), atom_mass: Some(extrap) });
    }
    // Richardson for a bias linear in η.
    let rich = |i: usize| {
        let t = etas[i] / etas[i - 1];
        (d[i] - t * d[i - 1]) / (1.0 - t)
    };
    let est = rich(k);
    let error = if k >= 2 { (est - rich(k - 1)).abs() } else { (d[k] - d[k - 1]).abs() };
    Ok(DensityEstimate { density: est, error, atom_mass: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn atom_at_origin() {
        let l = LawDescriptor::atomic(vec![(0.0, 1.0)]).unwrap();
        let w = stieltjes(&l, c(0.0, 1.0)).unwrap();
        assert!((w - c(0.0, -1.0)).norm() < 1e-15);
        let s = Spectrum::new(vec![0.0]).unwrap();
        assert!((empirical_stieltjes(&s, c(0.0, 1.0)) - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn semicircle_at_edge_and_branch() {
        let l = LawDescriptor::semicircle(1.0).unwrap();
        assert!(stieltjes(&l, c(2.0, 0.0)).is_err());
        let w = stieltjes(&l, c(2.0 + 1e-14, 0.0)).unwrap();
        assert!((w.re - 1.0).abs() < 1e-6);
        let w = stieltjes(&l, c(-3.0, 0.0)).unwrap();
        assert!(w.re < 0.0 && (w.re - (-3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn herglotz_and_conjugation_all_laws() {
        let laws = [
            LawDescriptor::semicircle(1.3).unwrap(),
            LawDescriptor::marchenko_pastur(1.0, 0.4).unwrap(),
            LawDescriptor::marchenko_pastur(0.6, 3.0).unwrap(),
            LawDescriptor::atomic(vec![(-1.0, 0.5), (2.0, 0.5)]).unwrap(),
            LawDescriptor::grid(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0], vec![], 1e-8).unwrap(),
        ];
        for l in &laws {
            for re in [-5.0, -1.0, 0.0, 0.5, 1.0, 3.0, 7.0] {
                for im in [1e-3, 0.1, 1.0, 10.0] {
                    let w = stieltjes(l, c(re, im)).unwrap();
                    assert!(w.im < 0.0, "{l:?} at {re}+{im}i");
                    let wc = stieltjes(l, c(re, -im)).unwrap();
                    assert!((wc - w.conj()).norm() < 1e-12);
                }
            }
            let big = c(1e7, 1.0);
            assert!((stieltjes(l, big).unwrap() * big - 1.0).norm() < 1e-5);
        }
    }

    #[test]
    fn mp_large_z_moments() {
        let (s2, g) = (1.4, 2.5);
        let l = LawDescriptor::marchenko_pastur(s2, g).unwrap();
        // W(z) = 1/z + m1/z² + m2/z³ + …
        let z = c(1e3, 0.0);
        let w = stieltjes(&l, z).unwrap();
        let m1 = ((w - 1.0 / z) * z * z).re;
        assert!((m1 - s2).abs() < 1e-2);
        let m2 = ((w - 1.0 / z - s2 / (z * z)) * z * z * z).re;
        let var = m2 - s2 * s2;
        assert!((var - s2 * s2 / g).abs() < 0.02, "{var}");
    }

    #[test]
    fn mp_removable_origin() {
        let l = LawDescriptor::marchenko_pastur(1.0, 4.0).unwrap();
        let w0 = stieltjes(&l, c(0.0, 0.0)).unwrap();
        let w1 = stieltjes(&l, c(0.0, 1e-6)).unwrap();
        assert!((w0 - w1).norm() < 1e-4);
    }

    #[test]
    fn semicircle_density_recovery() {
        let l = LawDescriptor::semicircle(1.0).unwrap();
        let est = density_from_stieltjes(|z| stieltjes(&l, z).unwrap(), 0.0, &EtaSchedule::default()).unwrap();
        assert!(est.atom_mass.is_none());
        assert!((est.density - 1.0 / PI).abs() < 1e-6, "{}", est.density);
    }

    #[test]
    fn atomic_cauchy_identity_and_residue() {
        let atoms = vec![(0.0, 0.3), (1.0, 0.7)];
        let l = LawDescriptor::atomic(atoms.clone()).unwrap();
        let (y, eta) = (0.4, 0.05);
        let lhs = -stieltjes(&l, c(y, eta)).unwrap().im / PI;
        let cauchy: f64 = atoms.iter().map(|&(x, m)| m * eta / (PI * ((y - x).powi(2) + eta * eta))).sum();
        assert!((lhs - cauchy).abs() < 1e-14);
        let est = density_from_stieltjes(|z| stieltjes(&l, z).unwrap(), 1.0, &EtaSchedule::default()).unwrap();
        assert!((est.atom_mass.unwrap() - 0.7).abs() < 1e-4);
    }

    #[test]
    fn bad_schedule() {
        let l = LawDescriptor::semicircle(1.0).unwrap();
        assert!(density_from_stieltjes(|z| stieltjes(&l, z).unwrap(), 0.0, &EtaSchedule(vec![0.1, 0.2])).is_err());
    }
}
