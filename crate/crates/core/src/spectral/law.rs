use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CdfMode {
    Pdf,
    Cdf,
}

/// A probability measure on the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawDescriptor {
    Semicircle { sigma2: f64 },
    MarchenkoPastur { sigma2: f64, gamma: f64 },
    /// (location, mass) pairs.
    AtomicMixture { atoms: Vec<(f64, f64)> },
    /// Piecewise-linear density on increasing abscissae plus atoms.
    GridDensity { x: Vec<f64>, density: Vec<f64>, atoms: Vec<(f64, f64)> },
}

/// Edges a∓ = σ²(1 ∓ γ^{−1/2})² of the Marčenko–Pastur support.
pub fn mp_edges(sigma2: f64, gamma: f64) -> (f64, f64) {
    let r = gamma.powf(-0.5);
    (sigma2 * (1.0 - r).powi(2), sigma2 * (1.0 + r).powi(2))
}

/// Density or distribution function of `law` at `x`. The density is that of
/// the absolutely continuous part; `f64::INFINITY` flags the x^{−1/2} pole of
/// the square Marčenko–Pastur law at the origin.
pub fn law_eval(law: &LawDescriptor, x: f64, mode: CdfMode) -> f64 {
    match mode {
        CdfMode::Pdf => law.pdf(x),
        CdfMode::Cdf => law.cdf(x),
    }
}

impl LawDescriptor {
    pub fn semicircle(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::input("semicircle needs σ² > 0"));
        }
        Ok(LawDescriptor::Semicircle { sigma2 })
    }

    pub fn marchenko_pastur(sigma2: f64, gamma: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) || !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::input("Marčenko–Pastur needs σ² > 0 and γ > 0"));
        }
        Ok(LawDescriptor::MarchenkoPastur { sigma2, gamma })
    }

    pub fn atomic(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() || atoms.iter().any(|&(x, m)| !x.is_finite() || !(m >= 0.0)) {
            return Err(Error::input("atomic mixture needs finite locations and nonnegative masses"));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::input(format!("atom masses sum to {total}, not 1")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(LawDescriptor::AtomicMixture { atoms })
    }

    /// Uniform mixture of the given points (an empirical measure).
    pub fn empirical(points: &[f64]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        LawDescriptor::atomic(points.iter().map(|&x| (x, w)).collect())
    }

    /// Grid density whose continuous part is rescaled so that, together with
    /// the atoms, the total mass is exactly one. The raw mass must already be
    /// within `mass_tol` of one.
    pub fn grid(x: Vec<f64>, density: Vec<f64>, mut atoms: Vec<(f64, f64)>, mass_tol: f64) -> Result<Self> {
        if x.len() < 2 || x.len() != density.len() {
            return Err(Error::input("grid density needs matching abscissae and values (at least two)"));
        }
        if !x.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::input("grid abscissae must be strictly increasing"));
        }
        if density.iter().any(|d| !d.is_finite()) {
            return Err(Error::input("grid density must be finite"));
        }
        let density: Vec<f64> = density.into_iter().map(|d| d.max(0.0)).collect();
        let atom_mass: f64 = atoms.iter().map(|a| a.1).sum();
        let cont = trapezoid(&x, &density);
        let raw = cont + atom_mass;
        if (raw - 1.0).abs() > mass_tol || cont <= 0.0 && atom_mass < 1.0 - mass_tol {
            return Err(Error::input(format!("grid law has total mass {raw}")));
        }
        let scale = if cont > 0.0 { (1.0 - atom_mass).max(0.0) / cont } else { 0.0 };
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(LawDescriptor::GridDensity { x, density: density.into_iter().map(|d| d * scale).collect(), atoms })
    }

    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            LawDescriptor::Semicircle { .. } => vec![],
            LawDescriptor::MarchenkoPastur { gamma, .. } => {
                if *gamma < 1.0 {
                    vec![(0.0, 1.0 - gamma)]
                } else {
                    vec![]
                }
            }
            LawDescriptor::AtomicMixture { atoms } | LawDescriptor::GridDensity { atoms, .. } => atoms.clone(),
        }
    }

    /// Smallest closed interval carrying all the mass.
    pub fn support(&self) -> (f64, f64) {
        let atoms = self.atoms();
        let (mut lo, mut hi) = atoms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), a| (l.min(a.0), h.max(a.0)));
        match self {
            LawDescriptor::Semicircle { sigma2 } => {
                let e = 2.0 * sigma2.sqrt();
                lo = -e;
                hi = e;
            }
            LawDescriptor::MarchenkoPastur { sigma2, gamma } => {
                let (a, b) = mp_edges(*sigma2, *gamma);
                lo = lo.min(a);
                hi = hi.max(b);
            }
            LawDescriptor::GridDensity { x, .. } => {
                lo = lo.min(x[0]);
                hi = hi.max(x[x.len() - 1]);
            }
            LawDescriptor::AtomicMixture { .. } => {}
        }
        (lo, hi)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            LawDescriptor::Semicircle { sigma2 } => {
                let r = 4.0 * sigma2 - x * x;
                if r <= 0.0 {
                    0.0
                } else {
                    r.sqrt() / (2.0 * PI * sigma2)
                }
            }
            LawDescriptor::MarchenkoPastur { sigma2, gamma } => {
                let (a, b) = mp_edges(*sigma2, *gamma);
                if x == 0.0 && a == 0.0 {
                    return f64::INFINITY;
                }
                if x <= a || x >= b {
                    return 0.0;
                }
                gamma * ((b - x) * (x - a)).sqrt() / (2.0 * PI * sigma2 * x)
            }
            LawDescriptor::AtomicMixture { .. } => 0.0,
            LawDescriptor::GridDensity { x: xs, density, .. } => interpolate(xs, density, x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let atom_part: f64 = self.atoms().iter().filter(|a| a.0 <= x).map(|a| a.1).sum();
        let cont = match self {
            LawDescriptor::Semicircle { sigma2 } => {
                let s = sigma2.sqrt();
                if x <= -2.0 * s {
                    0.0
                } else if x >= 2.0 * s {
                    1.0
                } else {
                    0.5 + x * (4.0 * sigma2 - x * x).sqrt() / (4.0 * PI * sigma2) + (x / (2.0 * s)).asin() / PI
                }
            }
            LawDescriptor::MarchenkoPastur { sigma2, gamma } => {
                let (a, b) = mp_edges(*sigma2, *gamma);
                let mass = gamma.min(1.0);
                if x <= a {
                    0.0
                } else if x >= b {
                    mass
                } else {
                    let v = gamma / (2.0 * PI * sigma2) * (mp_antiderivative(x, a, b) - mp_antiderivative(a, a, b));
                    v.clamp(0.0, mass)
                }
            }
            LawDescriptor::AtomicMixture { .. } => 0.0,
            LawDescriptor::GridDensity { x: xs, density, .. } => grid_cdf(xs, density, x),
        };
        (atom_part + cont).clamp(0.0, 1.0)
    }

    /// Left limit F(x−).
    pub fn cdf_left(&self, x: f64) -> f64 {
        let jump: f64 = self.atoms().iter().filter(|a| a.0 == x).map(|a| a.1).sum();
        (self.cdf(x) - jump).max(0.0)
    }

    /// Generalised inverse inf{x : F(x) ≥ u}, found by bisection.
    pub fn quantile(&self, u: f64) -> f64 {
        let (mut lo, mut hi) = self.support();
        if u <= 0.0 {
            return lo;
        }
        if self.cdf(lo) >= u {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Antiderivative of √((b−t)(t−a))/t on [a, b]. The two arcsines are written
/// as atan2 with exactly factored cosines, which keeps full accuracy at the
/// edges where asin is ill-conditioned.
fn mp_antiderivative(t: f64, a: f64, b: f64) -> f64 {
    let root = ((b - t) * (t - a)).max(0.0).sqrt();
    let s1 = (2.0 * t - a - b).atan2(2.0 * root);
    let last = if a > 0.0 {
        let g = (a * b).sqrt();
        g * ((a + b) * t - 2.0 * a * b).atan2(2.0 * g * root)
    } else {
        0.0
    };
    root + 0.5 * (a + b) * s1 - last
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}

fn grid_cdf(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return 0.0;
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return trapezoid(xs, ys);
    }
    let k = xs.partition_point(|&v| v <= x).clamp(1, last);
    let full = trapezoid(&xs[..k], &ys[..k]);
    let yx = interpolate(xs, ys, x);
    full + 0.5 * (x - xs[k - 1]) * (ys[k - 1] + yx)
}
