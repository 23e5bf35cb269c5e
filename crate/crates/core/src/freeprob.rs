//! Moment and cumulant series, R-transform additivity, and numeric free
//! additive convolution of a semicircle with a two-atom law.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::LawDescriptor;

/// Default truncation order of formal series.
pub const DEFAULT_ORDER: usize = 16;

/// A truncated sequence a₁ … a_K whose k-th term is homogeneous of degree k.
pub trait GradedSeries: Sized {
    fn values(&self) -> &[f64];
    fn from_values_unchecked(values: Vec<f64>) -> Self;

    fn order(&self) -> usize {
        self.values().len()
    }

    fn get(&self, k: usize) -> f64 {
        self.values()[k - 1]
    }
}

macro_rules! series_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(values: Vec<f64>) -> Result<Self> {
                if values.is_empty() {
                    return Err(Error::input("series order must be at least 1"));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::input("series values must be finite"));
                }
                Ok($name(values))
            }
        }

        impl GradedSeries for $name {
            fn values(&self) -> &[f64] {
                &self.0
            }
            fn from_values_unchecked(values: Vec<f64>) -> Self {
                $name(values)
            }
        }
    };
}

series_type!(
    /// Moments m₁ … m_K (m₀ = 1 implicit).
    MomentSeries
);
series_type!(
    /// Free cumulants κ₁ … κ_K, the coefficients of R(w) − 1/w.
    FreeCumulantSeries
);
series_type!(
    /// Classical cumulants c₁ … c_K.
    ClassicalCumulantSeries
);

impl MomentSeries {
    /// Moments of a finite atomic measure.
    pub fn of_atoms(atoms: &[(f64, f64)], order: usize) -> Result<Self> {
        MomentSeries::new((1..=order).map(|k| atoms.iter().map(|&(x, m)| m * x.powi(k as i32)).sum()).collect())
    }

    /// Moments of the semicircle law of variance σ²: Catalan numbers times σ^{2k}.
    pub fn semicircle(sigma2: f64, order: usize) -> Result<Self> {
        MomentSeries::new(
            (1..=order).map(|k| if k % 2 == 1 { 0.0 } else { catalan(k / 2) * sigma2.powi((k / 2) as i32) }).collect(),
        )
    }
}

impl FreeCumulantSeries {
    /// Free cumulants of the semicircle law: only κ₂ = σ² is nonzero.
    pub fn semicircle(sigma2: f64, order: usize) -> Result<Self> {
        let mut v = vec![0.0; order];
        if order >= 2 {
            v[1] = sigma2;
        }
        FreeCumulantSeries::new(v)
    }
}

/// Catalan number C_k = (2k)!/(k!(k+1)!) as a float.
pub fn catalan(k: usize) -> f64 {
    (0..k).fold(1.0, |c, j| c * 2.0 * (2.0 * j as f64 + 1.0) / (j as f64 + 2.0))
}

/// Either side of the moment ↔ free-cumulant transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum Series {
    Moments(MomentSeries),
    FreeCumulants(FreeCumulantSeries),
}

/// Maps moments to free cumulants or back, at the same order.
pub fn moment_cumulant_transform(input: &Series) -> Result<Series> {
    match input {
        Series::Moments(m) => free_cumulants(m).map(Series::FreeCumulants),
        Series::FreeCumulants(k) => moments_from_free(k).map(Series::Moments),
    }
}

/// Coefficients [z^j] M(z)^s for s = 1..K, j = 0..K where
/// M(z) = 1 + Σ m_k z^k, using only m₁..m_{known}.
fn moment_powers(m: &[f64], k_max: usize) -> Vec<Vec<f64>> {
    let mut base = vec![0.0; k_max + 1];
    base[0] = 1.0;
    for (k, &v) in m.iter().enumerate().take(k_max) {
        base[k + 1] = v;
    }
    let mut out = vec![vec![0.0; k_max + 1]; k_max + 1];
    out[0][0] = 1.0;
    for s in 1..=k_max {
        for j in 0..=k_max {
            let mut acc = 0.0;
            for i in 0..=j {
                acc += out[s - 1][i] * base[j - i];
            }
            out[s][j] = acc;
        }
    }
    out
}

/// m_n = Σ_{s=1}^{n} κ_s [z^{n−s}] M(z)^s.
pub fn moments_from_free(kappa: &FreeCumulantSeries) -> Result<MomentSeries> {
    let k = kappa.order();
    if k == 0 {
        return Err(Error::input("series order must be at least 1"));
    }
    let mut m = vec![0.0; k];
    for n in 1..=k {
        // [z^{n−s}]M^s only involves m_1..m_{n−1}
        let pw = moment_powers(&m[..n - 1], n);
        m[n - 1] = (1..=n).map(|s| kappa.get(s) * pw[s][n - s]).sum();
    }
    MomentSeries::new(m)
}

/// Inverse of [`moments_from_free`] (the s = n term carries κ_n alone).
pub fn free_cumulants(m: &MomentSeries) -> Result<FreeCumulantSeries> {
    let k = m.order();
    if k == 0 {
        return Err(Error::input("series order must be at least 1"));
    }
    let pw = moment_powers(m.values(), k);
    let mut kappa = vec![0.0; k];
    for n in 1..=k {
        let rest: f64 = (1..n).map(|s| kappa[s - 1] * pw[s][n - s]).sum();
        kappa[n - 1] = m.get(n) - rest;
    }
    FreeCumulantSeries::new(kappa)
}

/// c_n = m_n − Σ_{k<n} C(n−1, k−1) c_k m_{n−k}.
pub fn classical_cumulants(m: &MomentSeries) -> Result<ClassicalCumulantSeries> {
    let k = m.order();
    let mut c = vec![0.0; k];
    for n in 1..=k {
        let mut acc = m.get(n);
        let mut binom = 1.0; // C(n−1, k−1) starting at k = 1
        for j in 1..n {
            acc -= binom * c[j - 1] * m.get(n - j);
            binom = binom * (n - j) as f64 / j as f64;
        }
        c[n - 1] = acc;
    }
    ClassicalCumulantSeries::new(c)
}

/// Free cumulants of μ_A ⊞ μ_B.
pub fn free_convolve(a: &FreeCumulantSeries, b: &FreeCumulantSeries) -> Result<FreeCumulantSeries> {
    if a.order() != b.order() {
        return Err(Error::input(format!("order mismatch: {} vs {}", a.order(), b.order())));
    }
    FreeCumulantSeries::new(a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect())
}

/// N-fold free self-convolution.
pub fn free_self_convolve(a: &FreeCumulantSeries, times: f64) -> FreeCumulantSeries {
    FreeCumulantSeries(a.values().iter().map(|v| v * times).collect())
}

/// Series of αX: the k-th term picks up α^k.
pub fn rescale<S: GradedSeries>(series: &S, alpha: f64) -> S {
    let mut pow = 1.0;
    S::from_values_unchecked(
        series
            .values()
            .iter()
            .map(|v| {
                pow *= alpha;
                v * pow
            })
            .collect(),
    )
}

/// Moments, free and classical cumulants of one measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTriple {
    pub moments: MomentSeries,
    pub free: FreeCumulantSeries,
    pub classical: ClassicalCumulantSeries,
}

impl SeriesTriple {
    pub fn from_moments(m: MomentSeries) -> Result<Self> {
        let free = free_cumulants(&m)?;
        let classical = classical_cumulants(&m)?;
        Ok(SeriesTriple { moments: m, free, classical })
    }

    pub fn from_free(k: FreeCumulantSeries) -> Result<Self> {
        let m = moments_from_free(&k)?;
        let classical = classical_cumulants(&m)?;
        Ok(SeriesTriple { moments: m, free: k, classical })
    }
}

/// Location Λ + σ²/Λ of the outliers created by a finite-rank perturbation
/// of strength Λ of a GUE matrix, present only when Λ > σ.
pub fn gue_spike_location(sigma: f64, lambda: f64) -> Option<f64> {
    (lambda > sigma).then(|| lambda + sigma * sigma / lambda)
}

/// Connected piece of the support of a grid density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportComponent {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
    /// Mass-weighted mean location.
    pub center: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubordinationResult {
    pub law: LawDescriptor,
    pub x: Vec<f64>,
    /// −Im W(x)/π before normalisation.
    pub density: Vec<f64>,
    /// Total trapezoid mass of the raw density.
    pub total_mass: f64,
    pub components: Vec<SupportComponent>,
    /// Components separated from the heaviest one; their masses play the role
    /// of the atom the finite-n picture predicts at the outlier location.
    pub detected_atoms: Vec<(f64, f64)>,
}

/// Density of μ_sc(σ²) ⊞ ((1−ε)δ₀ + εδ_Λ) on `x_grid`, solving the
/// subordination equation W = G_B(z − σ²W) (equivalently z = σ²W + R_B(W)).
pub fn subordination_density(sigma2: f64, eps: f64, lambda: f64, x_grid: &[f64]) -> Result<SubordinationResult> {
    if !(sigma2 > 0.0) || !(0.0..=1.0).contains(&eps) || !(lambda > 0.0) {
        return Err(Error::input("need σ² > 0, ε ∈ [0, 1], Λ > 0"));
    }
    if x_grid.len() < 2 || !x_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::input("grid must be strictly increasing with at least two points"));
    }
    let w_vals = x_grid
        .par_iter()
        .map(|&x| solve_subordination(sigma2, eps, lambda, x))
        .collect::<Result<Vec<_>>>()?;
    let density: Vec<f64> = w_vals.iter().map(|w| (-w.im / std::f64::consts::PI).max(0.0)).collect();
    let total_mass: f64 = trapezoid(x_grid, &density);
    let components = support_components(x_grid, &density);
    let heaviest = components.iter().enumerate().max_by(|a, b| a.1.mass.total_cmp(&b.1.mass)).map(|(i, _)| i);
    let detected_atoms = components
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != heaviest)
        .map(|(_, c)| (c.center, c.mass))
        .collect();
    let law = LawDescriptor::grid(x_grid.to_vec(), density.clone(), vec![], 1e-3)?;
    Ok(SubordinationResult { law, x: x_grid.to_vec(), density, total_mass, components, detected_atoms })
}

fn g_b(eps: f64, lambda: f64, w: Complex64) -> (Complex64, Complex64) {
    let a = 1.0 / w;
    let b = 1.0 / (w - lambda);
    ((1.0 - eps) * a + eps * b, -(1.0 - eps) * a * a - eps * b * b)
}

fn newton(sigma2: f64, eps: f64, lambda: f64, z: Complex64, mut w: Complex64, iters: usize) -> Option<Complex64> {
    for _ in 0..iters {
        let (g, dg) = g_b(eps, lambda, z - sigma2 * w);
        let f = w - g;
        let df = 1.0 + sigma2 * dg;
        if df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        w -= step;
        if !(w.re.is_finite() && w.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-15 * w.norm().max(1.0) {
            return Some(w);
        }
    }
    let (g, _) = g_b(eps, lambda, z - sigma2 * w);
    ((w - g).norm() < 1e-10 * w.norm().max(1.0)).then_some(w)
}

/// Path-follows the Herglotz branch from η = 1 down to η = 10⁻⁴, then polishes
/// on the real axis, keeping the polished root only if it stays physical.
fn solve_subordination(sigma2: f64, eps: f64, lambda: f64, x: f64) -> Result<Complex64> {
    let mut eta = 1.0;
    let z0 = Complex64::new(x, eta);
    let mut w = newton(sigma2, eps, lambda, z0, 1.0 / z0, 200)
        .ok_or_else(|| Error::numerical(format!("subordination Newton failed at x = {x}, η = 1"), x))?;
    let eta_min = 1e-4;
    let mut factor: f64 = 0.7;
    while eta > eta_min {
        let next = (eta * factor).max(eta_min);
        let zn = Complex64::new(x, next);
        match newton(sigma2, eps, lambda, zn, w, 100) {
            Some(wn) if wn.im <= 0.0 => {
                w = wn;
                eta = next;
                factor = (factor * 0.8).max(0.3);
            }
            _ => {
                factor = factor.sqrt();
                if factor > 0.999 {
                    return Err(Error::numerical(
                        format!("subordination continuation stalled at x = {x}, η = {eta:e}"),
                        -w.im / std::f64::consts::PI,
                    ));
                }
            }
        }
    }
    let real = Complex64::new(x, 0.0);
    match newton(sigma2, eps, lambda, real, w, 200) {
        Some(wp) if wp.im <= 1e-14 && (wp - w).norm() < 0.5 => Ok(Complex64::new(wp.re, wp.im.min(0.0))),
        _ => Ok(w),
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// Maximal runs of grid points with density above a small threshold.
fn support_components(x: &[f64], d: &[f64]) -> Vec<SupportComponent> {
    let peak = d.iter().cloned().fold(0.0, f64::max);
    let thr = 1e-9 * peak.max(1e-300);
    let mut out = vec![];
    let mut i = 0;
    while i < x.len() {
        if d[i] <= thr {
            i += 1;
            continue;
        }
        let start = i;
        while i < x.len() && d[i] > thr {
            i += 1;
        }
        // include the zero endpoints so the trapezoid sees the whole bump
        let lo = start.saturating_sub(1);
        let hi = i.min(x.len() - 1);
        let mass = trapezoid(&x[lo..=hi], &d[lo..=hi]);
        let xm: Vec<f64> = (lo..=hi).map(|k| x[k] * d[k]).collect();
        let center = trapezoid(&x[lo..=hi], &xm) / mass;
        out.push(SupportComponent { lo: x[lo], hi: x[hi], mass, center });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_moments(seed: u64, k: usize) -> MomentSeries {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        MomentSeries::new((0..k).map(|_| r.gen_range(-2.0..2.0)).collect()).unwrap()
    }

    #[test]
    fn low_order_free_cumulants() {
        for seed in 0..20 {
            let m = random_moments(seed, 6);
            let k = free_cumulants(&m).unwrap();
            let (m1, m2, m3, m4) = (m.get(1), m.get(2), m.get(3), m.get(4));
            assert!((k.get(1) - m1).abs() < 1e-12);
            assert!((k.get(2) - (m2 - m1 * m1)).abs() < 1e-12);
            let k4 = m4 - 4.0 * m1 * m3 - 2.0 * m2 * m2 + 10.0 * m2 * m1 * m1 - 5.0 * m1.powi(4);
            assert!((k.get(4) - k4).abs() < 1e-12);
        }
    }

    #[test]
    fn low_order_classical_cumulants() {
        for seed in 0..20 {
            let m = random_moments(100 + seed, 6);
            let c = classical_cumulants(&m).unwrap();
            let k = free_cumulants(&m).unwrap();
            let (m1, m2, m3, m4) = (m.get(1), m.get(2), m.get(3), m.get(4));
            let c4 = m4 - 4.0 * m1 * m3 - 3.0 * m2 * m2 + 12.0 * m2 * m1 * m1 - 6.0 * m1.powi(4);
            assert!((c.get(4) - c4).abs() < 1e-12);
            assert!((c.get(2) - k.get(2)).abs() < 1e-12);
            assert!((c.get(3) - k.get(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn semicircle_has_only_kappa2() {
        let s2 = 1.7;
        let k = free_cumulants(&MomentSeries::semicircle(s2, 16).unwrap()).unwrap();
        for (i, v) in k.values().iter().enumerate() {
            let want = if i == 1 { s2 } else { 0.0 };
            assert!((v - want).abs() < 1e-9 * s2.powi(8), "κ_{} = {v}", i + 1);
        }
    }

    #[test]
    fn gaussian_classical_cumulants() {
        let dfact = |k: usize| (1..k).step_by(2).map(|j| j as f64).product::<f64>();
        let m = MomentSeries::new((1..=12).map(|k| if k % 2 == 1 { 0.0 } else { dfact(k) }).collect()).unwrap();
        let c = classical_cumulants(&m).unwrap();
        for (i, v) in c.values().iter().enumerate() {
            assert!((v - if i == 1 { 1.0 } else { 0.0 }).abs() < 1e-9, "c_{} = {v}", i + 1);
        }
    }

    #[test]
    fn roundtrip_identity() {
        let mut r = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let w: Vec<f64> = (0..5).map(|_| r.gen_range(0.1..1.0)).collect();
            let total: f64 = w.iter().sum();
            let atoms: Vec<(f64, f64)> = w.iter().map(|&wi| (r.gen_range(-1.0..1.0), wi / total)).collect();
            let m = MomentSeries::of_atoms(&atoms, DEFAULT_ORDER).unwrap();
            let back = moments_from_free(&free_cumulants(&m).unwrap()).unwrap();
            for (a, b) in m.values().iter().zip(back.values()) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
        let m = random_moments(7, 6);
        let s = Series::Moments(m.clone());
        let t = moment_cumulant_transform(&moment_cumulant_transform(&s).unwrap()).unwrap();
        assert!(matches!(t, Series::Moments(_)));
    }

    #[test]
    fn empty_series_rejected() {
        assert!(MomentSeries::new(vec![]).is_err());
    }

    #[test]
    fn convolution_examples() {
        let a = FreeCumulantSeries::semicircle(1.0, 8).unwrap();
        let b = FreeCumulantSeries::semicircle(2.5, 8).unwrap();
        assert_eq!(free_convolve(&a, &b).unwrap(), FreeCumulantSeries::semicircle(3.5, 8).unwrap());
        let zero = FreeCumulantSeries::new(vec![0.0; 8]).unwrap();
        assert_eq!(free_convolve(&a, &zero).unwrap(), a);
        // δ_c has R(w) = 1/w + c
        let dc = free_cumulants(&MomentSeries::of_atoms(&[(0.75, 1.0)], 8).unwrap()).unwrap();
        let shifted = free_convolve(&a, &dc).unwrap();
        assert!((shifted.get(1) - 0.75).abs() < 1e-14);
        for k in 2..=8 {
            assert!((shifted.get(k) - a.get(k)).abs() < 1e-12);
        }
        assert!(free_convolve(&a, &FreeCumulantSeries::new(vec![0.0; 3]).unwrap()).is_err());
    }

    #[test]
    fn rescale_properties() {
        let m = random_moments(3, 8);
        assert_eq!(rescale(&m, 1.0), m);
        let flipped = rescale(&m, -1.0);
        for k in 1..=8 {
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            assert_eq!(flipped.get(k), sign * m.get(k));
        }
        let ab = rescale(&rescale(&m, 0.5), 4.0);
        assert_eq!(ab, rescale(&m, 2.0));
    }

    #[test]
    fn free_clt_bernoulli() {
        let n: f64 = 1e4;
        let m = MomentSeries::new((1..=8).map(|k| if k % 2 == 0 { 1.0 } else { 0.0 }).collect()).unwrap();
        let k = free_cumulants(&m).unwrap();
        let summed = free_self_convolve(&rescale(&k, 1.0 / n.sqrt()), n);
        let out = moments_from_free(&summed).unwrap();
        let cat = MomentSeries::semicircle(1.0, 8).unwrap();
        for j in 1..=8 {
            assert!((out.get(j) - cat.get(j)).abs() < 5.0 / n.sqrt(), "m_{j}");
        }
    }

    #[test]
    fn spike_location() {
        assert_eq!(gue_spike_location(1.0, 2.0), Some(2.5));
        assert_eq!(gue_spike_location(1.0, 1.0), None);
        assert_eq!(gue_spike_location(1.0, 0.5), None);
    }

    fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + h * i as f64).collect()
    }

    #[test]
    fn eps_zero_is_semicircle() {
        let x = grid(-2.5, 2.5, 0.01);
        let r = subordination_density(1.0, 0.0, 2.0, &x).unwrap();
        let sc = LawDescriptor::semicircle(1.0).unwrap();
        for (xi, d) in x.iter().zip(&r.density) {
            assert!((d - sc.pdf(*xi)).abs() < 1e-6, "x={xi}: {d} vs {}", sc.pdf(*xi));
        }
    }

    #[test]
    fn island_mass_matches_eps() {
        let x = grid(-3.0, 4.0, 0.001);
        let r = subordination_density(1.0, 0.02, 2.0, &x).unwrap();
        assert!((r.total_mass - 1.0).abs() < 1e-3, "{}", r.total_mass);
        assert!(r.density.iter().all(|&d| d >= -1e-8));
        assert_eq!(r.detected_atoms.len(), 1, "{:?}", r.components);
        let (loc, mass) = r.detected_atoms[0];
        assert!((mass - 0.02).abs() < 0.005, "{mass}");
        assert!((loc - 2.5).abs() < 0.1, "{loc}");
    }

    #[test]
    fn subcritical_stays_on_bulk() {
        let x = grid(-3.0, 4.0, 0.002);
        let r = subordination_density(1.0, 0.02, 0.5, &x).unwrap();
        let beyond: f64 = x.iter().zip(&r.density).filter(|(x, _)| **x > 2.05).map(|(_, d)| d * 0.002).sum();
        assert!(beyond < 1e-6, "{beyond}");
        assert!(r.detected_atoms.is_empty());
    }

    #[test]
    fn subordination_moments_match_series() {
        let (s2, eps, lam) = (1.0, 0.1, 3.0);
        let x = grid(-3.0, 5.0, 0.0005);
        let r = subordination_density(s2, eps, lam, &x).unwrap();
        let kb = free_cumulants(&MomentSeries::of_atoms(&[(0.0, 1.0 - eps), (lam, eps)], 6).unwrap()).unwrap();
        let ks = FreeCumulantSeries::semicircle(s2, 6).unwrap();
        let m = moments_from_free(&free_convolve(&kb, &ks).unwrap()).unwrap();
        for k in 1..=6 {
            let num: Vec<f64> = x.iter().zip(&r.density).map(|(x, d)| x.powi(k as i32) * d).collect();
            let got = trapezoid(&x, &num);
            assert!((got - m.get(k)).abs() < 1e-3 * m.get(k).abs().max(1.0), "m_{k}: {got} vs {}", m.get(k));
        }
    }
}
