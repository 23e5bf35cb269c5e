//! Gauss–Legendre rules and adaptive Gauss–Kronrod integration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default scale of the algebraic map used for semi-infinite domains.
pub const DEFAULT_MAP_SCALE: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Finite { a: f64, b: f64 },
    /// (start, +∞) through u ↦ start + scale·(1+u)/(1−u).
    UpperTail { start: f64, scale: f64 },
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: Domain,
}

impl QuadratureRule {
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Nodes and weights of the m-point Gauss–Legendre rule on (−1, 1), by
/// Newton iteration on P_m from Chebyshev-like initial guesses.
fn legendre_reference(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(m, z);
                dp = d;
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // nodes ascending
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// m-point Gauss–Legendre rule on the given domain.
pub fn gauss_legendre(m: usize, domain: Domain) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::input("Gauss–Legendre rule needs at least one node"));
    }
    let (u, w) = legendre_reference(m);
    let (nodes, weights) = match domain {
        Domain::Finite { a, b } => {
            if !(a.is_finite() && b.is_finite()) || b <= a {
                return Err(Error::input(format!("invalid interval ({a}, {b})")));
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            (u.iter().map(|&t| mid + half * t).collect(), w.iter().map(|&v| v * half).collect())
        }
        Domain::UpperTail { start, scale } => {
            if !start.is_finite() || !(scale > 0.0) {
                return Err(Error::input("invalid semi-infinite domain"));
            }
            let x = u.iter().map(|&t| start + scale * (1.0 + t) / (1.0 - t)).collect();
            let wt = u
                .iter()
                .zip(&w)
                .map(|(&t, &v)| v * 2.0 * scale / ((1.0 - t) * (1.0 - t)))
                .collect();
            (x, wt)
        }
    };
    Ok(QuadratureRule { nodes, weights, domain })
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod estimate and |K15 − G7| on [a, b].
fn kronrod15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Options for [`integrate_adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOptions {
    /// Absolute error target.
    pub tol: f64,
    pub max_intervals: usize,
    /// Scale L of the infinite-bound map.
    pub map_scale: f64,
    /// Caller-flagged integrable singularities at the (finite) endpoints; a
    /// quadratic substitution removes inverse-square-root behaviour there.
    pub singular_left: bool,
    pub singular_right: bool,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            tol: 1e-10,
            max_intervals: 4000,
            map_scale: DEFAULT_MAP_SCALE,
            singular_left: false,
            singular_right: false,
        }
    }
}

impl AdaptiveOptions {
    pub fn with_tol(tol: f64) -> Self {
        AdaptiveOptions { tol, ..Default::default() }
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over (a, b), where
/// either bound may be infinite.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: AdaptiveOptions) -> Result<f64> {
    integrate_dyn(&f, a, b, opts)
}

fn integrate_dyn(f: &dyn Fn(f64) -> f64, a: f64, b: f64, opts: AdaptiveOptions) -> Result<f64> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::input("NaN integration bound"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_dyn(f, b, a, opts).map(|v| -v);
    }
    let l = opts.map_scale;
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            if opts.singular_left || opts.singular_right {
                integrate_with_endpoint_substitution(f, a, b, opts)
            } else {
                adaptive_core(|x| f(x), a, b, opts)
            }
        }
        (true, false) => adaptive_core(
            |u| {
                let x = a + l * (1.0 + u) / (1.0 - u);
                let v = f(x);
                if v == 0.0 { 0.0 } else { v * 2.0 * l / ((1.0 - u) * (1.0 - u)) }
            },
            -1.0,
            1.0,
            opts,
        ),
        (false, true) => adaptive_core(
            |u| {
                let x = b - l * (1.0 - u) / (1.0 + u);
                let v = f(x);
                if v == 0.0 { 0.0 } else { v * 2.0 * l / ((1.0 + u) * (1.0 + u)) }
            },
            -1.0,
            1.0,
            opts,
        ),
        (false, false) => {
            let half = AdaptiveOptions { tol: 0.5 * opts.tol, ..opts };
            let left = integrate_dyn(f, f64::NEG_INFINITY, 0.0, half)?;
            let right = integrate_dyn(f, 0.0, f64::INFINITY, half)?;
            Ok(left + right)
        }
    }
}

fn integrate_with_endpoint_substitution(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> Result<f64> {
    let plain = AdaptiveOptions { singular_left: false, singular_right: false, ..opts };
    match (opts.singular_left, opts.singular_right) {
        (true, true) => {
            let m = 0.5 * (a + b);
            let half = AdaptiveOptions { tol: 0.5 * opts.tol, ..plain };
            let l = integrate_with_endpoint_substitution(f, a, m, AdaptiveOptions { singular_left: true, ..half })?;
            let r = integrate_with_endpoint_substitution(f, m, b, AdaptiveOptions { singular_right: true, ..half })?;
            Ok(l + r)
        }
        (true, false) => {
            // x = a + (b − a)s², s ∈ (0, 1)
            let w = b - a;
            adaptive_core(|s| f(a + w * s * s) * 2.0 * w * s, 0.0, 1.0, plain)
        }
        (false, true) => {
            let w = b - a;
            adaptive_core(|s| f(b - w * s * s) * 2.0 * w * s, 0.0, 1.0, plain)
        }
        (false, false) => adaptive_core(|x| f(x), a, b, plain),
    }
}

fn adaptive_core(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, opts: AdaptiveOptions) -> Result<f64> {
    let (v, e) = kronrod15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > opts.tol {
        if pieces.len() >= opts.max_intervals {
            return Err(Error::numerical(
                format!("adaptive quadrature: error estimate {err:e} above tolerance {:e}", opts.tol),
                total,
            ));
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, pv, pe) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::numerical("adaptive quadrature: interval underflow", total));
        }
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
        if !total.is_finite() {
            return Err(Error::numerical("adaptive quadrature: non-finite integrand", total));
        }
        // refresh sums periodically to avoid drift
        if pieces.len() % 64 == 0 {
            total = pieces.iter().map(|p| p.2).sum();
            err = pieces.iter().map(|p| p.3).sum();
        }
    }
    Ok(pieces.iter().map(|p| p.2).sum())
}
