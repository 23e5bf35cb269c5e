use super::law::LawDescriptor;
use super::Spectrum;
use crate::error::{Error, Result};
use crate::numerics::eigen::eigenvalues;
use crate::numerics::matrix::SelfAdjoint;

/// Kolmogorov–Smirnov distance sup |F_n − F| between the empirical measure of
/// `spec` and `law`, evaluated (with left limits) at every jump of either.
pub fn ks_distance(spec: &Spectrum, law: &LawDescriptor) -> f64 {
    let xs = spec.ascending();
    let n = xs.len() as f64;
    if xs.is_empty() {
        return 1.0;
    }
    let mut pts: Vec<f64> = xs.clone();
    pts.extend(law.atoms().iter().map(|a| a.0));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut worst = 0.0f64;
    for t in pts {
        let at = xs.partition_point(|&v| v <= t) as f64 / n;
        let before = xs.partition_point(|&v| v < t) as f64 / n;
        worst = worst.max((at - law.cdf(t)).abs()).max((before - law.cdf_left(t)).abs());
    }
    worst.min(1.0)
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and a
/// continuous CDF.
pub fn ks_against_cdf(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Sup-norm distance between the empirical CDFs of two spectra.
pub fn ecdf_sup_distance(a: &Spectrum, b: &Spectrum) -> f64 {
    let xa = a.ascending();
    let xb = b.ascending();
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let mut worst = 0.0f64;
    for &t in xa.iter().chain(&xb) {
        let fa = xa.partition_point(|&v| v <= t) as f64 / na;
        let fb = xb.partition_point(|&v| v <= t) as f64 / nb;
        worst = worst.max((fa - fb).abs());
    }
    worst
}

/// Tr(A − B)² − Σᵢ (λᵢᴬ − λᵢᴮ)², nonnegative by the Hoffman–Wielandt
/// inequality.
pub fn hoffman_wielandt_margin(a: &SelfAdjoint, b: &SelfAdjoint) -> Result<f64> {
    if a.order() != b.order() {
        return Err(Error::input(format!("order mismatch: {} vs {}", a.order(), b.order())));
    }
    let la = values(a)?;
    let lb = values(b)?;
    let diff = a.sub(b)?;
    let spectral: f64 = la.iter().zip(&lb).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(diff.trace_of_square() - spectral)
}

fn values(m: &SelfAdjoint) -> Result<Vec<f64>> {
    match m {
        SelfAdjoint::Real(a) => eigenvalues(a),
        SelfAdjoint::Complex(a) => eigenvalues(a),
    }
}
