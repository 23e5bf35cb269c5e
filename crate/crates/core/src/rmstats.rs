//! Covariance spectra in practice: centring, Marčenko–Pastur fits,
//! Tracy–Widom significance tests, BBP predictions, noise-band cleaning and
//! Markowitz portfolios.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{default_table, tw_pvalue};
use crate::numerics::linalg::{cholesky, cholesky_solve};
use crate::numerics::{eigh, HermitianMatrix, Scalar};
use crate::spectral::{ks_distance, mp_edges, LawDescriptor, Spectrum};

/// Real n×p data matrix, row-major, one observation per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    pub n: usize,
    pub p: usize,
    pub data: Vec<f64>,
    pub centered: bool,
    /// Column means removed by centring.
    pub column_means: Option<Vec<f64>>,
}

impl DataMatrix {
    pub fn new(n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::input("data matrix is empty"));
        }
        if data.len() != n * p {
            return Err(Error::input(format!("expected {} entries for {n}×{p}, got {}", n * p, data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("data matrix contains a non-finite entry"));
        }
        let mut m = DataMatrix { n, p, data, centered: false, column_means: None };
        m.centered = m.is_centered();
        Ok(m)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    fn column_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.p];
        for row in self.data.chunks(self.p) {
            for (a, b) in s.iter_mut().zip(row) {
                *a += b;
            }
        }
        s
    }

    fn is_centered(&self) -> bool {
        let scale = self.data.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        self.column_sums().iter().all(|s| s.abs() <= 1e-9 * self.n as f64 * scale)
    }

    /// Parses CSV rows of numbers; a first row that does not parse is
    /// treated as a header and skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            match parsed {
                Ok(r) => rows.push(r),
                Err(_) if rows.is_empty() && k == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("line {}: {e}", k + 1))),
            }
        }
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::Parse(format!("row {} has {} columns, expected {p}", i + 1, rows[i].len())));
        }
        DataMatrix::new(rows.len(), p, rows.concat())
    }
}

/// Subtracts each column's mean.
pub fn center_columns(data: &DataMatrix) -> Result<DataMatrix> {
    if data.n < 2 {
        return Err(Error::input("centring needs at least two observations"));
    }
    let means: Vec<f64> = data.column_sums().iter().map(|s| s / data.n as f64).collect();
    let centred: Vec<f64> = data.data.chunks(data.p).flat_map(|row| row.iter().zip(&means).map(|(v, m)| v - m)).collect();
    let previous = data.column_means.clone().unwrap_or_else(|| vec![0.0; data.p]);
    let total: Vec<f64> = previous.iter().zip(&means).map(|(a, b)| a + b).collect();
    Ok(DataMatrix { n: data.n, p: data.p, data: centred, centered: true, column_means: Some(total) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceSide {
    /// p⁻¹XXᵀ, n×n.
    Documents,
    /// n⁻¹XᵀX, p×p.
    Variables,
}

/// Sample covariance of centred data.
pub fn covariance(data: &DataMatrix, side: CovarianceSide) -> Result<HermitianMatrix<f64>> {
    if !data.centered && !data.is_centered() {
        return Err(Error::input("covariance needs centred data; call center_columns first"));
    }
    let (n, p) = (data.n, data.p);
    let m = match side {
        CovarianceSide::Variables => HermitianMatrix::from_upper_fn(p, |i, j| {
            (0..n).map(|k| data.get(k, i) * data.get(k, j)).sum::<f64>() / n as f64
        }),
        CovarianceSide::Documents => HermitianMatrix::from_upper_fn(n, |i, j| {
            let (a, b) = (&data.data[i * p..(i + 1) * p], &data.data[j * p..(j + 1) * p]);
            a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / p as f64
        }),
    };
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MPFit {
    pub sigma2_hat: f64,
    pub gamma: f64,
    pub ks: f64,
    pub excluded_top: usize,
    /// Indices (into the descending spectrum) inside [a₋, a₊] of the fit.
    pub noise_band: Range<usize>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Fits σ² of MP(σ², γ) to the spectrum minus its `exclude_top` largest
/// values by KS minimisation. A log-spaced scan over [0.1, 10]·mean brackets
/// the minimum and golden-section search refines it.
pub fn fit_mp(spectrum: &Spectrum, gamma: f64, exclude_top: usize) -> Result<MPFit> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::input("γ must be positive"));
    }
    let kept = spectrum.without_top(exclude_top);
    if kept.len() < 10 {
        return Err(Error::input(format!("MP fit needs at least 10 eigenvalues, got {}", kept.len())));
    }
    if spectrum.smallest().is_some_and(|v| v < -1e-8 * spectrum.largest().unwrap_or(0.0).abs().max(1.0)) {
        return Err(Error::input("covariance spectrum has negative eigenvalues"));
    }
    let mean = kept.mean();
    if !(mean > 0.0) {
        return Err(Error::input("spectrum has zero mean; nothing to fit"));
    }
    let ks = |s2: f64| ks_distance(&kept, &LawDescriptor::marchenko_pastur(s2, gamma).expect("valid MP parameters"));
    let (lo, hi) = ((0.1 * mean).ln(), (10.0 * mean).ln());
    const SCAN: usize = 80;
    let grid: Vec<f64> = (0..=SCAN).map(|i| lo + (hi - lo) * i as f64 / SCAN as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&g| ks(g.exp())).collect();
    let best = (0..=SCAN).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(SCAN)]);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (ks(c.exp()), ks(d.exp()));
    while b - a > 1e-10 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = ks(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = ks(d.exp());
        }
    }
    let (mut s2, mut k) = if fc <= fd { (c.exp(), fc) } else { (d.exp(), fd) };
    if vals[best] < k {
        s2 = grid[best].exp();
        k = vals[best];
    }
    let (lo_edge, hi_edge) = mp_edges(s2, gamma);
    let v = spectrum.values();
    let start = v.partition_point(|&x| x > hi_edge);
    let end = v.partition_point(|&x| x >= lo_edge);
    Ok(MPFit { sigma2_hat: s2, gamma, ks: k, excluded_top: exclude_top, noise_band: start..end.max(start) })
}

/// γ^{1/2} p^{2/3} (λ₁ − a₊)/(σ²(1 + γ^{−1/2})^{4/3}) with γ = n/p.
pub fn tw_statistic(lambda1: f64, n: usize, p: usize, sigma2: f64) -> f64 {
    let gamma = n as f64 / p as f64;
    let (_, a_plus) = mp_edges(sigma2, gamma);
    gamma.sqrt() * (p as f64).powf(2.0 / 3.0) * (lambda1 - a_plus) / (sigma2 * (1.0 + gamma.powf(-0.5)).powf(4.0 / 3.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentTest {
    /// 0-based position in the descending spectrum.
    pub index: usize,
    pub eigenvalue: f64,
    pub sigma2: f64,
    pub statistic: f64,
    pub p_value: f64,
    /// The statistic fell outside the TW table and the p-value was clamped.
    pub clamped: bool,
    pub rejected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceTrail {
    pub k: usize,
    pub components: Vec<ComponentTest>,
}

/// Sequential edge test with deflation. At step k the σ² fit uses the
/// spectrum without its k rejected values, the dimension drops to p − k,
/// and the (k+1)-th eigenvalue is tested against TW_β. Stops at the first
/// non-rejection.
pub fn significant_components(spectrum: &Spectrum, n: usize, p: usize, alpha: f64, beta: u8) -> Result<SignificanceTrail> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::input("α must lie in (0, 1)"));
    }
    if n == 0 || p == 0 {
        return Err(Error::input("n and p must be positive"));
    }
    let table = default_table(beta)?;
    let values = spectrum.values();
    let mut components = Vec::new();
    let mut k = 0;
    while k < values.len() && k < p {
        let p_eff = p - k;
        let fit = fit_mp(&spectrum.without_top(k), n as f64 / p_eff as f64, 0)?;
        let statistic = tw_statistic(values[k], n, p_eff, fit.sigma2_hat);
        let pv = tw_pvalue(table, statistic);
        let rejected = pv.value < alpha;
        components.push(ComponentTest {
            index: k,
            eigenvalue: values[k],
            sigma2: fit.sigma2_hat,
            statistic,
            p_value: pv.value,
            clamped: pv.clamped,
            rejected,
        });
        if !rejected {
            break;
        }
        k += 1;
    }
    Ok(SignificanceTrail { k, components })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum BbpPhase {
    /// λ₁ sticks to a₊ with TW fluctuations of size `scale`·p^{−2/3}.
    TracyWidom { edge: f64, scale: f64 },
    /// λ₁ separates to `location` with Gaussian fluctuations of standard
    /// deviation `std`·p^{−1/2}.
    GaussianOutlier { location: f64, std: f64 },
    /// Λ = Λ*; no limit law is emitted.
    Critical { edge: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BbpPrediction {
    pub threshold: f64,
    pub phase: BbpPhase,
}

/// Spiked-covariance prediction for noise σ² = σ·σ, aspect γ = n/p and a
/// spike direction of variance σΛ. Λ* = σ(1 + γ^{−1/2}); above it the
/// outlier sits at z_Λ = σΛ(1 + σ/(γ(Λ − σ))). `beta` only enters the
/// Gaussian variance, which is twice as large for real data.
pub fn bbp_predict(sigma: f64, gamma: f64, lambda: f64, beta: u8) -> Result<BbpPrediction> {
    if !(sigma > 0.0 && gamma > 0.0 && lambda > 0.0) {
        return Err(Error::input("σ, γ and Λ must be positive"));
    }
    if beta != 1 && beta != 2 {
        return Err(Error::input("β must be 1 or 2"));
    }
    let s2 = sigma * sigma;
    let threshold = sigma * (1.0 + gamma.powf(-0.5));
    let (_, edge) = mp_edges(s2, gamma);
    let phase = if (lambda - threshold).abs() <= 1e-12 * threshold {
        BbpPhase::Critical { edge }
    } else if lambda < threshold {
        BbpPhase::TracyWidom { edge, scale: s2 * (1.0 + gamma.powf(-0.5)).powf(4.0 / 3.0) / gamma.sqrt() }
    } else {
        let ell = sigma * lambda;
        let location = ell * (1.0 + sigma / (gamma * (lambda - sigma)));
        let r = s2 / (ell - s2);
        let var = (2.0 / beta as f64) * ell * ell * (1.0 - r * r / gamma) / gamma;
        BbpPhase::GaussianOutlier { location, std: var.max(0.0).sqrt() }
    };
    Ok(BbpPrediction { threshold, phase })
}

/// Replaces the eigenvalues with indices in `band` (descending order) by
/// their mean, keeping eigenvectors; the trace is unchanged.
pub fn clean_covariance<T: Scalar>(m: &HermitianMatrix<T>, band: Range<usize>) -> Result<HermitianMatrix<T>> {
    let p = m.order();
    if p == 0 {
        return Err(Error::input("cannot clean an empty matrix"));
    }
    if band.end > p || band.start > band.end {
        return Err(Error::input(format!("noise band {band:?} is not a range inside 0..{p}")));
    }
    if band.is_empty() {
        return Ok(m.clone());
    }
    let e = eigh(m, true)?;
    let mut values = e.values.clone();
    let mean = values[band.clone()].iter().sum::<f64>() / band.len() as f64;
    for v in &mut values[band] {
        *v = mean;
    }
    let vecs = e.vectors.expect("vectors requested");
    Ok(HermitianMatrix::from_upper_fn(p, |i, j| {
        let mut acc = T::zero();
        for (l, v) in values.iter().zip(&vecs) {
            acc += (v[i] * v[j].conj()).scale(*l);
        }
        acc
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortfolioResult {
    pub weights: Vec<f64>,
    pub excess: f64,
    pub risk: f64,
}

fn positive_definite_factor(m: &HermitianMatrix<f64>) -> Result<Vec<f64>> {
    let p = m.order();
    let dense: Vec<f64> = (0..p * p).map(|k| m.get(k / p, k % p)).collect();
    cholesky(&dense, p).map_err(|pivot| {
        let e = eigh(m, true).ok();
        let direction = e
            .and_then(|e| e.vectors.map(|v| (e.values[p - 1], v[p - 1].clone())))
            .map(|(val, v)| format!("eigenvalue {val:e} along {v:?}"))
            .unwrap_or_else(|| format!("pivot {pivot}"));
        Error::input(format!("covariance is not positive definite: {direction}"))
    })
}

/// Minimum-risk portfolio with expected excess return `excess`:
/// ρ* = e²/(PᵀM⁻¹P), W* = (ρ*/e)M⁻¹P.
pub fn markowitz(m: &HermitianMatrix<f64>, returns: &[f64], excess: f64) -> Result<PortfolioResult> {
    let p = m.order();
    if returns.len() != p {
        return Err(Error::input(format!("{} expected returns for a {p}×{p} covariance", returns.len())));
    }
    if returns.iter().all(|&r| r == 0.0) {
        return Err(Error::input("expected-return vector is zero"));
    }
    let l = positive_definite_factor(m)?;
    let minv_p = cholesky_solve(&l, p, returns);
    let q: f64 = returns.iter().zip(&minv_p).map(|(a, b)| a * b).sum();
    let risk = excess * excess / q;
    let weights = if excess == 0.0 { vec![0.0; p] } else { minv_p.iter().map(|v| risk / excess * v).collect() };
    Ok(PortfolioResult { weights, excess, risk })
}

/// ρ*(e) over a grid of excess returns; a parabola in e.
pub fn efficient_frontier(m: &HermitianMatrix<f64>, returns: &[f64], excess: &[f64]) -> Result<Vec<PortfolioResult>> {
    excess.iter().map(|&e| markowitz(m, returns, e)).collect()
}

/// Portfolio risk WᵀMW.
pub fn portfolio_risk(m: &HermitianMatrix<f64>, w: &[f64]) -> f64 {
    let p = m.order();
    (0..p).map(|i| w[i] * (0..p).map(|j| m.get(i, j) * w[j]).sum::<f64>()).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub overlaps: Vec<f64>,
    /// Typical overlap of unrelated unit vectors, 1/√p.
    pub baseline: f64,
}

/// |⟨u_i, v_i⟩| for matched vectors of two bases.
pub fn overlap_diagnostics(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<OverlapReport> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::input("overlap needs two non-empty sets of equal size"));
    }
    let p = a[0].len();
    if p == 0 || a.iter().chain(b).any(|v| v.len() != p) {
        return Err(Error::input("vectors differ in dimension"));
    }
    let overlaps = a
        .iter()
        .zip(b)
        .map(|(u, v)| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>().abs().min(1.0))
        .collect();
    Ok(OverlapReport { overlaps, baseline: 1.0 / (p as f64).sqrt() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaReport {
    pub n: usize,
    pub p: usize,
    pub beta: u8,
    pub alpha: f64,
    pub spectrum: Spectrum,
    pub fit: MPFit,
    pub components: Vec<ComponentTest>,
    pub k_significant: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<OverlapReport>,
}

/// Full pipeline on real data: centre, n⁻¹XᵀX, fit, sequential TW₁ test.
/// The reported fit excludes the significant components.
pub fn pca_test(data: &DataMatrix, alpha: f64) -> Result<PcaReport> {
    let x = if data.centered { data.clone() } else { center_columns(data)? };
    let m = covariance(&x, CovarianceSide::Variables)?;
    let spectrum = Spectrum::new(eigh(&m, false)?.values)?;
    let trail = significant_components(&spectrum, x.n, x.p, alpha, 1)?;
    let fit = fit_mp(&spectrum, x.n as f64 / x.p as f64, trail.k)?;
    Ok(PcaReport {
        n: x.n,
        p: x.p,
        beta: 1,
        alpha,
        spectrum,
        fit,
        components: trail.components,
        k_significant: trail.k,
        overlap: None,
    })
}

impl PcaReport {
    /// Plain-text table of the tested components.
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "n = {}, p = {}, σ̂² = {:.6}, KS = {:.4}, k = {}\n{:>5} {:>14} {:>12} {:>10} {}\n",
            self.n, self.p, self.fit.sigma2_hat, self.fit.ks, self.k_significant, "index", "eigenvalue", "statistic", "p-value", "verdict"
        );
        for c in &self.components {
            out.push_str(&format!(
                "{:>5} {:>14.6} {:>12.4} {:>10.3e} {}\n",
                c.index,
                c.eigenvalue,
                c.statistic,
                c.p_value,
                if c.rejected { "signal" } else { "noise" }
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_spectrum, EnsembleSpec, SamplingMethod};
    use crate::numerics::RngStream;

    #[test]
    fn centring_examples() {
        let d = DataMatrix::new(3, 2, vec![1.0, 5.0, 2.0, 5.0, 3.0, 5.0]).unwrap();
        let c = center_columns(&d).unwrap();
        assert_eq!(c.data, vec![-1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(c.column_means, Some(vec![2.0, 5.0]));
        let cc = center_columns(&c).unwrap();
        assert_eq!(cc.data, c.data);
        assert_eq!(cc.column_means, c.column_means);
        assert!(center_columns(&DataMatrix::new(1, 2, vec![1.0, 2.0]).unwrap()).is_err());
        assert!(DataMatrix::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn csv_with_header() {
        let d = DataMatrix::from_csv("a,b\n1,2\n3,4\n").unwrap();
        assert_eq!((d.n, d.p), (2, 2));
        assert!(DataMatrix::from_csv("1,2\n3\n").is_err());
    }

    #[test]
    fn covariance_examples() {
        let x = DataMatrix::new(2, 2, vec![1.0, 0.0, -1.0, 0.0]).unwrap();
        let v = covariance(&x, CovarianceSide::Variables).unwrap();
        assert_eq!((v.get(0, 0), v.get(0, 1), v.get(1, 1)), (1.0, 0.0, 0.0));
        let unc = DataMatrix::new(2, 2, vec![1.0, 0.0, 2.0, 0.0]).unwrap();
        assert!(covariance(&unc, CovarianceSide::Variables).is_err());
        let z = DataMatrix::new(3, 2, vec![0.0; 6]).unwrap();
        assert_eq!(covariance(&z, CovarianceSide::Documents).unwrap().trace(), 0.0);
        let mut g = RngStream::new(3, 0).generator();
        let raw = DataMatrix::new(7, 4, (0..28).map(|_| g.normal()).collect()).unwrap();
        let c = center_columns(&raw).unwrap();
        let tv = covariance(&c, CovarianceSide::Variables).unwrap().trace() * 7.0;
        let td = covariance(&c, CovarianceSide::Documents).unwrap().trace() * 4.0;
        assert!((tv - td).abs() < 1e-10);
    }

    fn null_spectrum(seed: u64, p: usize, gamma: f64, sigma2: f64) -> Spectrum {
        let n = (gamma * p as f64) as usize;
        sample_spectrum(&EnsembleSpec::wishart(false, n, p, sigma2, RngStream::new(seed, 0)), SamplingMethod::Tridiagonal)
            .unwrap()
    }

    #[test]
    fn mp_fit_recovers_scale() {
        let s = null_spectrum(11, 500, 2.0, 1.7);
        let fit = fit_mp(&s, 2.0, 0).unwrap();
        assert!((fit.sigma2_hat / 1.7 - 1.0).abs() < 0.05, "{}", fit.sigma2_hat);
        assert!(fit.ks < 0.05);
        assert!(fit.noise_band.len() > 480);
        let scaled = fit_mp(&s.scaled(3.0).unwrap(), 2.0, 0).unwrap();
        assert!((scaled.sigma2_hat / (3.0 * fit.sigma2_hat) - 1.0).abs() < 1e-6);
        assert!(fit_mp(&Spectrum::new(vec![1.0; 9]).unwrap(), 2.0, 0).is_err());
    }

    #[test]
    fn excluding_a_spike_improves_fit() {
        // averaged over replicas: one replica's KS can be dominated by bulk noise
        let (mut k0, mut k1, mut wins) = (0.0, 0.0, 0);
        for r in 0..40 {
            let spec = EnsembleSpec::wishart(false, 200, 100, 1.0, RngStream::new(5, r)).with_spikes(vec![6.0]);
            let s = sample_spectrum(&spec, SamplingMethod::Tridiagonal).unwrap();
            let (a, b) = (fit_mp(&s, 2.0, 0).unwrap().ks, fit_mp(&s, 2.0, 1).unwrap().ks);
            k0 += a;
            k1 += b;
            wins += usize::from(b < a);
        }
        assert!(k1 < k0, "{k1} vs {k0}");
        assert!(wins > 20, "{wins}");
    }

    #[test]
    fn statistic_is_linear_in_excess() {
        let (_, a) = mp_edges(1.0, 2.0);
        assert_eq!(tw_statistic(a, 800, 400, 1.0), 0.0);
        let s1 = tw_statistic(a + 0.01, 800, 400, 1.0);
        let s2 = tw_statistic(a + 0.02, 800, 400, 1.0);
        assert!((s2 - 2.0 * s1).abs() < 1e-10);
        assert!(s1 > 0.0);
    }

    #[test]
    fn bbp_examples() {
        let r = bbp_predict(1.0, 1.0, 3.0, 2).unwrap();
        assert_eq!(r.threshold, 2.0);
        match r.phase {
            BbpPhase::GaussianOutlier { location, .. } => assert!((location - 4.5).abs() < 1e-12),
            _ => panic!("expected an outlier"),
        }
        assert!(matches!(bbp_predict(1.0, 1.0, 2.0, 2).unwrap().phase, BbpPhase::Critical { .. }));
        assert!(matches!(bbp_predict(1.0, 1.0, 1.5, 2).unwrap().phase, BbpPhase::TracyWidom { .. }));
        for g in [0.5, 1.0, 3.0] {
            let t = 1.0 * (1.0 + f64::powf(g, -0.5));
            if let BbpPhase::GaussianOutlier { location, std } = bbp_predict(1.0, g, t * (1.0 + 1e-9), 1).unwrap().phase {
                assert!((location - mp_edges(1.0, g).1).abs() < 1e-6);
                assert!(std < 1e-3);
            } else {
                panic!("expected an outlier just above threshold");
            }
        }
        assert!(bbp_predict(0.0, 1.0, 3.0, 2).is_err());
    }

    #[test]
    fn cleaning() {
        let mut g = RngStream::new(9, 0).generator();
        let x: Vec<f64> = (0..60).map(|_| g.normal()).collect();
        let m = crate::ensembles::gram(&x, 10, 6);
        let all = clean_covariance(&m, 0..6).unwrap();
        let t = m.trace() / 6.0;
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { t } else { 0.0 };
                assert!((all.get(i, j) - want).abs() < 1e-12);
            }
        }
        assert_eq!(clean_covariance(&m, 2..2).unwrap(), m);
        let c = clean_covariance(&m, 1..4).unwrap();
        assert!((c.trace() - m.trace()).abs() < 1e-10);
        let cc = clean_covariance(&c, 1..4).unwrap();
        let scaled = clean_covariance(&m.scaled(2.5), 1..4).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((cc.get(i, j) - c.get(i, j)).abs() < 1e-12);
                assert!((scaled.get(i, j) - 2.5 * c.get(i, j)).abs() < 1e-12);
            }
        }
        assert!(eigh(&c, false).unwrap().values.iter().all(|&v| v >= -1e-12));
        assert!(clean_covariance(&m, 3..8).is_err());
    }

    #[test]
    fn markowitz_examples() {
        let id = HermitianMatrix::<f64>::identity(2);
        let r = markowitz(&id, &[1.0, 1.0], 1.0).unwrap();
        assert!((r.risk - 0.5).abs() < 1e-15);
        assert_eq!(r.weights, vec![0.5, 0.5]);
        let r2 = markowitz(&id, &[1.0, 1.0], 2.0).unwrap();
        assert!((r2.risk - 4.0 * r.risk).abs() < 1e-14);
        assert_eq!(r2.weights, vec![1.0, 1.0]);
        let sing = HermitianMatrix::from_upper_fn(2, |_, _| 1.0);
        let err = markowitz(&sing, &[1.0, 0.0], 1.0).unwrap_err().to_string();
        assert!(err.contains("along"), "{err}");
        let f = efficient_frontier(&id, &[1.0, 2.0], &[0.0, 1.0, 2.0]).unwrap();
        assert!((f[2].risk - 4.0 * f[1].risk).abs() < 1e-14 && f[0].risk == 0.0);
    }

    #[test]
    fn overlaps() {
        let e = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let r = overlap_diagnostics(&e, &e).unwrap();
        assert_eq!(r.overlaps, vec![1.0, 1.0]);
        let flipped = vec![vec![-1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(overlap_diagnostics(&e, &flipped).unwrap().overlaps, r.overlaps);
        assert!(overlap_diagnostics(&e, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).is_err());
    }
}
