//! Samplers for the Gaussian and Wishart ensembles.
//!
//! Variance conventions: GOE off-diagonal entries have variance σ²/n and
//! diagonal entries 2σ²/n; GUE off-diagonal real and imaginary parts each have
//! variance σ²/(2n) and the real diagonal σ²/n. Wishart matrices are
//! M = n⁻¹XᴴX for an n×p data matrix whose rows are N(0, K) with
//! K = diag(σΛ₁, …, σΛ_k, σ², …, σ²); complex entries have E|X|² equal to the
//! corresponding diagonal of K.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::eigen::{eigenvalues, tridiagonal_eigenvalues};
use crate::numerics::matrix::{HermitianMatrix, SelfAdjoint};
use crate::numerics::rng::{GaussianSource, RngStream};
use crate::numerics::scalar::Scalar;
use crate::spectral::Spectrum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    Goe,
    Gue,
    WishartReal,
    WishartComplex,
}

impl EnsembleKind {
    /// Dyson index: 1 for real symmetric, 2 for complex Hermitian.
    pub fn beta(self) -> u32 {
        match self {
            EnsembleKind::Goe | EnsembleKind::WishartReal => 1,
            EnsembleKind::Gue | EnsembleKind::WishartComplex => 2,
        }
    }

    pub fn is_wishart(self) -> bool {
        matches!(self, EnsembleKind::WishartReal | EnsembleKind::WishartComplex)
    }
}

/// Deterministic perturbation diag(Λ, …, Λ, 0, …, 0) of the given rank.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditiveSpike {
    pub lambda: f64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    /// Matrix order for GOE/GUE; number of observations for Wishart.
    pub n: usize,
    /// Wishart dimension (ignored for GOE/GUE).
    pub p: usize,
    pub sigma2: f64,
    /// Covariance spike strengths Λᵢ placed in the leading coordinates.
    #[serde(default)]
    pub spikes: Vec<f64>,
    #[serde(default)]
    pub additive_spike: Option<AdditiveSpike>,
    pub seed: RngStream,
}

impl EnsembleSpec {
    pub fn gaussian(kind: EnsembleKind, n: usize, sigma2: f64, seed: RngStream) -> Self {
        EnsembleSpec { kind, n, p: n, sigma2, spikes: vec![], additive_spike: None, seed }
    }

    pub fn goe(n: usize, sigma2: f64, seed: RngStream) -> Self {
        Self::gaussian(EnsembleKind::Goe, n, sigma2, seed)
    }

    pub fn gue(n: usize, sigma2: f64, seed: RngStream) -> Self {
        Self::gaussian(EnsembleKind::Gue, n, sigma2, seed)
    }

    pub fn wishart(complex: bool, n: usize, p: usize, sigma2: f64, seed: RngStream) -> Self {
        let kind = if complex { EnsembleKind::WishartComplex } else { EnsembleKind::WishartReal };
        EnsembleSpec { kind, n, p, sigma2, spikes: vec![], additive_spike: None, seed }
    }

    pub fn with_spikes(mut self, spikes: Vec<f64>) -> Self {
        self.spikes = spikes;
        self
    }

    pub fn with_additive_spike(mut self, lambda: f64, rank: usize) -> Self {
        self.additive_spike = Some(AdditiveSpike { lambda, rank });
        self
    }

    pub fn with_seed(mut self, seed: RngStream) -> Self {
        self.seed = seed;
        self
    }

    pub fn beta(&self) -> u32 {
        self.kind.beta()
    }

    /// γ = n/p for Wishart, 1 otherwise.
    pub fn gamma(&self) -> f64 {
        if self.kind.is_wishart() {
            self.n as f64 / self.p as f64
        } else {
            1.0
        }
    }

    /// Order of the sampled matrix.
    pub fn order(&self) -> usize {
        if self.kind.is_wishart() {
            self.p
        } else {
            self.n
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::input("n must be at least 1"));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::input("σ² must be positive and finite"));
        }
        if self.kind.is_wishart() {
            if self.p == 0 {
                return Err(Error::input("Wishart dimension p must be at least 1"));
            }
            if self.spikes.len() > self.p {
                return Err(Error::input("more spikes than coordinates"));
            }
            if self.spikes.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                return Err(Error::input("spike strengths must be positive"));
            }
        } else if !self.spikes.is_empty() {
            return Err(Error::input("covariance spikes apply to Wishart ensembles only"));
        }
        if let Some(s) = self.additive_spike {
            if self.kind.is_wishart() {
                return Err(Error::input("additive spikes apply to GOE/GUE only"));
            }
            if s.rank > self.n {
                return Err(Error::input(format!("spike rank {} exceeds order {}", s.rank, self.n)));
            }
            if !(s.lambda >= 0.0 && s.lambda.is_finite()) {
                return Err(Error::input("additive spike Λ must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    /// Population variance of data coordinate j.
    fn coordinate_variance(&self, j: usize) -> f64 {
        match self.spikes.get(j) {
            Some(&l) => self.sigma2.sqrt() * l,
            None => self.sigma2,
        }
    }
}

fn draw<T: Scalar>(g: &mut GaussianSource, var: f64) -> T {
    if T::IS_COMPLEX {
        let s = (0.5 * var).sqrt();
        T::from_parts(s * g.normal(), s * g.normal())
    } else {
        T::from_real(var.sqrt() * g.normal())
    }
}

fn gaussian_matrix<T: Scalar>(n: usize, sigma2: f64, g: &mut GaussianSource) -> HermitianMatrix<T> {
    let nf = n as f64;
    let diag_var = if T::IS_COMPLEX { sigma2 / nf } else { 2.0 * sigma2 / nf };
    let off_var = sigma2 / nf;
    HermitianMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            T::from_real(diag_var.sqrt() * g.normal())
        } else {
            draw::<T>(g, off_var)
        }
    })
}

/// Draws a GOE (real symmetric) or GUE (complex Hermitian) matrix.
pub fn sample_gaussian(spec: &EnsembleSpec) -> Result<SelfAdjoint> {
    spec.validate()?;
    let mut g = spec.seed.generator();
    let mut m: SelfAdjoint = match spec.kind {
        EnsembleKind::Goe => gaussian_matrix::<f64>(spec.n, spec.sigma2, &mut g).into(),
        EnsembleKind::Gue => gaussian_matrix::<Complex64>(spec.n, spec.sigma2, &mut g).into(),
        _ => return Err(Error::input("sample_gaussian needs a GOE or GUE spec")),
    };
    if let Some(s) = spec.additive_spike {
        m = apply_additive_spike(m, s.lambda, s.rank)?;
    }
    Ok(m)
}

/// Adds diag(Λ, …, Λ, 0, …, 0) with `rank` copies of Λ.
pub fn apply_additive_spike(mut m: SelfAdjoint, lambda: f64, rank: usize) -> Result<SelfAdjoint> {
    if rank > m.order() {
        return Err(Error::input(format!("spike rank {rank} exceeds order {}", m.order())));
    }
    if lambda != 0.0 {
        for i in 0..rank {
            m.add_diagonal(i, lambda);
        }
    }
    Ok(m)
}

/// Draws the n×p data matrix X (row-major) of a Wishart spec.
pub fn sample_data_matrix<T: Scalar>(spec: &EnsembleSpec) -> Result<Vec<T>> {
    spec.validate()?;
    let mut g = spec.seed.generator();
    let vars: Vec<f64> = (0..spec.p).map(|j| spec.coordinate_variance(j)).collect();
    let mut x = Vec::with_capacity(spec.n * spec.p);
    for _ in 0..spec.n {
        for &v in &vars {
            x.push(draw::<T>(&mut g, v));
        }
    }
    Ok(x)
}

/// n⁻¹XᴴX for a row-major n×p matrix.
pub fn gram<T: Scalar>(x: &[T], n: usize, p: usize) -> HermitianMatrix<T> {
    let mut cols = vec![T::zero(); n * p];
    for i in 0..n {
        for j in 0..p {
            cols[j * n + i] = x[i * p + j];
        }
    }
    let scale = 1.0 / n as f64;
    let rows: Vec<Vec<T>> = (0..p)
        .into_par_iter()
        .map(|j| {
            let cj = &cols[j * n..(j + 1) * n];
            (j..p)
                .map(|k| {
                    let ck = &cols[k * n..(k + 1) * n];
                    let mut s = T::zero();
                    for (a, b) in cj.iter().zip(ck) {
                        s += a.conj() * *b;
                    }
                    s.scale(scale)
                })
                .collect()
        })
        .collect();
    HermitianMatrix::from_upper_fn(p, |j, k| {
        let v = rows[j][k - j];
        if j == k {
            T::from_real(v.re())
        } else {
            v
        }
    })
}

/// Draws M = n⁻¹XᴴX.
pub fn sample_wishart(spec: &EnsembleSpec) -> Result<SelfAdjoint> {
    spec.validate()?;
    match spec.kind {
        EnsembleKind::WishartReal => {
            let x = sample_data_matrix::<f64>(spec)?;
            Ok(gram(&x, spec.n, spec.p).into())
        }
        EnsembleKind::WishartComplex => {
            let x = sample_data_matrix::<Complex64>(spec)?;
            Ok(gram(&x, spec.n, spec.p).into())
        }
        _ => Err(Error::input("sample_wishart needs a Wishart spec")),
    }
}

/// Draws the matrix for any ensemble kind.
pub fn sample_matrix(spec: &EnsembleSpec) -> Result<SelfAdjoint> {
    if spec.kind.is_wishart() {
        sample_wishart(spec)
    } else {
        sample_gaussian(spec)
    }
}

/// How spectra are produced in batch sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMethod {
    /// Build the dense matrix and diagonalise it.
    Dense,
    /// Use the tridiagonal (GOE/GUE) or bidiagonal (Wishart) models whose
    /// eigenvalues have exactly the same joint law; falls back to dense for
    /// additive spikes or more than one covariance spike.
    Tridiagonal,
}

/// Spectrum of one sample of `spec`.
pub fn sample_spectrum(spec: &EnsembleSpec, method: SamplingMethod) -> Result<Spectrum> {
    spec.validate()?;
    let fast_ok = match spec.kind {
        EnsembleKind::Goe | EnsembleKind::Gue => spec.additive_spike.map_or(true, |s| s.rank == 0 || s.lambda == 0.0),
        _ => spec.spikes.is_empty() || (spec.spikes.len() == 1 && spec.n >= spec.p),
    };
    if method == SamplingMethod::Tridiagonal && fast_ok {
        let values = match spec.kind {
            EnsembleKind::Goe | EnsembleKind::Gue => hermite_tridiagonal(spec)?,
            _ => laguerre_bidiagonal(spec)?,
        };
        return Spectrum::new(values);
    }
    let m = sample_matrix(spec)?;
    let values = match &m {
        SelfAdjoint::Real(a) => eigenvalues(a)?,
        SelfAdjoint::Complex(a) => eigenvalues(a)?,
    };
    Spectrum::new(values)
}

/// Tridiagonal β-Hermite model: diagonal N(0,1), off-diagonal χ_{β(n−i)}/√2,
/// rescaled by σ√(2/(nβ)) to the GOE/GUE normalisation above.
fn hermite_tridiagonal(spec: &EnsembleSpec) -> Result<Vec<f64>> {
    let n = spec.n;
    let beta = spec.beta() as f64;
    let c = (spec.sigma2 * 2.0 / (n as f64 * beta)).sqrt();
    let mut g = spec.seed.generator();
    let diag: Vec<f64> = (0..n).map(|_| c * g.normal()).collect();
    let off: Vec<f64> =
        (1..n).map(|i| c * (g.chi_square(beta * (n - i) as f64) / 2.0).sqrt()).collect();
    tridiagonal_eigenvalues(&diag, &off)
}

/// Bidiagonal Laguerre model. With X = U B Vᴴ from alternating Householder
/// reflections, B is upper bidiagonal with independent entries
/// b_ii ~ √(χ²_{β(n−i+1)}/β) and b_{i,i+1} ~ √(χ²_{β(p−i)}/β) (unit
/// variance). A spike on the first coordinate only rescales b_11.
fn laguerre_bidiagonal(spec: &EnsembleSpec) -> Result<Vec<f64>> {
    let beta = spec.beta() as f64;
    // for n < p the nonzero spectrum is that of XXᴴ/n: swap roles
    let (rows, cols) = if spec.n >= spec.p { (spec.n, spec.p) } else { (spec.p, spec.n) };
    let mut g = spec.seed.generator();
    let mut d: Vec<f64> = (0..cols).map(|i| (g.chi_square(beta * (rows - i) as f64) / beta).sqrt()).collect();
    let e: Vec<f64> = (1..cols).map(|i| (g.chi_square(beta * (cols - i) as f64) / beta).sqrt()).collect();
    if !spec.spikes.is_empty() {
        d[0] *= (spec.coordinate_variance(0) / spec.sigma2).sqrt();
    }
    // T = BᵀB
    let tdiag: Vec<f64> = (0..cols).map(|i| d[i] * d[i] + if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 }).collect();
    let toff: Vec<f64> = (0..cols.saturating_sub(1)).map(|i| d[i] * e[i]).collect();
    let scale = spec.sigma2 / spec.n as f64;
    let mut vals: Vec<f64> = tridiagonal_eigenvalues(&tdiag, &toff)?.into_iter().map(|v| (v * scale).max(0.0)).collect();
    vals.resize(spec.p, 0.0);
    Ok(vals)
}

/// Independent spectra of one ensemble.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleBatch {
    pub spec: EnsembleSpec,
    pub spectra: Vec<Spectrum>,
    /// Stream used for each sample.
    pub streams: Vec<RngStream>,
}

impl SampleBatch {
    pub fn sample_count(&self) -> usize {
        self.spectra.len()
    }

    pub fn largest(&self) -> Vec<f64> {
        self.spectra.iter().filter_map(|s| s.largest()).collect()
    }
}

/// `count` samples; sample k uses stream `spec.seed.substream(k)`, so the
/// result does not depend on thread scheduling.
pub fn sample_batch(spec: &EnsembleSpec, count: usize, method: SamplingMethod) -> Result<SampleBatch> {
    spec.validate()?;
    let streams: Vec<RngStream> = (0..count as u64).map(|k| spec.seed.substream(k)).collect();
    let spectra = streams
        .par_iter()
        .map(|&s| sample_spectrum(&spec.clone().with_seed(s), method))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch { spec: spec.clone(), spectra, streams })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(k: u64) -> RngStream {
        RngStream::new(20240601, k)
    }

    #[test]
    fn goe_single_entry_variance() {
        let n = 20000;
        let s2 = 1.5;
        let draws: Vec<f64> = (0..n)
            .map(|k| match sample_gaussian(&EnsembleSpec::goe(1, s2, seed(k))).unwrap() {
                SelfAdjoint::Real(m) => m.get(0, 0),
                _ => unreachable!(),
            })
            .collect();
        let var = draws.iter().map(|x| x * x).sum::<f64>() / n as f64;
        let se = 2.0 * s2 * (2.0 / n as f64).sqrt();
        assert!((var - 2.0 * s2).abs() < 4.0 * se, "{var}");
    }

    #[test]
    fn goe_trace_square_expectation() {
        let (n, s2, reps) = (6, 1.0, 10000);
        let vals: Vec<f64> =
            (0..reps).map(|k| sample_gaussian(&EnsembleSpec::goe(n, s2, seed(k))).unwrap().trace_of_square()).collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        let target = (n as f64 + 1.0) * s2;
        assert!((mean - target).abs() < 3.0 * sd / (reps as f64).sqrt(), "{mean} vs {target}");
    }

    #[test]
    fn additive_spike_zero_rank_is_identity() {
        let a = sample_gaussian(&EnsembleSpec::gue(5, 1.0, seed(1))).unwrap();
        let b = sample_gaussian(&EnsembleSpec::gue(5, 1.0, seed(1)).with_additive_spike(3.0, 0)).unwrap();
        assert_eq!(a.to_complex().as_slice(), b.to_complex().as_slice());
        let c = apply_additive_spike(a.clone(), 2.0, 3).unwrap();
        assert!((c.trace() - a.trace() - 6.0).abs() < 1e-12);
        assert!(apply_additive_spike(a.clone(), 2.0, 6).is_err());
        let d = apply_additive_spike(a.clone(), 0.0, 5).unwrap();
        assert_eq!(a.trace(), d.trace());
    }

    #[test]
    fn wrong_kind_rejected() {
        assert!(sample_gaussian(&EnsembleSpec::wishart(false, 5, 3, 1.0, seed(0))).is_err());
        assert!(sample_wishart(&EnsembleSpec::goe(5, 1.0, seed(0))).is_err());
        assert!(sample_wishart(&EnsembleSpec::wishart(false, 5, 3, 0.0, seed(0))).is_err());
    }

    #[test]
    fn wishart_rank_deficiency() {
        for complex in [false, true] {
            let spec = EnsembleSpec::wishart(complex, 7, 12, 1.0, seed(3));
            let s = sample_spectrum(&spec, SamplingMethod::Dense).unwrap();
            assert_eq!(s.count_near_zero(1e-10), 5);
            assert!(s.smallest().unwrap() >= -1e-10);
        }
    }

    #[test]
    fn wishart_scalar_mean() {
        let reps = 20000;
        let s2 = 0.7;
        let vals: Vec<f64> = (0..reps)
            .map(|k| sample_wishart(&EnsembleSpec::wishart(false, 4, 1, s2, seed(k))).unwrap().trace())
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        // n·M/σ² ~ χ²_n, so Var M = 2σ⁴/n
        let se = (2.0 * s2 * s2 / 4.0 / reps as f64).sqrt();
        assert!((mean - s2).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn determinism() {
        let spec = EnsembleSpec::wishart(true, 9, 4, 1.0, seed(11));
        let a = sample_wishart(&spec).unwrap().to_complex();
        let b = sample_wishart(&spec).unwrap().to_complex();
        assert_eq!(a.as_slice(), b.as_slice());
    }

    #[test]
    fn fast_models_match_dense_moments() {
        // Compare E[Σλ] and E[Σλ²] between the two samplers.
        let cases = [
            EnsembleSpec::goe(8, 1.3, seed(0)),
            EnsembleSpec::gue(8, 0.8, seed(0)),
            EnsembleSpec::wishart(false, 12, 5, 1.1, seed(0)),
            EnsembleSpec::wishart(true, 5, 9, 0.9, seed(0)),
            EnsembleSpec::wishart(true, 15, 6, 1.0, seed(0)).with_spikes(vec![3.0]),
        ];
        for spec in &cases {
            let stats = |method, offset: u64| {
                let b = sample_batch(&spec.clone().with_seed(RngStream::new(99, offset)), 4000, method).unwrap();
                let m1: Vec<f64> = b.spectra.iter().map(|s| s.values().iter().sum()).collect();
                let m2: Vec<f64> = b.spectra.iter().map(|s| s.values().iter().map(|v| v * v).sum()).collect();
                let top: Vec<f64> = b.largest();
                [m1, m2, top].map(|v| {
                    let mean = v.iter().sum::<f64>() / v.len() as f64;
                    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
                    (mean, (var / v.len() as f64).sqrt())
                })
            };
            let a = stats(SamplingMethod::Dense, 1);
            let b = stats(SamplingMethod::Tridiagonal, 2);
            for k in 0..3 {
                let se = (a[k].1.powi(2) + b[k].1.powi(2)).sqrt();
                assert!((a[k].0 - b[k].0).abs() < 4.5 * se + 1e-12, "{:?} stat {k}: {:?} vs {:?}", spec.kind, a[k], b[k]);
            }
        }
    }
}
