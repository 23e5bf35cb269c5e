//! Dense Hermitian eigensolver.
//!
//! Householder reduction to a real symmetric tridiagonal matrix (complex
//! reflectors are normalised so the sub-diagonal comes out real, which absorbs
//! the phases into the unitary factor), followed by implicit-shift QL with
//! Wilkinson-type shifts.

use num_complex::Complex64;

use super::matrix::{HermitianMatrix, SelfAdjoint};
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::spectral::Spectrum;

/// Eigenvalues sorted descending and, optionally, the matching orthonormal
/// eigenvectors (`vectors[k]` belongs to `values[k]`).
#[derive(Clone, Debug)]
pub struct Eigh<T> {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<T>>>,
}

#[derive(Clone, Debug)]
pub enum EigenVectors {
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<Complex64>>),
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub spectrum: Spectrum,
    pub vectors: Option<EigenVectors>,
}

/// Eigen-decomposition of either matrix flavour.
pub fn sym_eigen(m: &SelfAdjoint, want_vectors: bool) -> Result<EigenDecomposition> {
    match m {
        SelfAdjoint::Real(a) => {
            let e = eigh(a, want_vectors)?;
            Ok(EigenDecomposition {
                spectrum: Spectrum::from_sorted_desc(e.values),
                vectors: e.vectors.map(EigenVectors::Real),
            })
        }
        SelfAdjoint::Complex(a) => {
            let e = eigh(a, want_vectors)?;
            Ok(EigenDecomposition {
                spectrum: Spectrum::from_sorted_desc(e.values),
                vectors: e.vectors.map(EigenVectors::Complex),
            })
        }
    }
}

/// Eigenvalues only, descending.
pub fn eigenvalues<T: Scalar>(m: &HermitianMatrix<T>) -> Result<Vec<f64>> {
    Ok(eigh(m, false)?.values)
}

pub fn eigh<T: Scalar>(m: &HermitianMatrix<T>, want_vectors: bool) -> Result<Eigh<T>> {
    m.check_finite()?;
    let n = m.order();
    if n == 0 {
        return Ok(Eigh { values: vec![], vectors: want_vectors.then(Vec::new) });
    }
    let mut red = reduce_to_tridiagonal(m);
    let mut z = want_vectors.then(|| identity_rows(n));
    tridiagonal_ql(&mut red.diag, &mut red.offdiag, z.as_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| red.diag[b].total_cmp(&red.diag[a]));
    let values: Vec<f64> = order.iter().map(|&k| red.diag[k]).collect();

    let vectors = z.map(|z| {
        order
            .iter()
            .map(|&k| {
                let mut v: Vec<T> = z[k * n..(k + 1) * n].iter().map(|&x| T::from_real(x)).collect();
                red.apply_q(&mut v);
                v
            })
            .collect()
    });
    Ok(Eigh { values, vectors })
}

/// Eigenvalues (descending) of the real symmetric tridiagonal matrix with
/// diagonal `diag` and sub-diagonal `offdiag` (length n − 1).
pub fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(vec![]);
    }
    if offdiag.len() + 1 != n {
        return Err(Error::input(format!(
            "tridiagonal of order {n} needs {} off-diagonal entries, got {}",
            n - 1,
            offdiag.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    if d.iter().chain(e.iter()).any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite tridiagonal entry"));
    }
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

struct Tridiagonal<T> {
    diag: Vec<f64>,
    /// offdiag[k] couples k and k+1; the final slot is a zero sentinel.
    offdiag: Vec<f64>,
    /// Householder vectors (unit leading entry implicit) and scalars.
    reflectors: Vec<(usize, T, Vec<T>)>,
}

impl<T: Scalar> Tridiagonal<T> {
    /// v ← Q v with Q = H₀ H₁ ⋯ H_{n−2}.
    fn apply_q(&self, v: &mut [T]) {
        for (start, tau, tail) in self.reflectors.iter().rev() {
            // H = I − τ u uᴴ with u = (1, tail) placed at `start`.
            let mut dot = v[*start];
            for (i, &u) in tail.iter().enumerate() {
                dot += u.conj() * v[start + 1 + i];
            }
            let f = *tau * dot;
            v[*start] -= f;
            for (i, &u) in tail.iter().enumerate() {
                v[start + 1 + i] -= u * f;
            }
        }
    }
}

fn identity_rows(n: usize) -> Vec<f64> {
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    z
}

/// Unblocked Householder reduction working on the lower triangle.
fn reduce_to_tridiagonal<T: Scalar>(m: &HermitianMatrix<T>) -> Tridiagonal<T> {
    let n = m.order();
    let mut a = m.as_slice().to_vec();
    let mut offdiag = vec![0.0; n];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(1));
    let mut p = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];

    for k in 0..n.saturating_sub(1) {
        let s = k + 1;
        let alpha = a[s * n + k];
        let mut xnorm2 = 0.0;
        for i in (s + 1)..n {
            xnorm2 += a[i * n + k].abs2();
        }
        if xnorm2 == 0.0 && alpha.im() == 0.0 {
            offdiag[k] = alpha.re();
            continue;
        }
        let norm = (alpha.abs2() + xnorm2).sqrt();
        let beta = if alpha.re() >= 0.0 { -norm } else { norm };
        let tau = T::from_parts((beta - alpha.re()) / beta, -alpha.im() / beta);
        let inv = T::one() / (alpha - T::from_real(beta));
        v[s] = T::one();
        for i in (s + 1)..n {
            v[i] = a[i * n + k] * inv;
        }
        offdiag[k] = beta;

        // p = τ A₂₂ v using the lower triangle only.
        for x in p[s..n].iter_mut() {
            *x = T::zero();
        }
        for i in s..n {
            let row = &a[i * n..i * n + i];
            let vi = v[i];
            let mut acc = T::zero();
            for j in s..i {
                let aij = row[j];
                acc += aij * v[j];
                p[j] += aij.conj() * vi;
            }
            p[i] += acc + a[i * n + i] * vi;
        }
        let mut pv = T::zero();
        for i in s..n {
            p[i] = tau * p[i];
            pv += p[i].conj() * v[i];
        }
        let half = (tau * pv).scale(-0.5);
        // w = p + half·v, stored back into p.
        for i in s..n {
            p[i] += half * v[i];
        }
        for i in s..n {
            let vi = v[i];
            let wi = p[i];
            let row = &mut a[i * n..i * n + i + 1];
            for j in s..=i {
                row[j] -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
        reflectors.push((s, tau, v[(s + 1)..n].to_vec()));
    }

    let diag = (0..n).map(|i| a[i * n + i].re()).collect();
    if n >= 1 {
        offdiag[n - 1] = 0.0;
    }
    Tridiagonal { diag, offdiag, reflectors }
}

/// Implicit QL on a symmetric tridiagonal matrix. `e[i]` couples i and i+1
/// with `e[n-1] = 0`. When `z` is given, row k of the n×n buffer accumulates
/// the k-th eigenvector.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<f64>>) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut shift_total = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::numerical("tridiagonal QL did not converge", d[l]));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                shift_total += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for k in 0..n {
                            let t = zi1[k];
                            zi1[k] = s * zi[k] + c * t;
                            zi[k] = c * zi[k] - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }
    Ok(())
}
