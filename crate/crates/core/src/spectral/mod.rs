//! Spectra, limit laws, Stieltjes transforms and spectral distances.

mod distance;
mod law;
mod stieltjes;

pub use distance::{ecdf_sup_distance, hoffman_wielandt_margin, ks_against_cdf, ks_distance};
pub use law::{law_eval, mp_edges, CdfMode, LawDescriptor};
pub use stieltjes::{density_from_stieltjes, empirical_stieltjes, stieltjes, DensityEstimate, EtaSchedule};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues of one matrix sample, sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Wraps values the caller guarantees are finite and sorted descending.
    pub(crate) fn from_sorted_desc(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        Spectrum { values }
    }

    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("spectrum contains a non-finite value"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn smallest(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn ascending(&self) -> Vec<f64> {
        self.values.iter().rev().copied().collect()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Spectrum with the `k` largest values removed.
    pub fn without_top(&self, k: usize) -> Spectrum {
        Spectrum { values: self.values[k.min(self.len())..].to_vec() }
    }

    pub fn scaled(&self, c: f64) -> Result<Spectrum> {
        Spectrum::new(self.values.iter().map(|v| v * c).collect())
    }

    /// Number of eigenvalues with |λ| ≤ tol.
    pub fn count_near_zero(&self, tol: f64) -> usize {
        self.values.iter().filter(|v| v.abs() <= tol).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_rejects_nan() {
        let s = Spectrum::new(vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(s.without_top(1).values(), &[2.0, 1.0]);
        assert!(Spectrum::new(vec![f64::NAN]).is_err());
    }
}
