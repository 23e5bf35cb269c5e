use num_complex::Complex64;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense self-adjoint matrix. Both triangles are stored; every mutator keeps
/// them conjugate-consistent and the diagonal real.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    order: usize,
    data: Vec<T>,
}

/// Real symmetric matrix (β = 1).
pub type RealSymmetricMatrix = HermitianMatrix<f64>;
/// Complex Hermitian matrix (β = 2).
pub type ComplexHermitianMatrix = HermitianMatrix<Complex64>;

impl<T: Scalar> HermitianMatrix<T> {
    pub fn zeros(order: usize) -> Self {
        HermitianMatrix { order, data: vec![T::zero(); order * order] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = T::one();
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = T::from_real(v);
        }
        m
    }

    /// Builds the matrix from its upper triangle; `f(i, j)` is queried for
    /// `i <= j` only. Diagonal imaginary parts are discarded.
    pub fn from_upper_fn(order: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Packed row-wise upper triangle: (0,0), (0,1), …, (0,n−1), (1,1), ….
    pub fn from_packed_upper(order: usize, upper: &[T]) -> Result<Self> {
        if upper.len() != order * (order + 1) / 2 {
            return Err(Error::input(format!(
                "packed upper triangle of order {order} needs {} entries, got {}",
                order * (order + 1) / 2,
                upper.len()
            )));
        }
        let mut it = upper.iter().copied();
        let m = Self::from_upper_fn(order, |_, _| it.next().unwrap());
        m.check_finite()?;
        Ok(m)
    }

    /// Accepts a full row-major matrix that must already be self-adjoint.
    pub fn from_dense(order: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::input(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                data.len()
            )));
        }
        for i in 0..order {
            if data[i * order + i].im() != 0.0 {
                return Err(Error::input(format!("diagonal entry {i} is not real")));
            }
            for j in (i + 1)..order {
                let a = data[i * order + j];
                let b = data[j * order + i].conj();
                let tol = 1e-12 * (1.0 + a.abs());
                if (a - b).abs() > tol {
                    return Err(Error::input(format!("entry ({i},{j}) breaks self-adjointness")));
                }
            }
        }
        let m = HermitianMatrix { order, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.order + j]
    }

    /// Sets (i, j) and its mirror; the diagonal keeps only the real part.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let n = self.order;
        if i == j {
            self.data[i * n + i] = T::from_real(v.re());
        } else {
            self.data[i * n + j] = v;
            self.data[j * n + i] = v.conj();
        }
    }

    pub fn add_diagonal(&mut self, i: usize, v: f64) {
        let n = self.order;
        self.data[i * n + i] += T::from_real(v);
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i).re()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs2()).sum::<f64>().sqrt()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(k) => Err(Error::input(format!(
                "non-finite entry at ({}, {})",
                k / self.order,
                k % self.order
            ))),
            None => Ok(()),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::input(format!(
                "order mismatch: {} vs {}",
                self.order, other.order
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Ok(HermitianMatrix { order: self.order, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::input(format!(
                "order mismatch: {} vs {}",
                self.order, other.order
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Ok(HermitianMatrix { order: self.order, data })
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermitianMatrix { order: self.order, data: self.data.iter().map(|v| v.scale(s)).collect() }
    }

    /// Tr(M²) = Σ |M_ij|².
    pub fn trace_of_square(&self) -> f64 {
        self.data.iter().map(|v| v.abs2()).sum()
    }

    /// y = M x.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let n = self.order;
        (0..n)
            .map(|i| {
                let row = self.row(i);
                let mut acc = T::zero();
                for j in 0..n {
                    acc += row[j] * x[j];
                }
                acc
            })
            .collect()
    }
}

impl RealSymmetricMatrix {
    /// Lifts to a complex Hermitian matrix with zero imaginary parts.
    pub fn to_complex(&self) -> ComplexHermitianMatrix {
        HermitianMatrix {
            order: self.order,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Either flavour of self-adjoint matrix, for operations that accept both.
#[derive(Clone, Debug, PartialEq)]
pub enum SelfAdjoint {
    Real(RealSymmetricMatrix),
    Complex(ComplexHermitianMatrix),
}

impl SelfAdjoint {
    pub fn order(&self) -> usize {
        match self {
            SelfAdjoint::Real(m) => m.order(),
            SelfAdjoint::Complex(m) => m.order(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            SelfAdjoint::Real(m) => m.trace(),
            SelfAdjoint::Complex(m) => m.trace(),
        }
    }

    pub fn trace_of_square(&self) -> f64 {
        match self {
            SelfAdjoint::Real(m) => m.trace_of_square(),
            SelfAdjoint::Complex(m) => m.trace_of_square(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, SelfAdjoint::Complex(_))
    }

    pub fn to_complex(&self) -> ComplexHermitianMatrix {
        match self {
            SelfAdjoint::Real(m) => m.to_complex(),
            SelfAdjoint::Complex(m) => m.clone(),
        }
    }

    pub fn sub(&self, other: &SelfAdjoint) -> Result<SelfAdjoint> {
        Ok(match (self, other) {
            (SelfAdjoint::Real(a), SelfAdjoint::Real(b)) => SelfAdjoint::Real(a.sub(b)?),
            (a, b) => SelfAdjoint::Complex(a.to_complex().sub(&b.to_complex())?),
        })
    }

    pub fn add_diagonal(&mut self, i: usize, v: f64) {
        match self {
            SelfAdjoint::Real(m) => m.add_diagonal(i, v),
            SelfAdjoint::Complex(m) => m.add_diagonal(i, v),
        }
    }
}

impl From<RealSymmetricMatrix> for SelfAdjoint {
    fn from(m: RealSymmetricMatrix) -> Self {
        SelfAdjoint::Real(m)
    }
}

impl From<ComplexHermitianMatrix> for SelfAdjoint {
    fn from(m: ComplexHermitianMatrix) -> Self {
        SelfAdjoint::Complex(m)
    }
}
