//! Self-contained numerical kernels.

pub mod bvp;
pub mod eigen;
pub mod linalg;
pub mod matrix;
pub mod quadrature;
pub mod rng;
pub mod scalar;

pub use bvp::{solve_bvp, BvpOptions, BvpSolution, Mesh};
pub use eigen::{eigh, eigenvalues, sym_eigen, tridiagonal_eigenvalues, EigenDecomposition, EigenVectors, Eigh};
pub use matrix::{ComplexHermitianMatrix, HermitianMatrix, RealSymmetricMatrix, SelfAdjoint};
pub use quadrature::{gauss_legendre, integrate_adaptive, AdaptiveOptions, Domain, QuadratureRule};
pub use rng::{gaussian_stream, GaussianSource, RngStream};
pub use scalar::Scalar;
