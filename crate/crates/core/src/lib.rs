//! Random matrix ensembles, their limit laws, exact finite-size statistics,
//! Tracy–Widom distributions and free additive convolution.

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod freeprob;
pub mod io;
pub mod kernels;
pub mod orthopoly;
pub mod rmstats;
pub mod numerics;
pub mod spectral;
pub mod validate;

pub use error::{Error, Result};
