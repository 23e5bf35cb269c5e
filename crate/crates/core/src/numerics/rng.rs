//! Reproducible random streams.
//!
//! A stream is keyed by `(master_seed, stream_index)`; the underlying ChaCha
//! generator is counter based, so every stream is an independent,
//! position-addressable sequence. Parallel Monte Carlo gives each replica its
//! own stream index, which makes results independent of scheduling order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream { master_seed, stream_index }
    }

    /// The stream `offset` positions further along, used to hand out
    /// per-replica streams from a base stream.
    pub fn substream(&self, offset: u64) -> Self {
        RngStream {
            master_seed: self.master_seed,
            stream_index: self.stream_index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(offset + 1),
        }
    }

    pub fn generator(&self) -> GaussianSource {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        GaussianSource { rng, spare: None }
    }

    /// `count` iid standard normals.
    pub fn gaussians(&self, count: usize) -> Vec<f64> {
        let mut g = self.generator();
        (0..count).map(|_| g.normal()).collect()
    }
}

/// `count` iid standard normals from stream `s`.
pub fn gaussian_stream(s: &RngStream, count: usize) -> Vec<f64> {
    s.gaussians(count)
}

/// Box–Muller normals drawn from one stream.
pub struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// Chi-square with `dof` degrees of freedom.
    pub fn chi_square(&mut self, dof: f64) -> f64 {
        if dof <= 0.0 {
            return 0.0;
        }
        ChiSquared::new(dof).expect("positive dof").sample(&mut self.rng)
    }
}
