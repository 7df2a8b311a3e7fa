//! Counter-based random streams and the three point distributions.
//!
//! Every draw comes from ChaCha8 keyed by a seed and positioned on a
//! 64-bit stream, so `(seed, stream)` reproduces the same numbers on any
//! platform and under any thread schedule. Normals use Box-Muller.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

/// Tags for the purpose of a derived stream, kept in the low byte of the
/// stream id so different uses of the same index never collide.
pub mod purpose {
    pub const CONFIG: u8 = 1;
    pub const CONE: u8 = 2;
    pub const SUBSPACE: u8 = 3;
    pub const GAUSSIAN: u8 = 4;
    pub const ANGLE: u8 = 5;
    pub const DUAL: u8 = 6;
    pub const RESAMPLE: u8 = 7;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Independent stream for item `index` used for `purpose`. The parent
    /// stream is folded into the key so children of different parents do
    /// not coincide.
    pub fn child(&self, index: u64, purpose: u8) -> RngSpec {
        RngSpec {
            seed: splitmix(self.seed ^ splitmix(self.stream)),
            stream: (index << 8) | purpose as u64,
        }
    }

    pub fn stream(&self) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        Stream { rng, spare: None }
    }
}

pub struct Stream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Stream {
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` by rejection, so every value is exactly
    /// equally likely.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.rng.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }

    pub fn gaussian_vec(&mut self, d: usize) -> Vec<f64> {
        (0..d).map(|_| self.gaussian()).collect()
    }

    /// Laplace variate: a fair sign times a unit exponential.
    pub fn symmetric_exponential(&mut self) -> f64 {
        let e = -(1.0 - self.uniform()).ln();
        if self.rng.next_u64() >> 63 == 1 {
            -e
        } else {
            e
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointDistribution {
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "sphere")]
    Sphere,
    #[serde(rename = "symm-exp")]
    SymmetricExponential,
}

impl PointDistribution {
    pub const ALL: [PointDistribution; 3] = [
        PointDistribution::Gaussian,
        PointDistribution::Sphere,
        PointDistribution::SymmetricExponential,
    ];

    /// One point in `R^d`.
    pub fn draw(&self, s: &mut Stream, d: usize) -> Vec<f64> {
        match self {
            PointDistribution::Gaussian => s.gaussian_vec(d),
            PointDistribution::Sphere => loop {
                let g = s.gaussian_vec(d);
                let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-300 {
                    break g.into_iter().map(|x| x / norm).collect();
                }
            },
            PointDistribution::SymmetricExponential => (0..d).map(|_| s.symmetric_exponential()).collect(),
        }
    }
}

impl fmt::Display for PointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointDistribution::Gaussian => "gaussian",
            PointDistribution::Sphere => "sphere",
            PointDistribution::SymmetricExponential => "symm-exp",
        })
    }
}

impl FromStr for PointDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(PointDistribution::Gaussian),
            "sphere" => Ok(PointDistribution::Sphere),
            "symm-exp" | "symmetrized-exponential" => Ok(PointDistribution::SymmetricExponential),
            _ => Err(Error::Invalid(format!("unknown distribution {s:?}"))),
        }
    }
}
