//! Stateless seed derivation so every grid cell gets its own RNG stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate.
pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a path of grid coordinates.
///
/// The empty path returns `master` itself. Each element is folded in
/// together with its position, so `[1, 2]` and `[2, 1]` differ.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().enumerate().fold(master, |acc, (pos, &idx)| {
        let salt = GOLDEN.wrapping_mul(pos as u64 + 1);
        mix64(acc ^ mix64(idx.wrapping_add(salt)))
    })
}

/// A master seed plus grid coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeedPath {
    pub master: u64,
    pub path: Vec<u64>,
}

impl SeedPath {
    pub fn new(master: u64) -> Self {
        Self {
            master,
            path: Vec::new(),
        }
    }

    pub fn child(&self, idx: u64) -> Self {
        let mut path = self.path.clone();
        path.push(idx);
        Self {
            master: self.master,
            path,
        }
    }

    pub fn seed(&self) -> u64 {
        derive_seed(self.master, &self.path)
    }

    pub fn rng(&self) -> Rng {
        rng(self.seed())
    }
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
