//! Caller-supplied randomness.
//!
//! Every random choice in the crate flows through an [`Entropy`] root. A
//! fixed root makes every sampled instance, key, nonce and trial
//! reproducible; per-trial streams are derived by label and index so that
//! parallel and serial runs draw identical values.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::modmath::ModMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entropy {
    root: [u8; 32],
}

impl Entropy {
    pub fn from_seed_bytes(bytes: &[u8]) -> Self {
        let mut h = Sha256::new();
        h.update(b"kih/entropy/v1");
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
        Entropy {
            root: h.finalize().into(),
        }
    }

    /// Parses a hex seed such as `00..01`.
    pub fn from_hex(hex_seed: &str) -> Result<Self> {
        let bytes = hex::decode(hex_seed.trim())
            .map_err(|e| Error::Usage(format!("entropy seed is not hex: {e}")))?;
        Ok(Self::from_seed_bytes(&bytes))
    }

    pub fn system() -> Self {
        let mut seed = [0u8; 32];
        rand::thread_rng().fill_bytes(&mut seed);
        Self::from_seed_bytes(&seed)
    }

    /// Independent stream for a named purpose.
    pub fn stream(&self, label: &str) -> ChaCha20Rng {
        self.derive(label, None)
    }

    /// Independent stream for trial `index` of a named experiment.
    pub fn trial(&self, label: &str, index: u64) -> ChaCha20Rng {
        self.derive(label, Some(index))
    }

    /// Child root, for handing a sub-experiment its own namespace.
    pub fn child(&self, label: &str) -> Entropy {
        let mut rng = self.stream(label);
        let mut root = [0u8; 32];
        rng.fill_bytes(&mut root);
        Entropy { root }
    }

    fn derive(&self, label: &str, index: Option<u64>) -> ChaCha20Rng {
        let mut h = Sha256::new();
        h.update(self.root);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        match index {
            Some(i) => {
                h.update([1]);
                h.update(i.to_le_bytes());
            }
            None => h.update([0]),
        }
        ChaCha20Rng::from_seed(h.finalize().into())
    }
}

/// Uniform residue in `[0, m)` by masked rejection sampling.
pub fn uniform_residue(rng: &mut impl RngCore, m: u64) -> u64 {
    debug_assert!(m >= 2);
    let bits = 64 - (m - 1).leading_zeros();
    let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    loop {
        let v = rng.next_u64() & mask;
        if v < m {
            return v;
        }
    }
}

pub fn uniform_matrix(rng: &mut impl RngCore, rows: usize, cols: usize, m: u64) -> ModMatrix {
    ModMatrix::from_fn(rows, cols, m, |_, _| uniform_residue(rng, m))
}
