//! Gadget vector `g = (0, 1, 2, ..., 2^(l-1))`, gadget matrix `G = I_n ⊗ g`
//! and the deterministic binary decompositions `g⁻¹`, `G⁻¹`.
//!
//! Each decomposition block has `d = l + 1` slots; slot 0 carries weight 0
//! and is always 0 in a fresh decomposition. Decompositions are integer
//! matrices (no modulus) so that sums of decompositions stay exact.

use crate::error::{Error, Result};
use crate::modmath::ModMatrix;
use crate::params::Params;

#[derive(Clone, Debug)]
pub struct GadgetContext {
    n: usize,
    q: u64,
    l: usize,
    g: Vec<u64>,
}

impl GadgetContext {
    pub fn new(params: &Params) -> Self {
        let l = params.l();
        let g = std::iter::once(0)
            .chain((0..l).map(|i| 1u64 << i))
            .map(|v| v % params.q())
            .collect();
        GadgetContext {
            n: params.n(),
            q: params.q(),
            l,
            g,
        }
    }

    pub fn d(&self) -> usize {
        self.l + 1
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn g(&self) -> &[u64] {
        &self.g
    }

    /// `G = I_n ⊗ g` as an `n x nd` matrix over `Z_q`.
    pub fn gadget_matrix(&self) -> ModMatrix {
        let d = self.d();
        ModMatrix::from_fn(self.n, self.n * d, self.q, |i, j| {
            if j / d == i {
                self.g[j % d]
            } else {
                0
            }
        })
    }

    /// `g⁻¹(a) = (0, a_0, ..., a_(l-1))` with `a = Σ a_i 2^i`.
    pub fn bit_decompose(&self, a: u64) -> Vec<u32> {
        debug_assert!(a < self.q);
        std::iter::once(0)
            .chain((0..self.l).map(|i| ((a >> i) & 1) as u32))
            .collect()
    }

    /// Integer inner product `<g, v>`, not reduced.
    pub fn inner(&self, v: &[u32]) -> u128 {
        self.g
            .iter()
            .zip(v)
            .map(|(&g, &x)| g as u128 * x as u128)
            .sum()
    }

    /// Entry-wise `g⁻¹`, stacked so that `G · G⁻¹(A) = A`.
    pub fn mat_decompose(&self, a: &ModMatrix) -> Result<Decomp> {
        if a.rows() != self.n || a.modulus() != self.q {
            return Err(Error::Structure(format!(
                "decompose: expected {} rows mod {}, got {}x{} mod {}",
                self.n,
                self.q,
                a.rows(),
                a.cols(),
                a.modulus()
            )));
        }
        let d = self.d();
        let m = a.cols();
        let mut entries = vec![0u32; self.n * d * m];
        for i in 0..self.n {
            for j in 0..m {
                let v = a.get(i, j);
                for bit in 0..self.l {
                    entries[(i * d + 1 + bit) * m + j] = ((v >> bit) & 1) as u32;
                }
            }
        }
        Ok(Decomp {
            rows: self.n * d,
            cols: m,
            entries,
        })
    }

    /// `G · X`, accumulated over the integers and then reduced mod `q`.
    pub fn reconstruct(&self, x: &Decomp) -> Result<ModMatrix> {
        let d = self.d();
        if x.rows != self.n * d {
            return Err(Error::Structure(format!(
                "reconstruct: decomposition has {} rows, expected {}",
                x.rows,
                self.n * d
            )));
        }
        let q = self.q as u128;
        Ok(ModMatrix::from_fn(self.n, x.cols, self.q, |i, j| {
            let s: u128 = (0..d)
                .map(|k| self.g[k] as u128 * x.get(i * d + k, j) as u128)
                .sum();
            (s % q) as u64
        }))
    }

    /// `A · G⁻¹(B)` for `A: r x nd` and `B: n x m`, both over `Z_q`.
    pub fn mul_inverse(&self, a: &ModMatrix, b: &ModMatrix) -> Result<ModMatrix> {
        let x = self.mat_decompose(b)?;
        mul_decomp(a, &x)
    }
}

/// Integer matrix produced by `G⁻¹` and closed under entrywise addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomp {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl Decomp {
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows.checked_mul(cols) != Some(entries.len()) {
            return Err(Error::Structure(format!(
                "{rows}x{cols} decomposition with {} entries",
                entries.len()
            )));
        }
        Ok(Decomp {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Decomp {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    /// Column `col`, i.e. the stacked digit vectors of one input column.
    pub fn column(&self, col: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    /// Entrywise integer sum; no carries are propagated.
    pub fn add(&self, other: &Decomp) -> Result<Decomp> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Structure(format!(
                "decomp add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Decomp {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// `A · X` where the integer entries of `X` are lifted into `Z_q` on the fly.
pub fn mul_decomp(a: &ModMatrix, x: &Decomp) -> Result<ModMatrix> {
    if a.cols() != x.rows {
        return Err(Error::Structure(format!(
            "mul by decomposition: {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            x.rows,
            x.cols
        )));
    }
    let q = a.modulus();
    let cols = x.cols;
    Ok(a.mul_lifted(cols, |k, j| x.entries[k * cols + j] as u64 % q))
}
