//! Exact modular matrix arithmetic over `Z_m` and the rounding map `Z_q -> Z_p`.
//!
//! Residues are always stored in `[0, modulus)`. The centered lift into
//! `(-m/2, m/2]` is only used when measuring norms.

use std::fmt;

use crate::error::{Error, Result};

/// Dense row-major matrix over `Z_modulus`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    entries: Vec<u64>,
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModMatrix<{}x{} mod {}>", self.rows, self.cols, self.modulus)?;
        if self.entries.len() <= 64 {
            write!(f, "{:?}", self.entries)?;
        }
        Ok(())
    }
}

impl ModMatrix {
    pub fn new(rows: usize, cols: usize, modulus: u64, entries: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Structure(format!("empty matrix {rows}x{cols}")));
        }
        if modulus < 2 {
            return Err(Error::Invariant(format!("modulus {modulus} < 2")));
        }
        if rows.checked_mul(cols) != Some(entries.len()) {
            return Err(Error::Structure(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows.saturating_mul(cols),
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|&&e| e >= modulus) {
            return Err(Error::Invariant(format!(
                "entry {bad} not reduced mod {modulus}"
            )));
        }
        Ok(ModMatrix {
            rows,
            cols,
            modulus,
            entries,
        })
    }

    /// Builds a matrix from arbitrary integers, reducing each mod `modulus`.
    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R], modulus: u64) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::Structure("ragged rows".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&v| v % modulus.max(1)))
            .collect();
        Self::new(rows.len(), cols, modulus, entries)
    }

    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        assert!(rows > 0 && cols > 0 && modulus >= 2);
        ModMatrix {
            rows,
            cols,
            modulus,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub(crate) fn from_fn(
        rows: usize,
        cols: usize,
        modulus: u64,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j) % modulus);
            }
        }
        ModMatrix {
            rows,
            cols,
            modulus,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    fn check_same_shape(&self, other: &ModMatrix, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols || self.modulus != other.modulus {
            return Err(Error::Structure(format!(
                "{op}: {}x{} mod {} vs {}x{} mod {}",
                self.rows, self.cols, self.modulus, other.rows, other.cols, other.modulus
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &ModMatrix, f: impl Fn(u64, u64, u64) -> u64) -> ModMatrix {
        let m = self.modulus;
        ModMatrix {
            rows: self.rows,
            cols: self.cols,
            modulus: m,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b, m))
                .collect(),
        }
    }

    /// Entrywise sum.
    pub fn add(&self, other: &ModMatrix) -> Result<ModMatrix> {
        self.check_same_shape(other, "add")?;
        Ok(self.zip_with(other, add_mod))
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &ModMatrix) -> Result<ModMatrix> {
        self.check_same_shape(other, "sub")?;
        Ok(self.zip_with(other, sub_mod))
    }

    pub fn neg(&self) -> ModMatrix {
        let m = self.modulus;
        self.map(|e| if e == 0 { 0 } else { m - e })
    }

    /// Multiplies every entry by the integer `k` (reduced mod the modulus).
    pub fn scale(&self, k: u64) -> ModMatrix {
        let m = self.modulus;
        let k = k % m;
        self.map(|e| mul_mod(e, k, m))
    }

    pub fn transpose(&self) -> ModMatrix {
        ModMatrix::from_fn(self.cols, self.rows, self.modulus, |i, j| self.get(j, i))
    }

    pub(crate) fn map(&self, f: impl Fn(u64) -> u64) -> ModMatrix {
        ModMatrix {
            rows: self.rows,
            cols: self.cols,
            modulus: self.modulus,
            entries: self.entries.iter().map(|&e| f(e)).collect(),
        }
    }

    /// Matrix product mod the shared modulus.
    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.cols != other.rows || self.modulus != other.modulus {
            return Err(Error::Structure(format!(
                "mul: {}x{} mod {} by {}x{} mod {}",
                self.rows, self.cols, self.modulus, other.rows, other.cols, other.modulus
            )));
        }
        Ok(self.mul_lifted(other.cols, |k, j| other.entries[k * other.cols + j]))
    }

    /// Product with a right-hand operand given entrywise by `rhs(k, j)`;
    /// the operand has `self.cols` rows and `out_cols` columns and its
    /// entries must already be reduced mod `self.modulus`.
    pub(crate) fn mul_lifted(&self, out_cols: usize, rhs: impl Fn(usize, usize) -> u64) -> ModMatrix {
        let m = self.modulus;
        let (n, inner) = (self.rows, self.cols);
        let mut out = Vec::with_capacity(n * out_cols);
        if m.is_power_of_two() {
            let mask = m - 1;
            let mut acc = vec![0u64; out_cols];
            for i in 0..n {
                acc.iter_mut().for_each(|a| *a = 0);
                for k in 0..inner {
                    let a = self.entries[i * inner + k];
                    if a == 0 {
                        continue;
                    }
                    for (j, slot) in acc.iter_mut().enumerate() {
                        let b = rhs(k, j);
                        if b != 0 {
                            *slot = slot.wrapping_add(a.wrapping_mul(b));
                        }
                    }
                }
                out.extend(acc.iter().map(|&a| a & mask));
            }
        } else {
            let mm = m as u128;
            let small = m <= 1 << 32;
            let mut acc = vec![0u128; out_cols];
            for i in 0..n {
                acc.iter_mut().for_each(|a| *a = 0);
                for k in 0..inner {
                    let a = self.entries[i * inner + k] as u128;
                    if a == 0 {
                        continue;
                    }
                    for (j, slot) in acc.iter_mut().enumerate() {
                        let b = rhs(k, j) as u128;
                        if small {
                            *slot += a * b;
                        } else {
                            *slot = (*slot + a * b) % mm;
                        }
                    }
                }
                out.extend(acc.iter().map(|&a| (a % mm) as u64));
            }
        }
        ModMatrix {
            rows: n,
            cols: out_cols,
            modulus: m,
            entries: out,
        }
    }

    /// Reinterprets the residues under another modulus (all entries must fit).
    pub fn with_modulus(&self, modulus: u64) -> Result<ModMatrix> {
        Self::new(self.rows, self.cols, modulus, self.entries.clone())
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `round(p/q * x)` with ties rounded up, reduced mod `p`.
pub fn round_to_p(x: u64, q: u64, p: u64) -> u64 {
    debug_assert!(x < q);
    let scaled = p as u128 * x as u128;
    let q128 = q as u128;
    let mut r = scaled / q128;
    if 2 * (scaled % q128) >= q128 {
        r += 1;
    }
    (r % p as u128) as u64
}

/// Entrywise rounding of a matrix over `Z_q` into `Z_p`.
pub fn round_matrix(a: &ModMatrix, p: u64) -> ModMatrix {
    let q = a.modulus();
    ModMatrix {
        rows: a.rows,
        cols: a.cols,
        modulus: p,
        entries: a.entries.iter().map(|&x| round_to_p(x, q, p)).collect(),
    }
}

/// Lift of a residue to the centered interval `(-m/2, m/2]`.
#[inline]
pub fn centered(v: u64, m: u64) -> i128 {
    if v > m / 2 {
        v as i128 - m as i128
    } else {
        v as i128
    }
}

/// Largest absolute centered entry.
pub fn centered_inf_norm(a: &ModMatrix) -> u64 {
    let m = a.modulus();
    a.entries()
        .iter()
        .map(|&e| centered(e, m).unsigned_abs() as u64)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m16(rows: &[&[u64]]) -> ModMatrix {
        ModMatrix::from_rows(rows, 16).unwrap()
    }

    #[test]
    fn add_identity_and_wraparound() {
        let a = m16(&[&[3, 15], &[0, 7]]);
        assert_eq!(a.add(&ModMatrix::zeros(2, 2, 16)).unwrap(), a);
        let all = ModMatrix::from_fn(3, 4, 16, |_, _| 15);
        let ones = ModMatrix::from_fn(3, 4, 16, |_, _| 1);
        assert!(all.add(&ones).unwrap().is_zero());
    }

    #[test]
    fn add_golden_random_mod16() {
        // scalar-loop oracle over a fixed pair
        let a = m16(&[&[13, 2, 9], &[7, 11, 4]]);
        let b = m16(&[&[6, 14, 9], &[12, 5, 15]]);
        let mut expect = vec![];
        for i in 0..2 {
            for j in 0..3 {
                expect.push((a.get(i, j) + b.get(i, j)) % 16);
            }
        }
        assert_eq!(expect, vec![3, 0, 2, 3, 0, 3]);
        assert_eq!(a.add(&b).unwrap().entries(), &expect[..]);
    }

    #[test]
    fn mul_examples() {
        let a = m16(&[&[1, 2], &[3, 4]]);
        let b = m16(&[&[5, 6], &[7, 8]]);
        assert_eq!(a.mul(&b).unwrap(), m16(&[&[3, 6], &[11, 2]]));
        assert_eq!(a.mul(&ModMatrix::identity(2, 16)).unwrap(), a);
        assert!(a.mul(&ModMatrix::zeros(2, 3, 16)).unwrap().is_zero());
    }

    #[test]
    fn mismatches_are_structural() {
        let a = ModMatrix::zeros(2, 3, 16);
        let b = ModMatrix::zeros(2, 3, 17);
        assert!(matches!(a.add(&b), Err(Error::Structure(_))));
        assert!(matches!(a.mul(&a), Err(Error::Structure(_))));
        assert!(matches!(
            ModMatrix::new(1, 2, 16, vec![1, 16]),
            Err(Error::Invariant(_))
        ));
        assert!(matches!(
            ModMatrix::new(2, 2, 16, vec![1]),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn mul_large_odd_modulus_does_not_overflow() {
        let q = u64::MAX - 58; // 2^64 - 59, prime
        let a = ModMatrix::from_fn(2, 3, q, |_, _| q - 1);
        let b = ModMatrix::from_fn(3, 2, q, |_, _| q - 1);
        // (-1)(-1) * 3 = 3
        assert!(a.mul(&b).unwrap().entries().iter().all(|&e| e == 3));
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_to_p(0, 16, 4), 0);
        assert_eq!(round_to_p(7, 16, 4), 2);
        assert_eq!(round_to_p(10, 16, 4), 3);
        // near q wraps to p == 0
        assert_eq!(round_to_p(15, 16, 4), 0);
    }

    #[test]
    fn rounding_matches_exact_rational_oracle_q16() {
        for x in 0..16u64 {
            // round half up of 4x/16 via (2px + q) / 2q
            let expect = ((2 * 4 * x + 16) / 32) % 4;
            assert_eq!(round_to_p(x, 16, 4), expect, "x={x}");
        }
    }

    #[test]
    fn rounding_is_monotone_until_wrap() {
        let (q, p) = (1u64 << 12, 1u64 << 5);
        let mut prev = 0;
        for x in 0..q {
            let r = round_to_p(x, q, p);
            if r == 0 && prev == p - 1 {
                // final wrap: every later x must also map to 0
                assert!((x..q).all(|y| round_to_p(y, q, p) == 0));
                break;
            }
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn centered_norm_examples() {
        assert_eq!(centered_inf_norm(&ModMatrix::zeros(2, 2, 16)), 0);
        assert_eq!(centered_inf_norm(&m16(&[&[0, 15]])), 1);
        assert_eq!(centered_inf_norm(&m16(&[&[8, 0]])), 8);
        assert_eq!(centered(9, 16), -7);
        assert_eq!(centered(2, 5), 2);
        assert_eq!(centered(3, 5), -2);
    }

    fn arb_matrix(rows: usize, cols: usize, m: u64) -> impl Strategy<Value = ModMatrix> {
        prop::collection::vec(0..m, rows * cols)
            .prop_map(move |e| ModMatrix::new(rows, cols, m, e).unwrap())
    }

    proptest! {
        #[test]
        fn add_commutes_and_associates(
            a in arb_matrix(3, 4, 97), b in arb_matrix(3, 4, 97), c in arb_matrix(3, 4, 97)
        ) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a);
        }

        #[test]
        fn mul_distributes(
            a in arb_matrix(2, 3, 64), b in arb_matrix(3, 4, 64), c in arb_matrix(3, 4, 64)
        ) {
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn power_of_two_fast_path_matches_u128(a in arb_matrix(3, 5, 1 << 16), b in arb_matrix(5, 2, 1 << 16)) {
            let fast = a.mul(&b).unwrap();
            for i in 0..3 {
                for j in 0..2 {
                    let s: u128 = (0..5).map(|k| a.get(i, k) as u128 * b.get(k, j) as u128).sum();
                    prop_assert_eq!(fast.get(i, j) as u128, s % (1 << 16));
                }
            }
        }
    }
}
