//! The two function families.
//!
//! `F_S(y)   = round_p( S^T · A_T(y_lh) + R(y_lh) · A_{y[0]} · G⁻¹(B^S_T(y_rh)) )`
//! `F'_S(z0, z1) = round_p( S^T · A_T(z0) + R(z0) · A_{z0[0]} · G⁻¹(C^S_T(z1)) )`
//!
//! Everything before rounding is exact arithmetic mod `q`.

use crate::error::{Error, Result};
use crate::modmath::{centered_inf_norm, round_matrix, ModMatrix};
use crate::symbols::{almost_xor, BitString, SymbolString};

use super::eval::{eval_nodes, update_path, EvalCache, Family, Snapshot, TreeInput};
use super::instance::{DerivedMatrices, PrfInstance, Seed};

impl PrfInstance {
    fn check_input(&self, y: &BitString) -> Result<()> {
        if y.len() != 2 * self.leaves() {
            return Err(Error::length("PRF input", 2 * self.leaves(), y.len()));
        }
        Ok(())
    }

    /// Shared tail of both families: `round_p(S^T·left + R(lh)·A_{lh[0]}·G⁻¹(right))`.
    fn assemble(&self, seed: &Seed, lh: &BitString, left: &ModMatrix, right: &ModMatrix) -> Result<ModMatrix> {
        let first = seed.matrix().transpose().mul(left)?;
        let inner = self.gadget.mul_inverse(self.a(lh.get(0)), right)?;
        let second = self.prg_r(lh)?.mul(&inner)?;
        Ok(round_matrix(&first.add(&second)?, self.params().p()))
    }

    /// `F_S(y)` for `|y| = 2|T|`, computed without memoization.
    pub fn prf_eval(&self, seed: &Seed, y: &BitString) -> Result<ModMatrix> {
        self.prf_eval_cached(seed, y, &mut EvalCache::disabled())
    }

    /// `F_S(y)` through `cache`; also records the node matrices so that a
    /// following [`PrfInstance::eval_incremental`] can reuse them.
    pub fn prf_eval_cached(&self, seed: &Seed, y: &BitString, cache: &mut EvalCache) -> Result<ModMatrix> {
        self.check_input(y)?;
        let derived = DerivedMatrices::new(self, seed)?;
        let (lh, rh) = y.halves();
        let left_nodes = eval_nodes(self, &TreeInput::bits(Family::A, None, &lh), cache)?;
        let right_nodes = eval_nodes(self, &TreeInput::bits(Family::B, Some(&derived), &rh), cache)?;
        let root = self.layout.root;
        let out = self.assemble(seed, &lh, &left_nodes[root], &right_nodes[root])?;
        cache.snapshot = Some(Snapshot {
            instance: self.id(),
            seed: derived.seed_digest,
            input: y.clone(),
            left_nodes,
            right_nodes,
        });
        Ok(out)
    }

    /// `F_S(y)` where the cache holds the node matrices of an input that
    /// differs from `y` only at `flipped`. Only the matrices on the path
    /// from the flipped leaf to the root are recomputed.
    pub fn eval_incremental(
        &self,
        seed: &Seed,
        y: &BitString,
        flipped: usize,
        cache: &mut EvalCache,
    ) -> Result<ModMatrix> {
        self.check_input(y)?;
        if flipped >= y.len() {
            return Err(Error::Precondition(format!(
                "flipped index {flipped} outside input of {} bits",
                y.len()
            )));
        }
        let derived = DerivedMatrices::new(self, seed)?;
        let snap = cache
            .snapshot
            .as_mut()
            .ok_or_else(|| Error::StaleCache("no previous full evaluation cached".into()))?;
        if snap.instance != self.id() || snap.seed != derived.seed_digest {
            return Err(Error::StaleCache(
                "cached evaluation belongs to another instance or seed".into(),
            ));
        }
        let diff = y.diff_positions(&snap.input);
        if diff != [flipped] {
            return Err(Error::StaleCache(format!(
                "cached input differs from the new one at {diff:?}, expected exactly [{flipped}]"
            )));
        }
        let t = self.leaves();
        let (lh, rh) = y.halves();
        let recomputed = if flipped < t {
            let input = TreeInput::bits(Family::A, None, &lh);
            update_path(self, &input, &mut snap.left_nodes, flipped)?
        } else {
            let input = TreeInput::bits(Family::B, Some(&derived), &rh);
            update_path(self, &input, &mut snap.right_nodes, flipped - t)?
        };
        snap.input = y.clone();
        let root = self.layout.root;
        let out = self.assemble(seed, &lh, &snap.left_nodes[root], &snap.right_nodes[root])?;
        cache.stats.last_recomputed = recomputed;
        Ok(out)
    }

    /// `F'_S(z0, z1)` with `|z0| = |T|` bits and `|z1| = |T|` symbols.
    pub fn prf_eval_prime(&self, seed: &Seed, z0: &BitString, z1: &SymbolString) -> Result<ModMatrix> {
        self.prf_eval_prime_cached(seed, z0, z1, &mut EvalCache::disabled())
    }

    pub fn prf_eval_prime_cached(
        &self,
        seed: &Seed,
        z0: &BitString,
        z1: &SymbolString,
        cache: &mut EvalCache,
    ) -> Result<ModMatrix> {
        let t = self.leaves();
        if z0.len() != t {
            return Err(Error::length("F' left input", t, z0.len()));
        }
        if z1.len() != t {
            return Err(Error::length("F' right symbols", t, z1.len()));
        }
        let derived = DerivedMatrices::new(self, seed)?;
        let left = self.eval_a(z0, cache)?;
        let right = self.eval_c(&derived, z1, cache)?;
        self.assemble(seed, z0, &left, &right)
    }
}

/// Homomorphic combiner: entrywise sum of two outputs mod `p`.
pub fn combine(o1: &ModMatrix, o2: &ModMatrix) -> Result<ModMatrix> {
    o1.add(o2)
}

/// `‖F'_{S1+S2}(x_lh, x_rh ⊕̄ y_rh) − (F_{S1}(x) + F_{S2}(y))‖_∞`.
///
/// A pure measurement: no bound is asserted on the returned value.
pub fn homomorphism_defect(
    inst: &PrfInstance,
    s1: &Seed,
    s2: &Seed,
    x: &BitString,
    y: &BitString,
) -> Result<u64> {
    inst.check_input(x)?;
    inst.check_input(y)?;
    let (xl, xr) = x.halves();
    let (yl, yr) = y.halves();
    if xl != yl {
        return Err(Error::Precondition(format!(
            "left halves must agree: {xl} vs {yl}"
        )));
    }
    let z1 = almost_xor(&xr, &yr)?;
    let direct = inst.prf_eval_prime(&s1.add(s2)?, &xl, &z1)?;
    let combined = combine(&inst.prf_eval(s1, x)?, &inst.prf_eval(s2, y)?)?;
    Ok(centered_inf_norm(&direct.sub(&combined)?))
}

/// Whether the two right halves start with the same bit, i.e. whether
/// the root selectors of the two `B` evaluations agree.
pub fn selectors_agree(x: &BitString, y: &BitString) -> bool {
    let (_, xr) = x.halves();
    let (_, yr) = y.halves();
    xr.get(0) == yr.get(0)
}

/// Right-half symbols an `F'` evaluation sees for the pair `(x, y)`.
pub fn combined_symbols(x: &BitString, y: &BitString) -> Result<SymbolString> {
    almost_xor(&x.halves().1, &y.halves().1)
}
