//! Left/right key-homomorphic constrained PRFs.
//!
//! A constrained key is a single PRF output `F_{k0}` at an input whose
//! free half is pinned to a padding vector (all ones, or all zeros for the
//! variable-length variant). Holding it, anyone with a second key `k1` can
//! combine `F_{k1}` at a chosen input with the stored value to obtain an
//! evaluation attributed to `F'_{k0+k1}`. The padding vector fixes which
//! right-hand targets are reachable:
//!
//! * ones padding: `b ⊕̄ 1` is `0` or `1`, so every bit string is reachable;
//! * zeros padding: `b ⊕̄ 0` is `1` or `0̄`, so only `{1, 0̄}^|T|` is.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kihprf::{combine, PrfInstance, Seed};
use crate::modmath::{centered_inf_norm, ModMatrix};
use crate::symbols::{BitString, Symbol, SymbolString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// The left half is fixed; the right half is free.
    Left,
    /// The right half is fixed; the left half is free.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PadMode {
    Ones,
    Zeros,
}

impl PadMode {
    fn pad_bit(self) -> bool {
        self == PadMode::Ones
    }

    /// Padding vector of the given length.
    pub fn padding(self, len: usize) -> BitString {
        match self {
            PadMode::Ones => BitString::ones(len),
            PadMode::Zeros => BitString::zeros(len),
        }
    }

    /// Whether `target` lies in the set reachable as `x1' ⊕̄ padding`.
    pub fn reaches(self, target: &SymbolString) -> bool {
        self.preimage(target).is_ok()
    }

    /// The bit string `x1'` with `x1' ⊕̄ padding = target`.
    pub fn preimage(self, target: &SymbolString) -> Result<BitString> {
        let pad = self.pad_bit();
        target
            .symbols()
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                [false, true]
                    .into_iter()
                    .find(|&b| Symbol::almost_xor(b, pad) == s)
                    .ok_or_else(|| {
                        Error::Precondition(format!(
                            "symbol {i} of target {target} is unreachable against {self} padding"
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::new)
    }

    /// Forward map `x1' ↦ x1' ⊕̄ padding`.
    pub fn image(self, x1: &BitString) -> SymbolString {
        let pad = self.pad_bit();
        SymbolString::new(x1.bits().iter().map(|&b| Symbol::almost_xor(b, pad)).collect())
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Usage(format!("side must be left or right, got {other:?}"))),
        }
    }
}

impl fmt::Display for PadMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PadMode::Ones => "ones",
            PadMode::Zeros => "zeros",
        })
    }
}

impl FromStr for PadMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ones" => Ok(PadMode::Ones),
            "zeros" => Ok(PadMode::Zeros),
            other => Err(Error::Usage(format!("mode must be ones or zeros, got {other:?}"))),
        }
    }
}

/// A pinned PRF value plus the public data needed to use it. The seed it
/// was derived from is never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedKey {
    pub side: Side,
    pub mode: PadMode,
    pub x0: BitString,
    pub value: ModMatrix,
    pub instance_id: [u8; 32],
}

fn place(side: Side, fixed: &BitString, free: &BitString) -> BitString {
    match side {
        Side::Left => fixed.concat(free),
        Side::Right => free.concat(fixed),
    }
}

/// Pins `F_{k0}` at `x0 ‖ pad` (left) or `pad ‖ x0` (right).
pub fn constrain(inst: &PrfInstance, k0: &Seed, x0: &BitString, side: Side, mode: PadMode) -> Result<ConstrainedKey> {
    let t = inst.leaves();
    if x0.len() != t {
        return Err(Error::length("constrained half x0", t, x0.len()));
    }
    let input = place(side, x0, &mode.padding(t));
    Ok(ConstrainedKey {
        side,
        mode,
        x0: x0.clone(),
        value: inst.prf_eval(k0, &input)?,
        instance_id: inst.id(),
    })
}

impl ConstrainedKey {
    fn check(&self, inst: &PrfInstance) -> Result<()> {
        if self.instance_id != inst.id() {
            return Err(Error::Precondition(
                "constrained key is bound to a different instance".into(),
            ));
        }
        let t = inst.leaves();
        if self.x0.len() != t {
            return Err(Error::length("constrained half x0", t, self.x0.len()));
        }
        let nd = inst.params().nd();
        if self.value.rows() != nd || self.value.cols() != nd || self.value.modulus() != inst.params().p() {
            return Err(Error::Structure("constrained value has the wrong shape".into()));
        }
        Ok(())
    }

    /// Input that `k1` is evaluated on for a given target.
    pub fn partner_input(&self, inst: &PrfInstance, target: &SymbolString) -> Result<BitString> {
        self.check(inst)?;
        if target.len() != inst.leaves() {
            return Err(Error::length("constrained target", inst.leaves(), target.len()));
        }
        let x1 = self.mode.preimage(target)?;
        Ok(place(self.side, &self.x0, &x1))
    }
}

/// `F_{k1}(partner input) + value`, attributed to `F'_{k0+k1}(x0, target)`.
pub fn eval_constrained(ck: &ConstrainedKey, inst: &PrfInstance, k1: &Seed, target: &SymbolString) -> Result<ModMatrix> {
    let input = ck.partner_input(inst, target)?;
    combine(&inst.prf_eval(k1, &input)?, &ck.value)
}

/// `‖eval_constrained − F'_{k0+k1}(x0, target)‖_∞`. Needs `k0`, so this is
/// a measurement for tests and reports, not part of the delegated API.
pub fn constrained_defect(
    ck: &ConstrainedKey,
    inst: &PrfInstance,
    k0: &Seed,
    k1: &Seed,
    target: &SymbolString,
) -> Result<u64> {
    let rebuilt = constrain(inst, k0, &ck.x0, ck.side, ck.mode)?;
    if rebuilt.value != ck.value {
        return Err(Error::Precondition("k0 does not match the constrained key".into()));
    }
    let delegated = eval_constrained(ck, inst, k1, target)?;
    let direct = inst.prf_eval_prime(&k0.add(k1)?, &ck.x0, target)?;
    Ok(centered_inf_norm(&delegated.sub(&direct)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::Entropy;
    use crate::params::{Params, Preset};
    use Symbol::*;

    fn setup() -> (PrfInstance, Seed, Seed) {
        let e = Entropy::from_hex("c0de").unwrap();
        let inst = PrfInstance::sample(&Params::preset(Preset::Toy), &mut e.stream("i")).unwrap();
        let k0 = inst.keygen(&mut e.stream("k0"));
        let k1 = inst.keygen(&mut e.stream("k1"));
        (inst, k0, k1)
    }

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn constrain_pins_padded_inputs() {
        let (inst, k0, _) = setup();
        let x0 = bits("10");
        let cases = [
            (Side::Left, PadMode::Ones, "1011"),
            (Side::Left, PadMode::Zeros, "1000"),
            (Side::Right, PadMode::Ones, "1110"),
            (Side::Right, PadMode::Zeros, "0010"),
        ];
        for (side, mode, input) in cases {
            let ck = constrain(&inst, &k0, &x0, side, mode).unwrap();
            assert_eq!(ck.value, inst.prf_eval(&k0, &bits(input)).unwrap(), "{side} {mode}");
        }
        assert!(matches!(
            constrain(&inst, &k0, &bits("1"), Side::Left, PadMode::Ones),
            Err(Error::Length { .. })
        ));
    }

    #[test]
    fn ones_mode_preimage_is_xor_with_ones() {
        assert_eq!(PadMode::Ones.preimage(&"11".parse().unwrap()).unwrap(), bits("00"));
        for v in 0..16u64 {
            let t = BitString::from_u64(v, 4);
            let target = SymbolString::from_bits(&t);
            let pre = PadMode::Ones.preimage(&target).unwrap();
            assert_eq!(pre, t.xor(&BitString::ones(4)).unwrap());
            assert_eq!(PadMode::Ones.image(&pre), target);
        }
        assert!(!PadMode::Ones.reaches(&"1Z".parse().unwrap()));
    }

    #[test]
    fn zeros_mode_reachable_set() {
        let image = PadMode::Zeros.image(&bits("10"));
        assert_eq!(image.symbols(), &[One, ZeroBar]);
        assert!(PadMode::Zeros.reaches(&"Z1".parse().unwrap()));
        assert!(!PadMode::Zeros.reaches(&"01".parse().unwrap()));
        assert_eq!(PadMode::Zeros.preimage(&image).unwrap(), bits("10"));
    }

    #[test]
    fn eval_is_combine_of_components() {
        let (inst, k0, k1) = setup();
        let ck = constrain(&inst, &k0, &bits("01"), Side::Left, PadMode::Ones).unwrap();
        let target: SymbolString = "10".parse().unwrap();
        let out = eval_constrained(&ck, &inst, &k1, &target).unwrap();
        let direct = inst.prf_eval(&k1, &bits("0101")).unwrap().add(&ck.value).unwrap();
        assert_eq!(out, direct);
        let zeros = constrain(&inst, &k0, &bits("01"), Side::Left, PadMode::Zeros).unwrap();
        assert!(matches!(
            eval_constrained(&zeros, &inst, &k1, &target),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn defect_checks_k0_and_instance() {
        let (inst, k0, k1) = setup();
        let ck = constrain(&inst, &k0, &bits("11"), Side::Right, PadMode::Zeros).unwrap();
        let target: SymbolString = "1Z".parse().unwrap();
        assert!(constrained_defect(&ck, &inst, &k0, &k1, &target).is_ok());
        assert!(matches!(
            constrained_defect(&ck, &inst, &k1, &k0, &target),
            Err(Error::Precondition(_))
        ));
        let other = PrfInstance::sample(inst.params(), &mut Entropy::from_hex("01").unwrap().stream("i")).unwrap();
        assert!(matches!(
            eval_constrained(&ck, &other, &k1, &target),
            Err(Error::Precondition(_))
        ));
    }
}
