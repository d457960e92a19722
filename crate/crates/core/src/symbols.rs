//! Bit strings, the three-symbol alphabet `{0, 1, 0̄}` and almost-XOR.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        BitString(vec![true; len])
    }

    /// Big-endian bits of `value`, `len` bits wide.
    pub fn from_u64(value: u64, len: usize) -> Self {
        BitString((0..len).rev().map(|i| i < 64 && (value >> i) & 1 == 1).collect())
    }

    pub fn random(len: usize, rng: &mut impl RngCore) -> Self {
        let mut bits = Vec::with_capacity(len);
        while bits.len() < len {
            let word = rng.next_u64();
            bits.extend((0..64).map(|i| (word >> i) & 1 == 1).take(len - bits.len()));
        }
        BitString(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn split_at(&self, mid: usize) -> (BitString, BitString) {
        let (a, b) = self.0.split_at(mid);
        (BitString(a.to_vec()), BitString(b.to_vec()))
    }

    /// Splits a `2k`-bit input into its left and right halves.
    pub fn halves(&self) -> (BitString, BitString) {
        self.split_at(self.len() / 2)
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }

    pub fn flipped(&self, i: usize) -> BitString {
        let mut v = self.0.clone();
        v[i] = !v[i];
        BitString(v)
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::length("xor operand", self.len(), other.len()));
        }
        Ok(BitString(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    /// Positions where the two strings differ.
    pub fn diff_positions(&self, other: &BitString) -> Vec<usize> {
        (0..self.len().min(other.len()))
            .filter(|&i| self.0[i] != other.0[i])
            .collect()
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Usage(format!("bit string contains {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// One symbol of `{0, 1, 0̄}`; `ZeroBar` stands for the two bits `00`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    One,
    ZeroBar,
}

impl Symbol {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    /// Bits represented by the symbol.
    pub fn bit_length(self) -> usize {
        match self {
            Symbol::Zero | Symbol::One => 1,
            Symbol::ZeroBar => 2,
        }
    }

    /// Selector bit used at internal tree nodes: `0̄` selects like `0`.
    pub fn selector(self) -> bool {
        self == Symbol::One
    }

    /// Almost-XOR of two bits: `1⊕̄1 = 0`, `0⊕̄1 = 1⊕̄0 = 1`, `0⊕̄0 = 0̄`.
    pub fn almost_xor(a: bool, b: bool) -> Symbol {
        match (a, b) {
            (true, true) => Symbol::Zero,
            (false, false) => Symbol::ZeroBar,
            _ => Symbol::One,
        }
    }

    fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::ZeroBar => 'Z',
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolString(Vec<Symbol>);

impl SymbolString {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        SymbolString(symbols)
    }

    /// Embeds a bit string (no `0̄` symbols).
    pub fn from_bits(bits: &BitString) -> Self {
        SymbolString(bits.bits().iter().map(|&b| Symbol::from_bit(b)).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of bits represented, counting `0̄` twice.
    pub fn bit_length(&self) -> usize {
        self.0.iter().map(|s| s.bit_length()).sum()
    }

    pub fn count(&self, sym: Symbol) -> usize {
        self.0.iter().filter(|&&s| s == sym).count()
    }

    /// Back to bits when no `0̄` is present.
    pub fn to_bits(&self) -> Option<BitString> {
        self.0
            .iter()
            .map(|s| match s {
                Symbol::Zero => Some(false),
                Symbol::One => Some(true),
                Symbol::ZeroBar => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(BitString::new)
    }
}

impl FromStr for SymbolString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(Symbol::Zero),
                '1' => Ok(Symbol::One),
                'Z' | 'z' => Ok(Symbol::ZeroBar),
                other => Err(Error::Usage(format!("symbol string contains {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SymbolString)
    }
}

impl fmt::Display for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// Symbol-wise almost-XOR of two equal-length bit strings.
pub fn almost_xor(x: &BitString, y: &BitString) -> Result<SymbolString> {
    if x.len() != y.len() {
        return Err(Error::length("almost-xor operand", x.len(), y.len()));
    }
    Ok(SymbolString(
        x.bits()
            .iter()
            .zip(y.bits())
            .map(|(&a, &b)| Symbol::almost_xor(a, b))
            .collect(),
    ))
}
