//! Dimensions, moduli and named presets.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::modmath::round_to_p;
use crate::tree::FullBinaryTree;

/// Upper bound on `n * d`, keeping every `nd x nd` matrix addressable in memory.
pub const MAX_ND: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    n: usize,
    q: u64,
    p: u64,
    l: usize,
    tree_desc: String,
    prg_salt: Vec<u8>,
}

impl Params {
    pub fn new(n: usize, q: u64, p: u64, tree_desc: &str, prg_salt: &[u8]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invariant("lattice dimension n must be >= 1".into()));
        }
        if q < 2 {
            return Err(Error::Invariant(format!("modulus q = {q} must be >= 2")));
        }
        if p < 2 || p > q {
            return Err(Error::Invariant(format!(
                "rounding modulus p = {p} must satisfy 2 <= p <= q = {q}"
            )));
        }
        let l = ceil_log2(q);
        let d = l + 1;
        if n.checked_mul(d).map_or(true, |nd| nd > MAX_ND) {
            return Err(Error::Invariant(format!(
                "n*d = {n}*{d} exceeds the {MAX_ND} resource guard"
            )));
        }
        FullBinaryTree::parse(tree_desc)?;
        Ok(Params {
            n,
            q,
            p,
            l,
            tree_desc: tree_desc.trim().to_string(),
            prg_salt: prg_salt.to_vec(),
        })
    }

    pub fn preset(preset: Preset) -> Self {
        let (n, q, p, tree) = preset.shape();
        Self::new(n, q, p, tree, preset.salt()).expect("presets are valid")
    }

    /// Same moduli and salt, different tree.
    pub fn with_tree(&self, tree_desc: &str) -> Result<Self> {
        Self::new(self.n, self.q, self.p, tree_desc, &self.prg_salt)
    }

    pub fn with_salt(&self, salt: &[u8]) -> Self {
        Params {
            prg_salt: salt.to_vec(),
            ..self.clone()
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    /// `ceil(log2 q)`.
    pub fn l(&self) -> usize {
        self.l
    }
    /// `l + 1`, the decomposition width including the carry slot.
    pub fn d(&self) -> usize {
        self.l + 1
    }
    pub fn nd(&self) -> usize {
        self.n * self.d()
    }
    pub fn tree_desc(&self) -> &str {
        &self.tree_desc
    }
    pub fn prg_salt(&self) -> &[u8] {
        &self.prg_salt
    }

    pub fn tree(&self) -> FullBinaryTree {
        FullBinaryTree::parse(&self.tree_desc).expect("validated on construction")
    }

    pub fn round(&self, x: u64) -> u64 {
        round_to_p(x, self.q, self.p)
    }
}

fn ceil_log2(q: u64) -> usize {
    debug_assert!(q >= 2);
    (64 - (q - 1).leading_zeros()) as usize
}

/// Named parameter sets. None of them is sized for real security: they
/// are functional parameters for testing and benchmarking only. Secure
/// sizing follows `n = e(T) * Θ~(λ)` and `log q = e(T) * Θ~(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Toy,
    Desk,
    Large,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Toy, Preset::Desk, Preset::Large];

    fn shape(self) -> (usize, u64, u64, &'static str) {
        match self {
            Preset::Toy => (1, 1 << 4, 1 << 2, "balanced:2"),
            Preset::Desk => (4, 1 << 16, 1 << 8, "balanced:8"),
            Preset::Large => (16, 1 << 32, 1 << 16, "balanced:16"),
        }
    }

    fn salt(self) -> &'static [u8] {
        match self {
            Preset::Toy => b"kih/prg/toy",
            Preset::Desk => b"kih/prg/desk",
            Preset::Large => b"kih/prg/large",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Toy => "TOY",
            Preset::Desk => "DESK",
            Preset::Large => "LARGE",
        }
    }

    /// Human-readable description including the secure-sizing relation.
    pub fn describe(self) -> String {
        let p = Params::preset(self);
        let t = p.tree();
        format!(
            "preset {}: n={} q={} p={} l={} d={} tree={} |T|={} e(T)={} s(T)={}\n\
             NOT SECURE: functional parameters only.\n\
             secure sizing relation: n = e(T) * Θ~(λ), log q = e(T) * Θ~(1) \
             (here e(T) = {}, so n ≈ {}·λ and log q ≈ {}·polylog up to constants).\n\
             The LWE error distribution χ and its subgaussian parameter r only enter \
             the security argument; evaluation here is fully deterministic.",
            self.name(),
            p.n(),
            p.q(),
            p.p(),
            p.l(),
            p.d(),
            p.tree_desc(),
            t.leaf_count(),
            t.expansion(),
            t.sequentiality(),
            t.expansion(),
            t.expansion(),
            t.expansion(),
        )
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TOY" => Ok(Preset::Toy),
            "DESK" => Ok(Preset::Desk),
            "LARGE" => Ok(Preset::Large),
            other => Err(Error::Usage(format!("unknown preset {other:?}"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
