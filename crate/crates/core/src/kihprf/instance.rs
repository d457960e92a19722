use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::entropy::uniform_matrix;
use crate::error::{Error, Result};
use crate::gadget::GadgetContext;
use crate::modmath::ModMatrix;
use crate::params::Params;
use crate::symbols::{BitString, Symbol};
use crate::tree::{FullBinaryTree, Layout};

use super::prg;

/// Public part of the construction: parameters, tree and the two uniform
/// matrices `A0, A1` (`n x nd` over `Z_q`).
#[derive(Clone, Debug)]
pub struct PrfInstance {
    params: Params,
    tree: FullBinaryTree,
    pub(crate) layout: Layout,
    pub(crate) gadget: GadgetContext,
    a0: ModMatrix,
    a1: ModMatrix,
    id: [u8; 32],
}

impl PartialEq for PrfInstance {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for PrfInstance {}

impl PrfInstance {
    /// Samples `A0, A1` uniformly, resampling `A1` on the (negligible) event
    /// that the two coincide.
    pub fn sample(params: &Params, rng: &mut impl RngCore) -> Result<Self> {
        let (rows, cols, q) = (params.n(), params.nd(), params.q());
        let a0 = uniform_matrix(rng, rows, cols, q);
        let mut a1 = uniform_matrix(rng, rows, cols, q);
        while a1 == a0 {
            a1 = uniform_matrix(rng, rows, cols, q);
        }
        Self::from_parts(params.clone(), a0, a1)
    }

    pub fn from_parts(params: Params, a0: ModMatrix, a1: ModMatrix) -> Result<Self> {
        for (name, m) in [("A0", &a0), ("A1", &a1)] {
            if m.rows() != params.n() || m.cols() != params.nd() || m.modulus() != params.q() {
                return Err(Error::Structure(format!(
                    "{name} is {}x{} mod {}, expected {}x{} mod {}",
                    m.rows(),
                    m.cols(),
                    m.modulus(),
                    params.n(),
                    params.nd(),
                    params.q()
                )));
            }
        }
        if a0 == a1 {
            return Err(Error::Invariant("A0 and A1 must differ".into()));
        }
        let tree = params.tree();
        let layout = Layout::new(&tree);
        let gadget = GadgetContext::new(&params);
        let id = instance_digest(&params, &a0, &a1);
        Ok(PrfInstance {
            params,
            tree,
            layout,
            gadget,
            a0,
            a1,
            id,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }
    pub fn tree(&self) -> &FullBinaryTree {
        &self.tree
    }
    pub fn gadget(&self) -> &GadgetContext {
        &self.gadget
    }
    pub fn a0(&self) -> &ModMatrix {
        &self.a0
    }
    pub fn a1(&self) -> &ModMatrix {
        &self.a1
    }

    /// `A_b`.
    pub fn a(&self, bit: bool) -> &ModMatrix {
        if bit {
            &self.a1
        } else {
            &self.a0
        }
    }

    pub(crate) fn selector(&self, sym: Symbol) -> &ModMatrix {
        self.a(sym.selector())
    }

    /// `|T|`.
    pub fn leaves(&self) -> usize {
        self.layout.leaf_count()
    }

    /// Digest binding keys and caches to this exact instance.
    pub fn id(&self) -> [u8; 32] {
        self.id
    }

    pub fn id_hex(&self) -> String {
        hex::encode(self.id)
    }

    /// Same public matrices evaluated over a different tree of equal `n, q`.
    pub fn with_tree(&self, tree_desc: &str) -> Result<Self> {
        Self::from_parts(self.params.with_tree(tree_desc)?, self.a0.clone(), self.a1.clone())
    }

    /// The generator `R(x)`, an `nd x n` matrix over `Z_q`.
    pub fn prg_r(&self, left_half: &BitString) -> Result<ModMatrix> {
        if left_half.len() != self.leaves() {
            return Err(Error::length("generator input", self.leaves(), left_half.len()));
        }
        Ok(prg::expand(
            self.params.prg_salt(),
            left_half,
            self.params.nd(),
            self.params.n(),
            self.params.q(),
        ))
    }

    pub fn zero_seed(&self) -> Seed {
        Seed(ModMatrix::zeros(self.params.n(), self.params.nd(), self.params.q()))
    }

    /// Uniform seed `S` in `Z_q^{n x nd}`.
    pub fn keygen(&self, rng: &mut impl RngCore) -> Seed {
        keygen(&self.params, rng)
    }

    pub(crate) fn check_seed(&self, seed: &Seed) -> Result<()> {
        let s = seed.matrix();
        if s.rows() != self.params.n() || s.cols() != self.params.nd() || s.modulus() != self.params.q() {
            return Err(Error::Structure(format!(
                "seed is {}x{} mod {}, instance expects {}x{} mod {}",
                s.rows(),
                s.cols(),
                s.modulus(),
                self.params.n(),
                self.params.nd(),
                self.params.q()
            )));
        }
        Ok(())
    }
}

fn instance_digest(params: &Params, a0: &ModMatrix, a1: &ModMatrix) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"kih/instance/v1");
    for v in [params.n() as u64, params.q(), params.p()] {
        h.update(v.to_le_bytes());
    }
    for bytes in [params.tree_desc().as_bytes(), params.prg_salt()] {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    for m in [a0, a1] {
        for e in m.entries() {
            h.update(e.to_le_bytes());
        }
    }
    h.finalize().into()
}

/// Secret seed `S`, an `n x nd` matrix over `Z_q`. Seeds form a group
/// under entrywise addition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Seed(ModMatrix);

impl Seed {
    pub fn new(params: &Params, s: ModMatrix) -> Result<Self> {
        if s.rows() != params.n() || s.cols() != params.nd() || s.modulus() != params.q() {
            return Err(Error::Structure(format!(
                "seed must be {}x{} mod {}",
                params.n(),
                params.nd(),
                params.q()
            )));
        }
        Ok(Seed(s))
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.0
    }

    pub fn add(&self, other: &Seed) -> Result<Seed> {
        self.0.add(&other.0).map(Seed)
    }

    pub fn sub(&self, other: &Seed) -> Result<Seed> {
        self.0.sub(&other.0).map(Seed)
    }

    pub fn scale(&self, k: u64) -> Seed {
        Seed(self.0.scale(k))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub(crate) fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"kih/seed/v1");
        for e in self.0.entries() {
            h.update(e.to_le_bytes());
        }
        h.finalize().into()
    }
}

/// Uniform seed for the given parameters.
pub fn keygen(params: &Params, rng: &mut impl RngCore) -> Seed {
    Seed(uniform_matrix(rng, params.n(), params.nd(), params.q()))
}

/// Seed-dependent matrices `B_b = A_b + S`, `C1 = A0 + B1`,
/// `C̄0 = A0 + B0` and `C0 = A1 + B1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedMatrices {
    pub b0: ModMatrix,
    pub b1: ModMatrix,
    pub c0: ModMatrix,
    pub c1: ModMatrix,
    pub cbar0: ModMatrix,
    pub(crate) seed_digest: [u8; 32],
}

impl DerivedMatrices {
    pub fn new(inst: &PrfInstance, seed: &Seed) -> Result<Self> {
        inst.check_seed(seed)?;
        let s = seed.matrix();
        let b0 = inst.a0().add(s)?;
        let b1 = inst.a1().add(s)?;
        let c1 = inst.a0().add(&b1)?;
        let cbar0 = inst.a0().add(&b0)?;
        let c0 = inst.a1().add(&b1)?;
        Ok(DerivedMatrices {
            b0,
            b1,
            c0,
            c1,
            cbar0,
            seed_digest: seed.digest(),
        })
    }

    pub fn b(&self, bit: bool) -> &ModMatrix {
        if bit {
            &self.b1
        } else {
            &self.b0
        }
    }

    pub fn c(&self, sym: Symbol) -> &ModMatrix {
        match sym {
            Symbol::Zero => &self.c0,
            Symbol::One => &self.c1,
            Symbol::ZeroBar => &self.cbar0,
        }
    }
}
