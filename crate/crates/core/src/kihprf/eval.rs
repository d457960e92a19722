//! Tree evaluators `A_T`, `B^S_T`, `C^S_T` and the evaluation cache.
//!
//! All three share one recursion: a leaf yields the family's leaf matrix
//! for its symbol, an internal node yields
//! `left + A_sel · G⁻¹(right)` where `sel` is the first symbol of the
//! node's own input segment (`0̄` selects `A0`).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::modmath::ModMatrix;
use crate::symbols::{BitString, Symbol, SymbolString};

use super::instance::{DerivedMatrices, PrfInstance};

const MEMO_LIMIT: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Family {
    A,
    B,
    C,
}

type MemoKey = (Family, [u8; 32], usize, Vec<Symbol>);

/// Counters describing how much work the cache saved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    /// Internal-node matrices recomputed by the most recent incremental evaluation.
    pub last_recomputed: usize,
}

/// Node values of the last full evaluation, kept for incremental updates.
#[derive(Clone, Debug)]
pub(crate) struct Snapshot {
    pub instance: [u8; 32],
    pub seed: [u8; 32],
    pub input: BitString,
    pub left_nodes: Vec<ModMatrix>,
    pub right_nodes: Vec<ModMatrix>,
}

/// Memo of intermediate node matrices keyed by node and input segment.
///
/// A cache is single-owner mutable state: give each thread its own, or
/// wrap a shared one in a mutex. It binds itself to the first instance it
/// sees and silently resets when used with another one.
#[derive(Debug, Default)]
pub struct EvalCache {
    memo_enabled: bool,
    instance: Option<[u8; 32]>,
    memo: HashMap<MemoKey, ModMatrix>,
    pub(crate) snapshot: Option<Snapshot>,
    pub(crate) stats: CacheStats,
}

impl EvalCache {
    pub fn new() -> Self {
        EvalCache {
            memo_enabled: true,
            ..Default::default()
        }
    }

    /// A cache that never memoizes; every node is recomputed.
    pub fn disabled() -> Self {
        EvalCache::default()
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn clear(&mut self) {
        self.memo.clear();
        self.snapshot = None;
        self.stats = CacheStats::default();
    }

    pub(crate) fn bind(&mut self, inst: &PrfInstance) {
        if self.instance != Some(inst.id()) {
            self.clear();
            self.instance = Some(inst.id());
        }
    }
}

pub(crate) struct TreeInput<'a> {
    pub family: Family,
    pub derived: Option<&'a DerivedMatrices>,
    pub symbols: Vec<Symbol>,
}

impl<'a> TreeInput<'a> {
    pub fn bits(family: Family, derived: Option<&'a DerivedMatrices>, bits: &BitString) -> Self {
        TreeInput {
            family,
            derived,
            symbols: SymbolString::from_bits(bits).symbols().to_vec(),
        }
    }

    fn seed_key(&self) -> [u8; 32] {
        self.derived.map(|d| d.seed_digest).unwrap_or([0; 32])
    }

    fn leaf<'m>(&'m self, inst: &'m PrfInstance, sym: Symbol) -> &'m ModMatrix {
        match self.family {
            Family::A => inst.selector(sym),
            Family::B => self.derived.expect("B needs seed").b(sym.selector()),
            Family::C => self.derived.expect("C needs seed").c(sym),
        }
    }
}

fn internal(inst: &PrfInstance, sel: Symbol, left: &ModMatrix, right: &ModMatrix) -> Result<ModMatrix> {
    inst.gadget.mul_inverse(inst.selector(sel), right)?.add(left)
}

/// Evaluates every node of the tree (post-order), consulting the memo.
pub(crate) fn eval_nodes(
    inst: &PrfInstance,
    input: &TreeInput<'_>,
    cache: &mut EvalCache,
) -> Result<Vec<ModMatrix>> {
    if input.symbols.len() != inst.leaves() {
        return Err(Error::length("tree input", inst.leaves(), input.symbols.len()));
    }
    cache.bind(inst);
    if cache.memo.len() > MEMO_LIMIT {
        cache.memo.clear();
    }
    let seed_key = input.seed_key();
    let mut values: Vec<ModMatrix> = Vec::with_capacity(inst.layout.nodes.len());
    for (id, node) in inst.layout.nodes.iter().enumerate() {
        let segment = &input.symbols[node.start..node.start + node.len];
        let value = match node.children {
            None => input.leaf(inst, segment[0]).clone(),
            Some((l, r)) => {
                let key = (input.family, seed_key, id, segment.to_vec());
                if let Some(hit) = cache.memo_enabled.then(|| cache.memo.get(&key)).flatten() {
                    cache.stats.hits += 1;
                    hit.clone()
                } else {
                    cache.stats.misses += 1;
                    let v = internal(inst, segment[0], &values[l], &values[r])?;
                    if cache.memo_enabled {
                        cache.memo.insert(key, v.clone());
                    }
                    v
                }
            }
        };
        values.push(value);
    }
    Ok(values)
}

/// Re-evaluates only the ancestors of `leaf` after its symbol changed.
/// Returns the number of internal nodes recomputed.
pub(crate) fn update_path(
    inst: &PrfInstance,
    input: &TreeInput<'_>,
    nodes: &mut [ModMatrix],
    leaf: usize,
) -> Result<usize> {
    let leaf_node = inst.layout.leaf_to_node[leaf];
    nodes[leaf_node] = input.leaf(inst, input.symbols[leaf]).clone();
    let path = inst.layout.ancestors(leaf);
    for &id in &path {
        let node = &inst.layout.nodes[id];
        let (l, r) = node.children.expect("ancestors are internal");
        nodes[id] = internal(inst, input.symbols[node.start], &nodes[l], &nodes[r])?;
    }
    Ok(path.len())
}

impl PrfInstance {
    /// `A_T(x)` for `|x| = |T|`.
    pub fn eval_a(&self, x: &BitString, cache: &mut EvalCache) -> Result<ModMatrix> {
        let input = TreeInput::bits(Family::A, None, x);
        let nodes = eval_nodes(self, &input, cache)?;
        Ok(nodes[self.layout.root].clone())
    }

    /// `B^S_T(x)`: leaves `B0, B1`, selectors from `A0, A1`.
    pub fn eval_b(&self, derived: &DerivedMatrices, x: &BitString, cache: &mut EvalCache) -> Result<ModMatrix> {
        let input = TreeInput::bits(Family::B, Some(derived), x);
        let nodes = eval_nodes(self, &input, cache)?;
        Ok(nodes[self.layout.root].clone())
    }

    /// `C^S_T(z)` over `|T|` symbols: leaves `C0, C1, C̄0`.
    pub fn eval_c(&self, derived: &DerivedMatrices, z: &SymbolString, cache: &mut EvalCache) -> Result<ModMatrix> {
        let input = TreeInput {
            family: Family::C,
            derived: Some(derived),
            symbols: z.symbols().to_vec(),
        };
        let nodes = eval_nodes(self, &input, cache)?;
        Ok(nodes[self.layout.root].clone())
    }
}
