//! Symbolic unwinding of the `A_T` recursion.
//!
//! Unwinding `A_T(x) = A_{T.l}(x_l) + A_sel · G⁻¹(A_{T.r}(x_r))` all the way
//! down produces a flat sum per level: one leaf matrix followed by the
//! `G⁻¹` terms contributed along the left chain, each of which nests
//! another such sum. The shape of that expression is what the tree
//! parameters `e(T)` and `s(T)` count.

use crate::tree::{FullBinaryTree, Layout};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnwoundTerm {
    /// The leaf matrix owned by leaf `index`.
    Leaf(usize),
    /// `A_{x[start]} · G⁻¹(inner)`.
    Decomposed { selector: usize, inner: Vec<UnwoundTerm> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnwindProfile {
    /// Longest flat sum, counting the leaf term.
    pub max_summands: usize,
    /// Most `G⁻¹` terms added together in one flat sum.
    pub max_added_decompositions: usize,
    /// Deepest nesting of `G⁻¹` applications.
    pub max_nesting: usize,
    /// Total number of `G⁻¹` applications (one per internal node).
    pub decompositions: usize,
}

/// The flat sum for the whole tree.
pub fn unwind(tree: &FullBinaryTree) -> Vec<UnwoundTerm> {
    let layout = Layout::new(tree);
    unwind_node(&layout, layout.root)
}

fn unwind_node(layout: &Layout, id: usize) -> Vec<UnwoundTerm> {
    let node = &layout.nodes[id];
    match node.children {
        None => vec![UnwoundTerm::Leaf(node.start)],
        Some((l, r)) => {
            let mut sum = unwind_node(layout, l);
            sum.push(UnwoundTerm::Decomposed {
                selector: node.start,
                inner: unwind_node(layout, r),
            });
            sum
        }
    }
}

pub fn profile(tree: &FullBinaryTree) -> UnwindProfile {
    fn walk(sum: &[UnwoundTerm], depth: usize, acc: &mut UnwindProfile) {
        acc.max_summands = acc.max_summands.max(sum.len());
        let decs = sum
            .iter()
            .filter(|t| matches!(t, UnwoundTerm::Decomposed { .. }))
            .count();
        acc.max_added_decompositions = acc.max_added_decompositions.max(decs);
        acc.max_nesting = acc.max_nesting.max(depth);
        for t in sum {
            if let UnwoundTerm::Decomposed { inner, .. } = t {
                acc.decompositions += 1;
                walk(inner, depth + 1, acc);
            }
        }
    }
    let mut acc = UnwindProfile {
        max_summands: 0,
        max_added_decompositions: 0,
        max_nesting: 0,
        decompositions: 0,
    };
    walk(&unwind(tree), 0, &mut acc);
    acc
}
