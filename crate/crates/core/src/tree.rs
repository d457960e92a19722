//! Full binary tree shapes and their structural parameters.
//!
//! Shapes are written either as a canonical descriptor (`balanced:k`,
//! `leftspine:k`, `rightspine:k`) or as a nested literal such as
//! `((.,.),.)` where `.` is a leaf.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FullBinaryTree {
    Leaf,
    Node(Box<FullBinaryTree>, Box<FullBinaryTree>),
}

impl FullBinaryTree {
    pub fn node(left: FullBinaryTree, right: FullBinaryTree) -> Self {
        FullBinaryTree::Node(Box::new(left), Box::new(right))
    }

    /// Perfectly balanced tree with `leaves` leaves (a power of two).
    pub fn balanced(leaves: usize) -> Result<Self> {
        if leaves == 0 || !leaves.is_power_of_two() {
            return Err(Error::Usage(format!(
                "balanced tree needs a power-of-two leaf count, got {leaves}"
            )));
        }
        Ok(Self::balanced_unchecked(leaves))
    }

    fn balanced_unchecked(leaves: usize) -> Self {
        if leaves == 1 {
            FullBinaryTree::Leaf
        } else {
            let half = Self::balanced_unchecked(leaves / 2);
            Self::node(half.clone(), half)
        }
    }

    /// Every internal node has a leaf as its right child.
    pub fn left_spine(leaves: usize) -> Result<Self> {
        spine(leaves, |rest| Self::node(rest, FullBinaryTree::Leaf))
    }

    /// Every internal node has a leaf as its left child.
    pub fn right_spine(leaves: usize) -> Result<Self> {
        spine(leaves, |rest| Self::node(FullBinaryTree::Leaf, rest))
    }

    pub fn parse(descriptor: &str) -> Result<Self> {
        let d = descriptor.trim();
        if let Some((kind, count)) = d.split_once(':') {
            let k: usize = count
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad leaf count in tree descriptor {d:?}")))?;
            return match kind.trim() {
                "balanced" => Self::balanced(k),
                "leftspine" => Self::left_spine(k),
                "rightspine" => Self::right_spine(k),
                other => Err(Error::Usage(format!("unknown tree kind {other:?}"))),
            };
        }
        let mut p = LiteralParser {
            src: d.as_bytes(),
            pos: 0,
        };
        let tree = p.tree()?;
        if p.pos != p.src.len() {
            return Err(Error::Usage(format!(
                "trailing input at offset {} in tree literal {d:?}",
                p.pos
            )));
        }
        Ok(tree)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, FullBinaryTree::Leaf)
    }

    /// Number of leaves `|T|`.
    pub fn leaf_count(&self) -> usize {
        match self {
            FullBinaryTree::Leaf => 1,
            FullBinaryTree::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn internal_count(&self) -> usize {
        self.leaf_count() - 1
    }

    /// Expansion `e(T)`: 0 for a leaf, else `max(e(left) + 1, e(right))`.
    pub fn expansion(&self) -> usize {
        match self {
            FullBinaryTree::Leaf => 0,
            FullBinaryTree::Node(l, r) => (l.expansion() + 1).max(r.expansion()),
        }
    }

    /// Sequentiality `s(T)`: 0 for a leaf, else `max(s(left), s(right) + 1)`.
    pub fn sequentiality(&self) -> usize {
        match self {
            FullBinaryTree::Leaf => 0,
            FullBinaryTree::Node(l, r) => l.sequentiality().max(r.sequentiality() + 1),
        }
    }

    /// Number of internal ancestors of each leaf, left to right.
    pub fn leaf_depths(&self) -> Vec<usize> {
        fn walk(t: &FullBinaryTree, depth: usize, out: &mut Vec<usize>) {
            match t {
                FullBinaryTree::Leaf => out.push(depth),
                FullBinaryTree::Node(l, r) => {
                    walk(l, depth + 1, out);
                    walk(r, depth + 1, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, 0, &mut out);
        out
    }
}

fn spine(leaves: usize, grow: impl Fn(FullBinaryTree) -> FullBinaryTree) -> Result<FullBinaryTree> {
    if leaves == 0 {
        return Err(Error::Usage("a tree needs at least one leaf".into()));
    }
    let mut t = FullBinaryTree::Leaf;
    for _ in 1..leaves {
        t = grow(t);
    }
    Ok(t)
}

struct LiteralParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl LiteralParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "expected {:?} at offset {} in tree literal",
                c as char, self.pos
            )))
        }
    }

    fn tree(&mut self) -> Result<FullBinaryTree> {
        self.skip_ws();
        match self.src.get(self.pos) {
            Some(b'.') => {
                self.pos += 1;
                Ok(FullBinaryTree::Leaf)
            }
            Some(b'(') => {
                self.pos += 1;
                let l = self.tree()?;
                self.expect(b',')?;
                let r = self.tree()?;
                self.expect(b')')?;
                self.skip_ws();
                Ok(FullBinaryTree::node(l, r))
            }
            _ => Err(Error::Usage(format!(
                "expected '.' or '(' at offset {} in tree literal",
                self.pos
            ))),
        }
    }
}

impl FromStr for FullBinaryTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Renders the nested literal form.
impl fmt::Display for FullBinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FullBinaryTree::Leaf => f.write_str("."),
            FullBinaryTree::Node(l, r) => write!(f, "({l},{r})"),
        }
    }
}

/// Flattened view of a tree used by the evaluators: nodes in post-order,
/// each owning a contiguous segment of the leaf-indexed input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    pub nodes: Vec<LayoutNode>,
    pub root: usize,
    pub leaf_to_node: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct LayoutNode {
    pub start: usize,
    pub len: usize,
    pub children: Option<(usize, usize)>,
    pub parent: Option<usize>,
}

impl Layout {
    pub fn new(tree: &FullBinaryTree) -> Self {
        fn build(t: &FullBinaryTree, start: usize, out: &mut Layout) -> usize {
            let id = match t {
                FullBinaryTree::Leaf => {
                    out.nodes.push(LayoutNode {
                        start,
                        len: 1,
                        children: None,
                        parent: None,
                    });
                    let id = out.nodes.len() - 1;
                    out.leaf_to_node.push(id);
                    id
                }
                FullBinaryTree::Node(l, r) => {
                    let li = build(l, start, out);
                    let llen = out.nodes[li].len;
                    let ri = build(r, start + llen, out);
                    out.nodes.push(LayoutNode {
                        start,
                        len: llen + out.nodes[ri].len,
                        children: Some((li, ri)),
                        parent: None,
                    });
                    let id = out.nodes.len() - 1;
                    out.nodes[li].parent = Some(id);
                    out.nodes[ri].parent = Some(id);
                    id
                }
            };
            id
        }
        let mut out = Layout {
            nodes: Vec::new(),
            root: 0,
            leaf_to_node: Vec::new(),
        };
        out.root = build(tree, 0, &mut out);
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_to_node.len()
    }

    /// Internal nodes on the path from a leaf to the root, bottom-up.
    pub fn ancestors(&self, leaf: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.nodes[self.leaf_to_node[leaf]].parent;
        while let Some(id) = cur {
            out.push(id);
            cur = self.nodes[id].parent;
        }
        out
    }
}
