//! Entropy and information functionals of a graph under an encoding tree.
//!
//! Each tree-sum functional has an edgewise counterpart that walks codeword
//! paths instead of summing node terms; the two are computed independently
//! so they can check each other.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::format::{fixed9, raw9};
use crate::graph::{Distribution, Graph, VertexSet};
use crate::scalar::Scalar;
use crate::tree::{EncodingTree, Nested, NodeId, ROOT};

/// Set function weighting each tree node in the generalized entropy.
pub enum ModuleFunction<'a, T: Scalar = f64> {
    Cut,
    Volume,
    Custom(Box<dyn Fn(&VertexSet) -> T + 'a>),
}

impl<T: Scalar> ModuleFunction<'_, T> {
    fn eval(&self, tree: &EncodingTree<T>, id: NodeId) -> Result<T> {
        let node = tree.node(id);
        let value = match self {
            ModuleFunction::Cut => node.cut(),
            ModuleFunction::Volume => node.vol(),
            ModuleFunction::Custom(f) => f(node.marker()),
        };
        if !(value >= T::zero()) || !value.is_finite() {
            return Err(Error::NegativeModuleValue(value.as_f64()));
        }
        Ok(value)
    }
}

/// `-log2(V_α / V_parent)` for a non-root node.
#[inline]
fn node_info<T: Scalar>(tree: &EncodingTree<T>, id: NodeId) -> T {
    let node = tree.node(id);
    let parent = tree.node(node.parent().expect("non-root node"));
    -(node.vol() / parent.vol()).log2()
}

/// `-Σ_{α≠λ} (weight(α)/vol) log2(V_α/V_{α⁻})` over cached statistics.
pub(crate) fn tree_sum<T: Scalar>(
    g: &Graph<T>,
    tree: &EncodingTree<T>,
    mut weight: impl FnMut(NodeId) -> Result<T>,
) -> Result<T> {
    let mut total = T::zero();
    for (id, _) in tree.nodes().skip(1) {
        total += weight(id)? * node_info(tree, id);
    }
    Ok(total / g.volume())
}

pub(crate) fn entropy_of<T: Scalar>(g: &Graph<T>, tree: &EncodingTree<T>) -> T {
    tree_sum(g, tree, |id| Ok(tree.node(id).cut())).expect("cut weights are valid")
}

fn checked<T: Scalar>(g: &Graph<T>, tree: &EncodingTree<T>) -> Result<()> {
    tree.validate(g).map_err(Error::from)
}

/// Structural entropy `H^T(G)`.
pub fn structural_entropy<T: Scalar>(g: &Graph<T>, tree: &EncodingTree<T>) -> Result<T> {
    checked(g, tree)?;
    Ok(entropy_of(g, tree))
}

/// Generalized entropy with an arbitrary module function in place of the cut.
pub fn module_entropy<T: Scalar>(
    g: &Graph<T>,
    tree: &EncodingTree<T>,
    f: &ModuleFunction<'_, T>,
) -> Result<T> {
    checked(g, tree)?;
    tree_sum(g, tree, |id| f.eval(tree, id))
}

/// Compressing information `C^T(G)`: weights `V_α - g_α`.
pub fn compressing_info<T: Scalar>(g: &Graph<T>, tree: &EncodingTree<T>) -> Result<T> {
    checked(g, tree)?;
    tree_sum(g, tree, |id| Ok(tree.node(id).vol() - tree.node(id).cut()))
}

/// Decoding information: what the tree removes from the one-dimensional entropy.
pub fn decoding_info<T: Scalar>(g: &Graph<T>, tree: &EncodingTree<T>) -> Result<T> {
    Ok(g.one_dim_entropy() - structural_entropy(g, tree)?)
}

/// Sums `-log2(V_δ / V_δ⁻)` over nodes from `from` up to, excluding, `stop`.
fn path_info<T: Scalar>(tree: &EncodingTree<T>, from: NodeId, stop: NodeId) -> T {
    let mut total = T::zero();
    let mut cur = from;
    while cur != stop {
        let node = tree.node(cur);
        let parent = node.parent().expect("stop is an ancestor");
        total += -(node.vol() / tree.node(parent).vol()).log2();
        cur = parent;
    }
    total
}

fn edgewise<T: Scalar>(
    g: &Graph<T>,
    tree: &EncodingTree<T>,
    per_direction: impl Fn(NodeId, NodeId, NodeId) -> T,
) -> Result<T> {
    checked(g, tree)?;
    let mut total = T::zero();
    for &(x, y, w) in g.edges() {
        let (lx, ly) = (tree.leaf(x).expect("validated"), tree.leaf(y).expect("validated"));
        let branch = tree.common_ancestor(lx, ly);
        total += w * (per_direction(lx, ly, branch) + per_direction(ly, lx, branch));
    }
    Ok(total / g.volume())
}

/// Random-walk form of `H^T`: each step `x → y` pays for the codeword of `y`
/// below the node where the codewords of `x` and `y` branch.
pub fn structural_entropy_edgewise<T: Scalar>(g: &Graph<T>, tree: &EncodingTree<T>) -> Result<T> {
    edgewise(g, tree, |_, to, branch| path_info(tree, to, branch))
}

/// Mutual-information form of `C^T`: each step pays for the shared codeword
/// prefix above the branching node.
pub fn compressing_info_edgewise<T: Scalar>(g: &Graph<T>, tree: &EncodingTree<T>) -> Result<T> {
    edgewise(g, tree, |_, _, branch| path_info(tree, branch, ROOT))
}

/// Structural entropy of a distribution over a partition tree on its items,
/// with `g_α = V_α = Σ_{i∈T_α} p_i`.
pub fn distribution_entropy<T: Scalar>(p: &Distribution<T>, shape: &Nested) -> Result<T> {
    let n = p.len();
    let mut seen = vec![false; n];
    fn mass<T: Scalar>(shape: &Nested, p: &[T], seen: &mut [bool], acc: &mut T, parent: Option<T>) -> Result<T> {
        let own = match shape {
            Nested::Leaf(i) => {
                let slot = seen.get_mut(*i).ok_or(Error::VertexOutOfRange(*i))?;
                if std::mem::replace(slot, true) {
                    return Err(Error::InvalidTree(format!("item {i} appears twice")));
                }
                p[*i]
            }
            Nested::Node(children) => {
                if children.len() < 2 {
                    return Err(Error::InvalidTree("internal node needs two children".into()));
                }
                let total = subtree_mass(shape, p);
                for c in children {
                    mass(c, p, seen, acc, Some(total))?;
                }
                total
            }
        };
        if let Some(parent) = parent {
            if own > T::zero() {
                *acc += -own * (own / parent).log2();
            }
        }
        Ok(own)
    }
    fn subtree_mass<T: Scalar>(shape: &Nested, p: &[T]) -> T {
        match shape {
            Nested::Leaf(i) => p.get(*i).copied().unwrap_or_else(T::zero),
            Nested::Node(ch) => ch.iter().map(|c| subtree_mass(c, p)).sum(),
        }
    }
    let mut acc = T::zero();
    let root = mass(shape, p.probabilities(), &mut seen, &mut acc, None)?;
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidTree(format!("item {i} missing from the tree")));
    }
    Ok(acc / root)
}

/// All information measures of one (graph, tree) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoReport<T: Scalar = f64> {
    pub h1: T,
    pub h_t: T,
    pub compress: T,
    pub decode: T,
    pub ratio: T,
}

#[derive(Serialize)]
struct ReportDoc {
    h1: Box<RawValue>,
    h_t: Box<RawValue>,
    compress: Box<RawValue>,
    decode: Box<RawValue>,
    ratio: Box<RawValue>,
}

impl<T: Scalar> InfoReport<T> {
    /// Whether this tree alone certifies compressing ratio at least `rho`.
    pub fn certifies_ratio(&self, rho: T) -> bool {
        self.ratio >= rho
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.fields() {
            let _ = writeln!(out, "{key} {}", fixed9(value));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            h1: raw9(self.h1.as_f64()),
            h_t: raw9(self.h_t.as_f64()),
            compress: raw9(self.compress.as_f64()),
            decode: raw9(self.decode.as_f64()),
            ratio: raw9(self.ratio.as_f64()),
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    fn fields(&self) -> [(&'static str, f64); 5] {
        [
            ("h1", self.h1.as_f64()),
            ("h_t", self.h_t.as_f64()),
            ("compress", self.compress.as_f64()),
            ("decode", self.decode.as_f64()),
            ("ratio", self.ratio.as_f64()),
        ]
    }
}

pub fn info_report<T: Scalar>(g: &Graph<T>, tree: &EncodingTree<T>) -> Result<InfoReport<T>> {
    let h_t = structural_entropy(g, tree)?;
    let h1 = g.one_dim_entropy();
    let compress = compressing_info(g, tree)?;
    let decode = h1 - h_t;
    Ok(InfoReport { h1, h_t, compress, decode, ratio: compress / h1 })
}

/// `Φ(G)·(H¹(G) − 1)`, a lower bound on the structural entropy over all trees.
pub fn entropy_lower_bound<T: Scalar>(g: &Graph<T>) -> Result<T> {
    let (phi, _) = g.conductance_exact()?;
    Ok(phi * (g.one_dim_entropy() - T::one()))
}

/// `(1 − Φ)·H¹ + Φ`, an upper bound on compressing information over all trees.
pub fn compressing_upper_bound<T: Scalar>(g: &Graph<T>) -> Result<T> {
    let (phi, _) = g.conductance_exact()?;
    Ok((T::one() - phi) * g.one_dim_entropy() + phi)
}
