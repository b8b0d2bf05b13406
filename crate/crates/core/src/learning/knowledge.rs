use std::collections::BTreeMap;

use serde::Serialize;

use super::catalog::{FeatureCatalog, TokenSet};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::scalar::Scalar;
use crate::tree::{EncodingTree, NodeId, NodePath, ROOT};

/// An encoding tree whose nodes carry the features shared by all their
/// members.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeTree<T: Scalar = f64> {
    tree: EncodingTree<T>,
    features: Vec<TokenSet>,
}

impl<T: Scalar> KnowledgeTree<T> {
    /// Annotates `tree` with `F(α) = ∩_{x ∈ T_α} F(x)`, taking `F(x)` from
    /// `sets[x]`.
    pub fn from_sets(tree: &EncodingTree<T>, sets: &[TokenSet]) -> Result<Self> {
        if sets.len() != tree.vertex_count() {
            return Err(Error::Argument(format!(
                "{} feature sets for {} vertices",
                sets.len(),
                tree.vertex_count()
            )));
        }
        let mut features = vec![TokenSet::new(); tree.len()];
        // arena is in preorder, so children come after their parent
        for id in (0..tree.len()).rev() {
            let node = tree.node(id);
            features[id] = match node.children().split_first() {
                None => sets[node.marker().as_slice()[0]].clone(),
                Some((&first, rest)) => {
                    let mut acc = features[first].clone();
                    for &c in rest {
                        acc.retain(|t| features[c].contains(t));
                    }
                    acc
                }
            };
        }
        Ok(Self { tree: tree.clone(), features })
    }

    pub fn tree(&self) -> &EncodingTree<T> {
        &self.tree
    }

    pub fn features(&self, id: NodeId) -> &TokenSet {
        &self.features[id]
    }

    /// Feature sets from the leaf of `v` up to the root.
    pub fn flow(&self, v: usize) -> Result<Vec<TokenSet>> {
        let leaf = self.tree.leaf(v).ok_or(Error::VertexOutOfRange(v))?;
        Ok(self.tree.ancestors(leaf).into_iter().map(|a| self.features[a].clone()).collect())
    }

    /// Features at the node where `u` and `v` branch.
    pub fn least_common(&self, u: usize, v: usize) -> Result<TokenSet> {
        if u == v {
            return Err(Error::Argument("least common abstraction needs two distinct vertices".into()));
        }
        let a = self.tree.leaf(u).ok_or(Error::VertexOutOfRange(u))?;
        let b = self.tree.leaf(v).ok_or(Error::VertexOutOfRange(v))?;
        Ok(self.features[self.tree.common_ancestor(a, b)].clone())
    }

    /// Encoding-tree document with a `features` list per node.
    pub fn to_document(&self, g: &Graph<T>) -> String {
        self.tree.to_document_with(g, |id| Some(self.features[id].iter().cloned().collect()))
    }
}

/// Builds the knowledge tree of `tree` from the full feature sets of the
/// catalog.
pub fn knowledge_tree<T: Scalar>(
    g: &Graph<T>,
    tree: &EncodingTree<T>,
    catalog: &FeatureCatalog,
) -> Result<KnowledgeTree<T>> {
    KnowledgeTree::from_sets(tree, &catalog.all_sets_for(g.ids())?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractionNode {
    parent: Option<usize>,
    children: Vec<usize>,
    features: TokenSet,
    marker: VertexSet,
    source: NodeId,
    absorbed: Vec<NodeId>,
}

impl AbstractionNode {
    pub fn parent(&self) -> Option<usize> {
        self.parent
    }

    pub fn children(&self) -> &[usize] {
        &self.children
    }

    pub fn features(&self) -> &TokenSet {
        &self.features
    }

    pub fn marker(&self) -> &VertexSet {
        &self.marker
    }

    /// Knowledge-tree node this abstraction stands for.
    pub fn source(&self) -> NodeId {
        self.source
    }

    /// Knowledge-tree nodes contracted into this one, `source` first.
    pub fn absorbed(&self) -> &[NodeId] {
        &self.absorbed
    }
}

/// Knowledge tree with every parent-child edge of equal features
/// contracted. Arena in preorder, root at index 0, children ordered by
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractionTree {
    nodes: Vec<AbstractionNode>,
}

struct Draft {
    source: NodeId,
    absorbed: Vec<NodeId>,
    children: Vec<Draft>,
}

impl AbstractionTree {
    pub fn from_knowledge<T: Scalar>(kt: &KnowledgeTree<T>) -> Self {
        fn draft<T: Scalar>(kt: &KnowledgeTree<T>, id: NodeId) -> Draft {
            let mut d = Draft { source: id, absorbed: vec![id], children: Vec::new() };
            let mut stack: Vec<NodeId> = kt.tree.node(id).children().iter().rev().copied().collect();
            while let Some(c) = stack.pop() {
                if kt.features[c] == kt.features[id] {
                    d.absorbed.push(c);
                    stack.extend(kt.tree.node(c).children().iter().rev());
                } else {
                    d.children.push(draft(kt, c));
                }
            }
            d.children.sort_by_key(|c| kt.tree.node(c.source).marker().first());
            d
        }
        fn flatten<T: Scalar>(kt: &KnowledgeTree<T>, d: Draft, parent: Option<usize>, out: &mut Vec<AbstractionNode>) -> usize {
            let id = out.len();
            out.push(AbstractionNode {
                parent,
                children: Vec::new(),
                features: kt.features[d.source].clone(),
                marker: kt.tree.node(d.source).marker().clone(),
                source: d.source,
                absorbed: d.absorbed,
            });
            for c in d.children {
                let child = flatten(kt, c, Some(id), out);
                out[id].children.push(child);
            }
            id
        }
        let mut nodes = Vec::new();
        flatten(kt, draft(kt, ROOT), None, &mut nodes);
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &AbstractionNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, &AbstractionNode)> {
        self.nodes.iter().enumerate()
    }

    pub fn depth(&self, mut id: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[id].parent {
            id = p;
            d += 1;
        }
        d
    }

    pub fn path(&self, mut id: usize) -> NodePath {
        let mut rev = Vec::new();
        while let Some(p) = self.nodes[id].parent {
            rev.push(self.nodes[p].children.iter().position(|&c| c == id).expect("child listed"));
            id = p;
        }
        rev.reverse();
        NodePath(rev)
    }

    /// Checks that features strictly grow from every parent to its children.
    pub fn check_strict_growth(&self) -> Result<()> {
        for (id, node) in self.nodes() {
            if let Some(p) = node.parent {
                let pf = &self.nodes[p].features;
                if !(pf.is_subset(&node.features) && pf.len() < node.features.len()) {
                    return Err(Error::InvalidTree(format!(
                        "abstraction at {} does not strictly extend its parent",
                        self.path(id)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Deepest node whose nonempty feature set lies inside `query`; larger
    /// feature sets and then smaller paths win ties.
    pub fn choose(&self, query: &TokenSet) -> Choice {
        let mut best: Option<(usize, usize, NodePath, usize)> = None;
        for (id, node) in self.nodes() {
            if node.features.is_empty() || !node.features.is_subset(query) {
                continue;
            }
            let key = (self.depth(id), node.features.len(), self.path(id), id);
            let better = match &best {
                None => true,
                Some((d, f, p, _)) => (key.0, key.1) > (*d, *f) || ((key.0, key.1) == (*d, *f) && key.2 < *p),
            };
            if better {
                best = Some(key);
            }
        }
        match best {
            Some((.., id)) => Choice { node: id, fallback: false },
            None => Choice { node: 0, fallback: true },
        }
    }

    pub fn to_document<T: Scalar>(&self, g: &Graph<T>) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            members: Vec<&'a str>,
            features: &'a TokenSet,
            #[serde(skip_serializing_if = "Vec::is_empty")]
            children: Vec<Out<'a>>,
        }
        fn build<'a, T: Scalar>(t: &'a AbstractionTree, g: &'a Graph<T>, id: usize) -> Out<'a> {
            let node = &t.nodes[id];
            Out {
                members: node.marker.iter().map(|v| g.id(v)).collect(),
                features: &node.features,
                children: node.children.iter().map(|&c| build(t, g, c)).collect(),
            }
        }
        serde_json::to_string_pretty(&build(self, g, 0)).expect("abstraction document serializes")
    }
}

/// Result of matching a point against the tree of abstractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Choice {
    pub node: usize,
    /// No abstraction matched and the root was taken.
    pub fallback: bool,
}

/// Label whose token set has the largest mean sample value; tokens missing
/// from the sample count as zero and the first label wins ties.
pub fn classify_by_abstraction<'a, T: Scalar>(
    sets: &'a [(String, TokenSet)],
    sample: &BTreeMap<String, T>,
) -> Result<&'a str> {
    let mut best: Option<(&str, T)> = None;
    for (label, set) in sets {
        if set.is_empty() {
            return Err(Error::EmptyAbstraction(label.clone()));
        }
        let total: T = set.iter().map(|t| sample.get(t).copied().unwrap_or_else(T::zero)).sum();
        let mean = total / T::of(set.len() as f64);
        if best.map_or(true, |(_, b)| mean > b) {
            best = Some((label, mean));
        }
    }
    best.map(|(l, _)| l).ok_or_else(|| Error::Argument("no abstraction sets given".into()))
}
