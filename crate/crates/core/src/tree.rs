//! Encoding trees: rooted partition trees over the vertex set of a graph.
//!
//! Every node carries its marker (the vertex set it encodes) together with the
//! cached volume and cut weight of that marker. Trees are kept canonical:
//! children are ordered by the smallest vertex of their marker and the node
//! arena is laid out in preorder, so structurally equal trees compare equal.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::format::raw9;
use crate::graph::{Graph, VertexSet};
use crate::scalar::Scalar;

pub type NodeId = usize;

/// Root id of every canonical tree.
pub const ROOT: NodeId = 0;

/// Codeword of a node: child indices from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// Tree shape without statistics, the builder form of an [`EncodingTree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nested {
    Leaf(usize),
    Node(Vec<Nested>),
}

impl Nested {
    fn min_vertex(&self) -> usize {
        match self {
            Nested::Leaf(v) => *v,
            Nested::Node(ch) => ch.iter().map(Nested::min_vertex).min().unwrap_or(usize::MAX),
        }
    }

    fn canonicalize(&mut self) {
        if let Nested::Node(children) = self {
            children.iter_mut().for_each(Nested::canonicalize);
            children.sort_by_key(Nested::min_vertex);
        }
    }

    /// Two-level shape from a list of parts; singleton parts become leaves
    /// hanging directly off the root.
    pub fn two_level(parts: &[VertexSet]) -> Nested {
        if parts.len() == 1 {
            return Nested::Node(parts[0].iter().map(Nested::Leaf).collect());
        }
        Nested::Node(
            parts
                .iter()
                .map(|p| {
                    if p.len() == 1 {
                        Nested::Leaf(p.as_slice()[0])
                    } else {
                        Nested::Node(p.iter().map(Nested::Leaf).collect())
                    }
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode<T: Scalar = f64> {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    marker: VertexSet,
    vol: T,
    cut: T,
}

impl<T: Scalar> TreeNode<T> {
    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn marker(&self) -> &VertexSet {
        &self.marker
    }

    /// Cached volume `V_α`.
    pub fn vol(&self) -> T {
        self.vol
    }

    /// Cached cut weight `g_α`.
    pub fn cut(&self) -> T {
        self.cut
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingTree<T: Scalar = f64> {
    nodes: Vec<TreeNode<T>>,
    leaf_of: Vec<Option<NodeId>>,
}

/// Which structural rule a tree breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// Root marker is not `V`, or children do not partition their parent.
    Partition,
    /// A leaf marker is not a singleton, or a vertex has no unique leaf.
    Leaf,
    /// An internal node has fewer than two children.
    ChildCount,
    /// Cached volume or cut disagrees with the graph.
    Stats,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Partition => "partition",
            Clause::Leaf => "leaf",
            Clause::ChildCount => "child-count",
            Clause::Stats => "stats",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub path: NodePath,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation at {}: {}", self.clause, self.path, self.message)
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::InvalidTree(v.to_string())
    }
}

impl<T: Scalar> EncodingTree<T> {
    /// Builds a tree from its shape, computing markers and statistics. The
    /// result is canonical but not validated.
    pub fn from_nested(g: &Graph<T>, shape: &Nested) -> Result<Self> {
        let mut shape = shape.clone();
        shape.canonicalize();
        let mut tree = EncodingTree { nodes: Vec::new(), leaf_of: vec![None; g.n()] };
        tree.push(g, &shape, None)?;
        Ok(tree)
    }

    fn push(&mut self, g: &Graph<T>, shape: &Nested, parent: Option<NodeId>) -> Result<NodeId> {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            parent,
            children: Vec::new(),
            marker: VertexSet::new(),
            vol: T::zero(),
            cut: T::zero(),
        });
        let marker = match shape {
            Nested::Leaf(v) => {
                if *v >= g.n() {
                    return Err(Error::VertexOutOfRange(*v));
                }
                if self.leaf_of[*v].is_none() {
                    self.leaf_of[*v] = Some(id);
                }
                VertexSet::singleton(*v)
            }
            Nested::Node(children) => {
                let mut marker = VertexSet::new();
                for child in children {
                    let c = self.push(g, child, Some(id))?;
                    self.nodes[id].children.push(c);
                    marker = marker.union(&self.nodes[c].marker);
                }
                marker
            }
        };
        let node = &mut self.nodes[id];
        node.vol = g.volume_of(&marker);
        node.cut = g.boundary_weight(&marker);
        node.marker = marker;
        Ok(id)
    }

    /// Root with one leaf per vertex, in index order.
    pub fn star(g: &Graph<T>) -> Self {
        let shape = Nested::Node((0..g.n()).map(Nested::Leaf).collect());
        EncodingTree::from_nested(g, &shape).expect("star shape is well formed")
    }

    /// Canonical two-level tree of a partition.
    pub fn from_partition(g: &Graph<T>, parts: &[VertexSet]) -> Result<Self> {
        let n = g.n();
        let mut seen = vec![false; n];
        for part in parts {
            if part.is_empty() {
                return Err(Error::NotAPartition("empty part".into()));
            }
            for v in part.iter() {
                if v >= n {
                    return Err(Error::VertexOutOfRange(v));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::NotAPartition(format!("vertex {} in two parts", g.id(v))));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::NotAPartition(format!("vertex {} not covered", g.id(v))));
        }
        EncodingTree::from_nested(g, &Nested::two_level(parts))
    }

    pub fn root(&self) -> NodeId {
        ROOT
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode<T> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode<T>)> {
        self.nodes.iter().enumerate()
    }

    /// Number of vertices the tree was built against.
    pub fn vertex_count(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn leaf(&self, v: usize) -> Option<NodeId> {
        self.leaf_of.get(v).copied().flatten()
    }

    pub fn depth(&self, mut id: NodeId) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[id].parent {
            d += 1;
            id = p;
        }
        d
    }

    /// Height of the subtree under `id` (0 for a leaf).
    pub fn subtree_height(&self, id: NodeId) -> usize {
        self.nodes[id].children.iter().map(|&c| 1 + self.subtree_height(c)).max().unwrap_or(0)
    }

    pub fn height(&self) -> usize {
        self.subtree_height(ROOT)
    }

    pub fn path(&self, mut id: NodeId) -> NodePath {
        let mut rev = Vec::new();
        while let Some(p) = self.nodes[id].parent {
            let pos = self.nodes[p].children.iter().position(|&c| c == id).expect("child of parent");
            rev.push(pos);
            id = p;
        }
        rev.reverse();
        NodePath(rev)
    }

    pub fn node_at(&self, path: &NodePath) -> Option<NodeId> {
        let mut id = ROOT;
        for &i in &path.0 {
            id = *self.nodes.get(id)?.children.get(i)?;
        }
        Some(id)
    }

    /// Codeword of the leaf holding vertex `v`.
    pub fn codeword(&self, v: usize) -> Result<NodePath> {
        let leaf = self.leaf(v).ok_or(Error::VertexOutOfRange(v))?;
        Ok(self.path(leaf))
    }

    /// Nodes from `id` up to and including the root.
    pub fn ancestors(&self, id: NodeId) -> Vec<NodeId> {
        let mut chain = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(p);
            cur = p;
        }
        chain
    }

    /// Deepest node whose marker contains both nodes' markers.
    pub fn common_ancestor(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut a, mut b) = (a, b);
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        while da > db {
            a = self.nodes[a].parent.expect("non-root");
            da -= 1;
        }
        while db > da {
            b = self.nodes[b].parent.expect("non-root");
            db -= 1;
        }
        while a != b {
            a = self.nodes[a].parent.expect("non-root");
            b = self.nodes[b].parent.expect("non-root");
        }
        a
    }

    pub fn to_nested(&self, id: NodeId) -> Nested {
        let node = &self.nodes[id];
        if node.is_leaf() {
            Nested::Leaf(node.marker.first().expect("leaf marker is nonempty"))
        } else {
            Nested::Node(node.children.iter().map(|&c| self.to_nested(c)).collect())
        }
    }

    /// Internal nodes whose children are all leaves, plus depth-1 leaves:
    /// the modules of a two-level tree.
    pub fn modules(&self) -> Vec<VertexSet> {
        self.nodes[ROOT].children.iter().map(|&c| self.nodes[c].marker.clone()).collect()
    }

    /// Checks every structural rule and the cached statistics.
    pub fn validate(&self, g: &Graph<T>) -> std::result::Result<(), Violation> {
        let fail = |clause, id: NodeId, message: String| Violation { clause, path: self.path(id), message };
        if self.nodes.is_empty() {
            return Err(Violation {
                clause: Clause::Partition,
                path: NodePath::default(),
                message: "tree has no nodes".into(),
            });
        }
        if self.leaf_of.len() != g.n() {
            return Err(fail(Clause::Partition, ROOT, "tree built for a different vertex count".into()));
        }
        if self.nodes[ROOT].marker != VertexSet::full(g.n()) {
            let missing: Vec<&str> =
                (0..g.n()).filter(|&v| !self.nodes[ROOT].marker.contains(v)).map(|v| g.id(v)).collect();
            return Err(fail(Clause::Partition, ROOT, format!("root marker misses {missing:?}")));
        }
        let mut leaf_count = vec![0usize; g.n()];
        for (id, node) in self.nodes.iter().enumerate() {
            if node.is_leaf() {
                if node.marker.len() != 1 {
                    return Err(fail(Clause::Leaf, id, "leaf marker is not a singleton".into()));
                }
                leaf_count[node.marker.as_slice()[0]] += 1;
                continue;
            }
            if node.children.len() < 2 {
                return Err(fail(Clause::ChildCount, id, "internal node has a single child".into()));
            }
            let mut total = 0;
            let mut union = VertexSet::new();
            for &c in &node.children {
                total += self.nodes[c].marker.len();
                union = union.union(&self.nodes[c].marker);
            }
            if total != node.marker.len() || union != node.marker {
                return Err(fail(Clause::Partition, id, "children do not partition the marker".into()));
            }
        }
        if let Some(v) = leaf_count.iter().position(|&c| c != 1) {
            return Err(fail(
                Clause::Leaf,
                ROOT,
                format!("vertex {} appears in {} leaves", g.id(v), leaf_count[v]),
            ));
        }
        let tol = T::check_tol() * (T::one() + g.volume());
        for (id, node) in self.nodes.iter().enumerate() {
            let vol = g.volume_of(&node.marker);
            let cut = g.boundary_weight(&node.marker);
            if (vol - node.vol).abs() > tol || (cut - node.cut).abs() > tol {
                return Err(fail(
                    Clause::Stats,
                    id,
                    format!("cached (vol, cut) = ({}, {}), actual ({vol}, {cut})", node.vol, node.cut),
                ));
            }
        }
        Ok(())
    }

    /// Siblings share a parent.
    pub fn siblings(&self, a: NodeId, b: NodeId) -> bool {
        a != b && self.nodes[a].parent.is_some() && self.nodes[a].parent == self.nodes[b].parent
    }

    /// Fuses two siblings into one node holding the children of both (a leaf
    /// contributes itself).
    pub fn merge_apply(&self, g: &Graph<T>, a: NodeId, b: NodeId) -> Result<Self> {
        let parent = self.sibling_parent(a, b)?;
        let mut fused = Vec::new();
        for id in [a, b] {
            match self.to_nested(id) {
                Nested::Node(ch) => fused.extend(ch),
                leaf => fused.push(leaf),
            }
        }
        self.rebuild_replacing(g, parent, a, b, Nested::Node(fused))
    }

    /// Inserts a new node above siblings `a` and `b`; fails if the tree would
    /// exceed height `cap`.
    pub fn combine_apply(&self, g: &Graph<T>, a: NodeId, b: NodeId, cap: usize) -> Result<Self> {
        let parent = self.sibling_parent(a, b)?;
        let below = self.subtree_height(a).max(self.subtree_height(b));
        if self.depth(parent) + 2 + below > cap {
            return Err(Error::HeightCap { cap });
        }
        let grouped = Nested::Node(vec![self.to_nested(a), self.to_nested(b)]);
        self.rebuild_replacing(g, parent, a, b, grouped)
    }

    fn sibling_parent(&self, a: NodeId, b: NodeId) -> Result<NodeId> {
        if a >= self.nodes.len() || b >= self.nodes.len() || !self.siblings(a, b) {
            return Err(Error::NotSiblings);
        }
        let parent = self.nodes[a].parent.expect("siblings have a parent");
        if self.nodes[parent].children.len() < 3 {
            return Err(Error::InvalidTree(
                "grouping the only two children would duplicate their parent".into(),
            ));
        }
        Ok(parent)
    }

    fn rebuild_replacing(
        &self,
        g: &Graph<T>,
        parent: NodeId,
        a: NodeId,
        b: NodeId,
        replacement: Nested,
    ) -> Result<Self> {
        fn walk<T: Scalar>(
            t: &EncodingTree<T>,
            id: NodeId,
            parent: NodeId,
            a: NodeId,
            b: NodeId,
            replacement: &Nested,
        ) -> Nested {
            let node = &t.nodes[id];
            if node.is_leaf() {
                return Nested::Leaf(node.marker.as_slice()[0]);
            }
            let mut children = Vec::new();
            for &c in &node.children {
                if id == parent && c == a {
                    children.push(replacement.clone());
                } else if id == parent && c == b {
                    continue;
                } else {
                    children.push(walk(t, c, parent, a, b, replacement));
                }
            }
            Nested::Node(children)
        }
        EncodingTree::from_nested(g, &walk(self, ROOT, parent, a, b, &replacement))
    }

    /// Same shape with one more vertex `g.n() - 1` attached as a leaf child of
    /// `parent`; statistics are recomputed against the enlarged graph.
    pub fn with_leaf(&self, g: &Graph<T>, parent: NodeId) -> Result<Self> {
        let v = g.n() - 1;
        if self.leaf_of.len() + 1 != g.n() {
            return Err(Error::InvalidTree("graph must have exactly one extra vertex".into()));
        }
        if self.nodes[parent].is_leaf() {
            return Err(Error::InvalidTree("cannot attach a leaf below a leaf".into()));
        }
        fn walk<T: Scalar>(t: &EncodingTree<T>, id: NodeId, parent: NodeId, v: usize) -> Nested {
            let node = &t.nodes[id];
            if node.is_leaf() {
                return Nested::Leaf(node.marker.as_slice()[0]);
            }
            let mut children: Vec<Nested> = node.children.iter().map(|&c| walk(t, c, parent, v)).collect();
            if id == parent {
                children.push(Nested::Leaf(v));
            }
            Nested::Node(children)
        }
        EncodingTree::from_nested(g, &walk(self, ROOT, parent, v))
    }

    /// Serializes to the nested JSON document.
    pub fn to_document(&self, g: &Graph<T>) -> String {
        self.to_document_with(g, |_| None)
    }

    /// Like [`to_document`](Self::to_document) with an extra sorted token
    /// list per node.
    pub fn to_document_with(
        &self,
        g: &Graph<T>,
        features: impl Fn(NodeId) -> Option<Vec<String>>,
    ) -> String {
        let doc = self.doc_node(g, ROOT, &features);
        serde_json::to_string_pretty(&doc).expect("tree document serializes")
    }

    pub(crate) fn doc_node<'a>(
        &self,
        g: &'a Graph<T>,
        id: NodeId,
        features: &impl Fn(NodeId) -> Option<Vec<String>>,
    ) -> NodeOut<'a> {
        let node = &self.nodes[id];
        let (vertex, children) = if node.is_leaf() {
            (Some(g.id(node.marker.as_slice()[0])), None)
        } else {
            (None, Some(node.children.iter().map(|&c| self.doc_node(g, c, features)).collect()))
        };
        NodeOut {
            vertex,
            vol: raw9(node.vol.as_f64()),
            cut: raw9(node.cut.as_f64()),
            features: features(id),
            children,
        }
    }

    /// Parses a nested JSON document against `g`. Statistics in the document
    /// are ignored and recomputed; the result is validated.
    pub fn from_document(g: &Graph<T>, text: &str) -> Result<Self> {
        let doc: NodeIn = serde_json::from_str(text)?;
        let shape = doc.to_nested(g)?;
        let tree = EncodingTree::from_nested(g, &shape)?;
        tree.validate(g)?;
        Ok(tree)
    }

    #[cfg(test)]
    pub(crate) fn set_cached_stats(&mut self, id: NodeId, vol: T, cut: T) {
        self.nodes[id].vol = vol;
        self.nodes[id].cut = cut;
    }
}

#[derive(Serialize)]
pub(crate) struct NodeOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    vertex: Option<&'a str>,
    vol: Box<RawValue>,
    cut: Box<RawValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    features: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    children: Option<Vec<NodeOut<'a>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NodeIn {
    Leaf { vertex: String },
    Internal { children: Vec<NodeIn> },
}

impl NodeIn {
    fn to_nested<T: Scalar>(&self, g: &Graph<T>) -> Result<Nested> {
        match self {
            NodeIn::Leaf { vertex } => g
                .index_of(vertex)
                .map(Nested::Leaf)
                .ok_or_else(|| Error::UnknownVertex(vertex.clone())),
            NodeIn::Internal { children } => {
                Ok(Nested::Node(children.iter().map(|c| c.to_nested(g)).collect::<Result<_>>()?))
            }
        }
    }
}

/// Free-function form of [`EncodingTree::star`].
pub fn star_tree<T: Scalar>(g: &Graph<T>) -> EncodingTree<T> {
    EncodingTree::star(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn set(vs: &[usize]) -> VertexSet {
        vs.iter().copied().collect()
    }

    fn barbell_split() -> EncodingTree {
        EncodingTree::from_partition(&barbell(), &[set(&[0, 1, 2]), set(&[3, 4, 5])]).unwrap()
    }

    #[test]
    fn star_shape_and_stats() {
        let t = EncodingTree::star(&complete(4));
        assert_eq!(t.height(), 1);
        assert_eq!(t.node(ROOT).children().len(), 4);
        assert!(t.validate(&complete(4)).is_ok());

        let g = path3();
        let t = EncodingTree::star(&g);
        for v in 0..3 {
            let leaf = t.node(t.leaf(v).unwrap());
            assert_eq!((leaf.vol(), leaf.cut()), (g.degree(v), g.degree(v)));
        }

        let g = barbell();
        let t = EncodingTree::star(&g);
        let total: f64 = t.node(ROOT).children().iter().map(|&c| t.node(c).vol()).sum();
        assert_eq!(total, 14.0);
    }

    #[test]
    fn barbell_partition_tree() {
        let t = barbell_split();
        assert_eq!(t.height(), 2);
        for &m in t.node(ROOT).children() {
            assert_eq!((t.node(m).vol(), t.node(m).cut()), (7.0, 1.0));
        }
        assert_eq!(t.modules(), vec![set(&[0, 1, 2]), set(&[3, 4, 5])]);
    }

    #[test]
    fn singleton_parts_collapse_to_star() {
        let g = complete(4);
        let parts: Vec<VertexSet> = (0..4).map(VertexSet::singleton).collect();
        assert_eq!(EncodingTree::from_partition(&g, &parts).unwrap(), EncodingTree::star(&g));
        // one part covering everything is the star as well
        assert_eq!(EncodingTree::from_partition(&g, &[VertexSet::full(4)]).unwrap(), EncodingTree::star(&g));
    }

    #[test]
    fn partition_errors() {
        let g = complete(4);
        assert!(matches!(
            EncodingTree::from_partition(&g, &[set(&[0, 1]), set(&[1, 2, 3])]),
            Err(Error::NotAPartition(_))
        ));
        assert!(matches!(
            EncodingTree::from_partition(&g, &[set(&[0, 1]), set(&[2])]),
            Err(Error::NotAPartition(_))
        ));
        assert!(EncodingTree::from_partition(&g, &[set(&[0, 1]), VertexSet::new(), set(&[2, 3])]).is_err());
    }

    #[test]
    fn children_ordered_by_smallest_vertex() {
        let g = barbell();
        let parts = [set(&[5, 4]), set(&[1, 3]), set(&[0, 2])];
        let t = EncodingTree::from_partition(&g, &parts).unwrap();
        let mins: Vec<usize> = t.node(ROOT).children().iter().map(|&c| t.node(c).marker().first().unwrap()).collect();
        assert_eq!(mins, vec![0, 1, 4]);
    }

    #[test]
    fn validation_reports() {
        let g = complete(4);
        let missing = EncodingTree::from_nested(&g, &Nested::Node(vec![Nested::Leaf(0), Nested::Leaf(1), Nested::Leaf(2)])).unwrap();
        let v = missing.validate(&g).unwrap_err();
        assert_eq!(v.clause, Clause::Partition);
        assert_eq!(v.path, NodePath(vec![]));

        let mut stale = EncodingTree::star(&g);
        stale.set_cached_stats(2, 3.0, 2.5);
        let v = stale.validate(&g).unwrap_err();
        assert_eq!(v.clause, Clause::Stats);
        assert_eq!(v.path, NodePath(vec![1]));

        let dup = EncodingTree::from_nested(
            &g,
            &Nested::Node(vec![
                Nested::Node(vec![Nested::Leaf(0), Nested::Leaf(1)]),
                Nested::Node(vec![Nested::Leaf(1), Nested::Leaf(2), Nested::Leaf(3)]),
            ]),
        )
        .unwrap();
        assert_eq!(dup.validate(&g).unwrap_err().clause, Clause::Partition);

        let lonely = EncodingTree::from_nested(
            &g,
            &Nested::Node(vec![
                Nested::Node(vec![Nested::Leaf(0)]),
                Nested::Leaf(1),
                Nested::Leaf(2),
                Nested::Leaf(3),
            ]),
        )
        .unwrap();
        assert_eq!(lonely.validate(&g).unwrap_err().clause, Clause::ChildCount);
    }

    #[test]
    fn codewords() {
        let t = EncodingTree::star(&complete(4));
        assert_eq!(t.codeword(2).unwrap(), NodePath(vec![2]));
        let t = barbell_split();
        assert_eq!(t.codeword(4).unwrap(), NodePath(vec![1, 1]));
        let g = barbell();
        let t = EncodingTree::from_partition(&g, &[set(&[0, 1, 2]), set(&[3]), set(&[4, 5])]).unwrap();
        assert_eq!(t.codeword(3).unwrap(), NodePath(vec![1]));
        assert!(t.codeword(6).is_err());
        for v in 0..6 {
            let p = t.codeword(v).unwrap();
            assert_eq!(t.node_at(&p), t.leaf(v));
        }
    }

    #[test]
    fn markers_nest_and_volumes_add() {
        let g = barbell();
        let t = EncodingTree::from_nested(
            &g,
            &Nested::Node(vec![
                Nested::Node(vec![Nested::Node(vec![Nested::Leaf(0), Nested::Leaf(1)]), Nested::Leaf(2)]),
                Nested::Node(vec![Nested::Leaf(3), Nested::Leaf(4), Nested::Leaf(5)]),
            ]),
        )
        .unwrap();
        t.validate(&g).unwrap();
        for (id, node) in t.nodes() {
            if let Some(p) = node.parent() {
                assert!(node.marker().len() < t.node(p).marker().len());
                assert!(node.marker().iter().all(|v| t.node(p).marker().contains(v)));
            }
            if !node.is_leaf() {
                let sum: f64 = node.children().iter().map(|&c| t.node(c).vol()).sum();
                assert!((sum - node.vol()).abs() < 1e-12, "node {id}");
            }
        }
    }

    #[test]
    fn combine_and_merge() {
        let g = complete(4);
        let star = EncodingTree::star(&g);
        let t = star.combine_apply(&g, 1, 2, 2).unwrap();
        assert_eq!(t.height(), 2);
        assert_eq!(t.modules(), vec![set(&[0, 1]), set(&[2]), set(&[3])]);
        t.validate(&g).unwrap();

        // chain of combines: {0,1} then {{0,1},2}
        let module = t.node(ROOT).children()[0];
        let leaf2 = t.node(ROOT).children()[1];
        let deep = t.combine_apply(&g, module, leaf2, 3).unwrap();
        assert_eq!(deep.height(), 3);
        deep.validate(&g).unwrap();
        assert!(matches!(t.combine_apply(&g, module, leaf2, 2), Err(Error::HeightCap { cap: 2 })));

        let merged = t.merge_apply(&g, module, leaf2).unwrap();
        assert_eq!(merged.modules(), vec![set(&[0, 1, 2]), set(&[3])]);
        assert_eq!(merged.height(), 2);

        let inner = t.node(module).children()[0];
        assert!(matches!(t.merge_apply(&g, inner, leaf2), Err(Error::NotSiblings)));
    }

    #[test]
    fn document_round_trip() {
        let g = complete(4);
        let t = EncodingTree::star(&g);
        let doc = t.to_document(&g);
        assert!(doc.contains("\"vol\": 3.000000000"));
        assert_eq!(EncodingTree::from_document(&g, &doc).unwrap(), t);

        let g = barbell();
        let t = barbell_split();
        assert_eq!(EncodingTree::from_document(&g, &t.to_document(&g)).unwrap(), t);
    }

    #[test]
    fn document_errors() {
        let g = complete(3);
        let doc = r#"{"children":[{"vertex":"0"},{"vertex":"1"},{"vertex":"z"}]}"#;
        assert!(matches!(EncodingTree::from_document(&g, doc), Err(Error::UnknownVertex(_))));
        assert!(matches!(EncodingTree::from_document(&g, "{\"kids\": []}"), Err(Error::Document(_))));
        let short = r#"{"children":[{"vertex":"0"},{"vertex":"1"}]}"#;
        assert!(matches!(EncodingTree::from_document(&g, short), Err(Error::InvalidTree(_))));
    }

    #[test]
    fn hand_written_barbell_document() {
        let g = barbell();
        let doc = r#"{"children": [
            {"children": [{"vertex": "0"}, {"vertex": "1"}, {"vertex": "2"}]},
            {"children": [{"vertex": "5"}, {"vertex": "3"}, {"vertex": "4"}]}
        ]}"#;
        assert_eq!(EncodingTree::from_document(&g, doc).unwrap(), barbell_split());
    }
}
