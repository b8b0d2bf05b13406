use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::catalog::{AbstractionMode, FeatureCatalog, FeatureEntry, TokenSet};
use super::knowledge::{knowledge_tree, AbstractionTree, Choice, KnowledgeTree};
use crate::entropy::entropy_of;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::optimize::{decoding_info_k, minimize_kd};
use crate::scalar::Scalar;
use crate::similarity::{topk_from_ranked, SimilarityMatrix};
use crate::tree::{EncodingTree, NodeId, NodePath, ROOT};

/// A graph over the data points together with its decoder and the trees
/// derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSpace<T: Scalar = f64> {
    graph: Graph<T>,
    decoder: EncodingTree<T>,
    knowledge: KnowledgeTree<T>,
    abstractions: AbstractionTree,
    catalog: FeatureCatalog,
    construction_k: usize,
    height: usize,
    mode: AbstractionMode,
}

/// One row of a parameter sweep: the parameter and the decoding
/// information it reaches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T: Scalar = f64> {
    pub k: usize,
    pub decoding: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction<T: Scalar = f64> {
    pub space: DataSpace<T>,
    /// Every connected κ that was evaluated, ascending.
    pub sweep: Vec<SweepRow<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Insertion<T: Scalar = f64> {
    pub space: DataSpace<T>,
    pub choice: Choice,
    /// Features of the chosen abstraction.
    pub abstraction: TokenSet,
    /// Decoder node the point was first attached to (path in the old decoder).
    pub target: NodePath,
    pub sweep: Vec<SweepRow<T>>,
    pub k: usize,
    /// Parent of the new leaf in the updated decoder.
    pub module: NodePath,
    pub entropy_before: T,
    pub entropy_after: T,
}

fn argmax<T: Scalar>(rows: &[SweepRow<T>]) -> Option<SweepRow<T>> {
    let mut best: Option<SweepRow<T>> = None;
    for &row in rows {
        if best.map_or(true, |b| row.decoding > b.decoding + T::move_tol()) {
            best = Some(row);
        }
    }
    best
}

/// Sweeps the number of retained heaviest pairs from the smallest connected
/// value up to all positive pairs and keeps the graph with the largest
/// height-`height` decoding information (smallest κ on ties).
pub fn build_data_space<T: Scalar>(
    sim: &SimilarityMatrix<T>,
    catalog: &FeatureCatalog,
    height: usize,
    mode: AbstractionMode,
) -> Result<Construction<T>> {
    if height < 2 {
        return Err(Error::Argument(format!("height must be at least 2, got {height}")));
    }
    catalog.covers(sim.ids())?;
    let ranked = sim.ranked_pairs();
    let start = sim
        .min_connected_k()
        .ok_or(Error::NoConnectedGraph)?;
    let mut sweep = Vec::new();
    for k in start..=ranked.len() {
        let g = topk_from_ranked(sim.ids(), &ranked, k)?;
        sweep.push(SweepRow { k, decoding: decoding_info_k(&g, height)? });
    }
    let best = argmax(&sweep).expect("sweep is nonempty");
    let graph = topk_from_ranked(sim.ids(), &ranked, best.k)?;
    let decoder = minimize_kd(&graph, height)?.tree;
    let space = DataSpace::assemble(graph, decoder, catalog.clone(), best.k, height, mode)?;
    Ok(Construction { space, sweep })
}

impl<T: Scalar> DataSpace<T> {
    /// Derives the knowledge and abstraction trees for a given decoder.
    pub fn assemble(
        graph: Graph<T>,
        decoder: EncodingTree<T>,
        catalog: FeatureCatalog,
        construction_k: usize,
        height: usize,
        mode: AbstractionMode,
    ) -> Result<Self> {
        decoder.validate(&graph)?;
        if decoder.height() > height {
            return Err(Error::HeightCap { cap: height });
        }
        let knowledge = knowledge_tree(&graph, &decoder, &catalog)?;
        let abstractions = abstraction_tree_for(&graph, &decoder, &catalog, mode)?;
        Ok(Self { graph, decoder, knowledge, abstractions, catalog, construction_k, height, mode })
    }

    pub fn graph(&self) -> &Graph<T> {
        &self.graph
    }

    pub fn decoder(&self) -> &EncodingTree<T> {
        &self.decoder
    }

    pub fn knowledge(&self) -> &KnowledgeTree<T> {
        &self.knowledge
    }

    pub fn abstractions(&self) -> &AbstractionTree {
        &self.abstractions
    }

    pub fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    pub fn construction_k(&self) -> usize {
        self.construction_k
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mode(&self) -> AbstractionMode {
        self.mode
    }

    pub fn entropy(&self) -> T {
        entropy_of(&self.graph, &self.decoder)
    }

    fn vertex(&self, id: &str) -> Result<usize> {
        self.graph.index_of(id).ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    /// Knowledge chain of `id` from its own features up to the root's.
    pub fn flow_of_abstractions(&self, id: &str) -> Result<Vec<TokenSet>> {
        self.knowledge.flow(self.vertex(id)?)
    }

    pub fn least_common_abstraction(&self, u: &str, v: &str) -> Result<TokenSet> {
        self.knowledge.least_common(self.vertex(u)?, self.vertex(v)?)
    }

    pub fn choose_abstraction(&self, features: &TokenSet) -> Choice {
        self.abstractions.choose(features)
    }

    /// Adds a new data point.
    ///
    /// The point's features select an abstraction and with it a decoder
    /// node; the number of attachment edges (heaviest similarities first) is
    /// swept with the point hung below that node, and the point is finally
    /// placed under whichever nearby internal node gives the lowest entropy.
    /// Existing vertices keep their places.
    pub fn insert_point(&self, id: &str, sims: &BTreeMap<String, T>, entry: FeatureEntry) -> Result<Insertion<T>> {
        if self.graph.index_of(id).is_some() {
            return Err(Error::DuplicateId(id.to_owned()));
        }
        let mut attach: Vec<(usize, T)> = Vec::new();
        for (other, &w) in sims {
            let v = self.vertex(other)?;
            if !w.is_finite() || w < T::zero() {
                return Err(Error::InvalidPoint(format!("similarity to {other:?} is {w}")));
            }
            if w > T::zero() {
                attach.push((v, w));
            }
        }
        if attach.is_empty() {
            return Err(Error::InvalidPoint("no positive similarity".into()));
        }
        attach.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite").then(a.0.cmp(&b.0)));

        let choice = self.abstractions.choose(&entry.features(self.mode));
        let mut target = self.abstractions.node(choice.node).source();
        if self.decoder.node(target).is_leaf() {
            target = self.decoder.node(target).parent().expect("leaf has a parent");
        }

        let x = self.graph.n();
        let mut ids = self.graph.ids().to_vec();
        ids.push(id.to_owned());
        let grown = |k: usize| {
            let mut edges = self.graph.edges().to_vec();
            edges.extend(attach[..k].iter().map(|&(v, w)| (v, x, w)));
            Graph::new(ids.clone(), edges)
        };
        let mut sweep = Vec::new();
        for k in 1..=attach.len() {
            let g = grown(k)?;
            let t = self.decoder.with_leaf(&g, target)?;
            sweep.push(SweepRow { k, decoding: g.one_dim_entropy() - entropy_of(&g, &t) });
        }
        let k = argmax(&sweep).expect("sweep is nonempty").k;
        let graph = grown(k)?;

        let mut best: Option<(T, EncodingTree<T>)> = None;
        for parent in self.placements(target, choice.fallback) {
            let t = self.decoder.with_leaf(&graph, parent)?;
            let h = entropy_of(&graph, &t);
            if best.as_ref().map_or(true, |(b, _)| h < *b - T::move_tol()) {
                best = Some((h, t));
            }
        }
        let (entropy_after, decoder) = best.expect("the target itself is a placement");
        let leaf = decoder.leaf(x).expect("new vertex has a leaf");
        let module = decoder.path(decoder.node(leaf).parent().expect("leaf has a parent"));

        let mut catalog = self.catalog.clone();
        catalog.insert(id, entry);
        let space = DataSpace::assemble(graph, decoder, catalog, self.construction_k, self.height, self.mode)?;
        Ok(Insertion {
            abstraction: self.abstractions.node(choice.node).features().clone(),
            space,
            choice,
            target: self.decoder.path(target),
            sweep,
            k,
            module,
            entropy_before: self.entropy(),
            entropy_after,
        })
    }

    /// Internal nodes a new leaf may hang from: the target's subtree, its
    /// internal siblings and its parent; every internal node after a
    /// fallback to the root.
    fn placements(&self, target: NodeId, fallback: bool) -> Vec<NodeId> {
        let t = &self.decoder;
        let internal = |id: NodeId| !t.node(id).is_leaf();
        let mut out: Vec<NodeId> = if fallback || target == ROOT {
            t.nodes().map(|(id, _)| id).filter(|&id| internal(id)).collect()
        } else {
            let mut out = Vec::new();
            let mut stack = vec![target];
            while let Some(id) = stack.pop() {
                if internal(id) {
                    out.push(id);
                    stack.extend(t.node(id).children());
                }
            }
            let parent = t.node(target).parent().expect("target is not the root");
            out.push(parent);
            out.extend(t.node(parent).children().iter().copied().filter(|&s| s != target && internal(s)));
            out
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            height: usize,
            kappa: usize,
            mode: AbstractionMode,
            vertices: &'a [String],
            edges: Vec<(&'a str, &'a str, f64)>,
            features: &'a FeatureCatalog,
            decoder: crate::tree::NodeOut<'a>,
        }
        let g = &self.graph;
        let out = Out {
            height: self.height,
            kappa: self.construction_k,
            mode: self.mode,
            vertices: g.ids(),
            edges: g.edges().iter().map(|&(u, v, w)| (g.id(u), g.id(v), w.as_f64())).collect(),
            features: &self.catalog,
            decoder: self.decoder.doc_node(g, ROOT, &|_| None),
        };
        serde_json::to_string_pretty(&out).expect("space serializes")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct In {
            height: usize,
            kappa: usize,
            #[serde(default)]
            mode: AbstractionMode,
            vertices: Vec<String>,
            edges: Vec<(String, String, f64)>,
            features: FeatureCatalog,
            decoder: Box<RawValue>,
        }
        let doc: In = serde_json::from_str(text)?;
        let index: BTreeMap<&str, usize> = doc.vertices.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != doc.vertices.len() {
            return Err(Error::Document("duplicate vertex ids".into()));
        }
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownVertex(s.to_owned()));
        let edges = doc
            .edges
            .iter()
            .map(|(u, v, w)| Ok((lookup(u)?, lookup(v)?, T::of(*w))))
            .collect::<Result<Vec<_>>>()?;
        let graph = Graph::new(doc.vertices.clone(), edges)?;
        let decoder = EncodingTree::from_document(&graph, doc.decoder.get())?;
        DataSpace::assemble(graph, decoder, doc.features, doc.kappa, doc.height, doc.mode)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_json(&std::fs::read_to_string(path)?)
    }
}

/// Tree of abstractions of `tree` using the tokens selected by `mode`.
pub fn abstraction_tree_for<T: Scalar>(
    g: &Graph<T>,
    tree: &EncodingTree<T>,
    catalog: &FeatureCatalog,
    mode: AbstractionMode,
) -> Result<AbstractionTree> {
    let kt = KnowledgeTree::from_sets(tree, &catalog.sets_for(g.ids(), mode)?)?;
    Ok(AbstractionTree::from_knowledge(&kt))
}

/// A new data point: its id, similarities to existing vertices and its
/// features.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRequest {
    pub id: String,
    pub sims: BTreeMap<String, f64>,
    #[serde(default)]
    pub syntax: TokenSet,
    #[serde(default)]
    pub semantics: TokenSet,
}

impl PointRequest {
    pub fn parse_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_json(&std::fs::read_to_string(path)?)
    }

    pub fn entry(&self) -> FeatureEntry {
        FeatureEntry { syntax: self.syntax.clone(), semantics: self.semantics.clone() }
    }

    /// Inserts this point into `space`.
    pub fn insert_into<T: Scalar>(&self, space: &DataSpace<T>) -> Result<Insertion<T>> {
        let sims = self.sims.iter().map(|(k, &w)| (k.clone(), T::of(w))).collect();
        space.insert_point(&self.id, &sims, self.entry())
    }
}
