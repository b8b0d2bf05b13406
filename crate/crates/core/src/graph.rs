//! Weighted undirected graphs and the cut, volume and conductance arithmetic
//! everything else is built on.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{xlog2x, Scalar};

/// Default ceiling on `n` for exhaustive conductance.
pub const CONDUCTANCE_ENUMERATION_LIMIT: usize = 24;

/// A set of vertices, kept as strictly increasing dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn singleton(v: usize) -> Self {
        Self(vec![v])
    }

    /// The set `0..n`.
    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn from_sorted_unchecked(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self(members)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn insert(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    /// Smallest member, used as the canonical ordering key of tree children.
    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        VertexSet(out)
    }

    /// Dense membership mask of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for v in self.iter() {
            mask[v] = true;
        }
        mask
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

/// A finite probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T: Scalar = f64>(Vec<T>);

impl<T: Scalar> Distribution<T> {
    pub fn new(probabilities: Vec<T>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(**p >= T::zero()) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("entry {p} is negative or not finite")));
        }
        let total: T = probabilities.iter().copied().sum();
        if (total - T::one()).abs() > T::check_tol() {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self(probabilities))
    }

    pub fn probabilities(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `-Σ p log2 p`.
pub fn shannon_entropy<T: Scalar>(p: &Distribution<T>) -> T {
    -p.0.iter().map(|&x| xlog2x(x)).sum::<T>()
}

/// Weighted undirected connected graph with dense vertex indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<T: Scalar = f64> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize, T)>,
    adjacency: Vec<Vec<(usize, T)>>,
    degree: Vec<T>,
    volume: T,
}

impl<T: Scalar> Graph<T> {
    /// Builds a graph from external ids and index-based edges, checking every
    /// structural invariant.
    pub fn new(ids: Vec<String>, edges: Vec<(usize, usize, T)>) -> Result<Self> {
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        if n < 2 || edges.is_empty() {
            return Err(Error::TooSmall);
        }
        let mut adjacency: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v, w) in &edges {
            if u >= n {
                return Err(Error::VertexOutOfRange(u));
            }
            if v >= n {
                return Err(Error::VertexOutOfRange(v));
            }
            if u == v {
                return Err(Error::SelfLoop(ids[u].clone()));
            }
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::NonPositiveWeight(ids[u].clone(), ids[v].clone(), w.as_f64()));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            normalized.push((a, b, w));
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        normalized.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        if let Some(dup) = normalized.windows(2).find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(Error::DuplicateEdge(ids[dup[0].0].clone(), ids[dup[0].1].clone()));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        let degree: Vec<T> = adjacency.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect();
        let volume = degree.iter().copied().sum();
        let graph = Graph { ids, index, edges: normalized, adjacency, degree, volume };
        let components = graph.component_count();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(graph)
    }

    /// Builds a graph from `(u, v, w)` triples over string ids; vertices are
    /// indexed in order of first appearance.
    pub fn from_named_edges<S: AsRef<str>>(edges: &[(S, S, T)]) -> Result<Self> {
        let mut ids: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |name: &str| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                ids.push(name.to_string());
                ids.len() - 1
            })
        };
        let indexed: Vec<_> =
            edges.iter().map(|(u, v, w)| (intern(u.as_ref()), intern(v.as_ref()), *w)).collect();
        Graph::new(ids, indexed)
    }

    /// Parses the edge-list format: `u v [weight]` per line, `#` comments.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut triples: Vec<(String, String, T)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
            let weight = match fields.len() {
                2 => T::one(),
                3 => {
                    let w: f64 = fields[2]
                        .parse()
                        .map_err(|_| parse_err(format!("bad weight {:?}", fields[2])))?;
                    T::of(w)
                }
                k => return Err(parse_err(format!("expected 2 or 3 fields, found {k}"))),
            };
            triples.push((fields[0].to_string(), fields[1].to_string(), weight));
        }
        Graph::from_named_edges(&triples)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Graph::parse_edge_list(&text)
    }

    /// Renders the graph back to the edge-list format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v, w) in &self.edges {
            let _ = writeln!(out, "{}\t{}\t{}", self.ids[u], self.ids[v], w.as_f64());
        }
        out
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, T)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> T {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[T] {
        &self.degree
    }

    pub fn volume(&self) -> T {
        self.volume
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<T> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| list[i].1)
    }

    pub fn volume_of(&self, s: &VertexSet) -> T {
        s.iter().map(|v| self.degree[v]).sum()
    }

    /// Total weight of edges with exactly one endpoint in `s`; unchecked
    /// version accepting empty or full sets.
    pub fn boundary_weight(&self, s: &VertexSet) -> T {
        let mut total = T::zero();
        for v in s.iter() {
            for &(u, w) in &self.adjacency[v] {
                if !s.contains(u) {
                    total += w;
                }
            }
        }
        total
    }

    /// Total weight of edges between two disjoint sets.
    pub fn cross_weight(&self, a: &VertexSet, b: &VertexSet) -> T {
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let mut total = T::zero();
        for v in small.iter() {
            for &(u, w) in &self.adjacency[v] {
                if large.contains(u) {
                    total += w;
                }
            }
        }
        total
    }

    fn check_proper(&self, s: &VertexSet) -> Result<()> {
        if let Some(&bad) = s.as_slice().iter().find(|&&v| v >= self.n()) {
            return Err(Error::VertexOutOfRange(bad));
        }
        if s.is_empty() || s.len() == self.n() {
            return Err(Error::ImproperSubset);
        }
        Ok(())
    }

    pub fn cut_weight(&self, s: &VertexSet) -> Result<T> {
        self.check_proper(s)?;
        Ok(self.boundary_weight(s))
    }

    pub fn conductance_subset(&self, s: &VertexSet) -> Result<T> {
        self.check_proper(s)?;
        let cut = self.boundary_weight(s);
        let vol = self.volume_of(s);
        Ok(cut / vol.min(self.volume - vol))
    }

    /// Exact conductance with the default enumeration limit.
    pub fn conductance_exact(&self) -> Result<(T, VertexSet)> {
        self.conductance_exact_with_limit(CONDUCTANCE_ENUMERATION_LIMIT)
    }

    /// Minimum conductance over all nonempty proper subsets, with the
    /// lexicographically smallest minimizing membership vector.
    ///
    /// Subsets are walked in Gray-code order so each step touches one vertex.
    pub fn conductance_exact_with_limit(&self, limit: usize) -> Result<(T, VertexSet)> {
        let n = self.n();
        if n > limit || n >= 63 {
            return Err(Error::SizeGuard { what: "exact conductance", limit, n });
        }
        let mut in_set = vec![false; n];
        let mut cut = T::zero();
        let mut vol = T::zero();
        let mut best: Option<(T, u64)> = None;
        let tol = T::move_tol();
        // Key that orders masks like membership vectors with vertex 0 first.
        let lex_key = |mask: u64| mask.reverse_bits() >> (64 - n);
        for step in 1u64..(1u64 << n) {
            let flip = step.trailing_zeros() as usize;
            let entering = !in_set[flip];
            for &(u, w) in &self.adjacency[flip] {
                if in_set[u] == entering {
                    cut -= w;
                } else {
                    cut += w;
                }
            }
            in_set[flip] = entering;
            if entering {
                vol += self.degree[flip];
            } else {
                vol -= self.degree[flip];
            }
            let mask = step ^ (step >> 1);
            if mask == (1u64 << n) - 1 {
                continue;
            }
            let phi = cut / vol.min(self.volume - vol);
            best = match best {
                None => Some((phi, mask)),
                Some((b, _)) if phi < b - tol => Some((phi, mask)),
                Some((b, m)) if (phi - b).abs() <= tol && lex_key(mask) < lex_key(m) => {
                    Some((phi.min(b), mask))
                }
                keep => keep,
            };
        }
        let (_, mask) = best.expect("n >= 2 yields at least one proper subset");
        let set: VertexSet = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        // recompute directly so the value carries no accumulated rounding
        let phi = self.conductance_subset(&set)?;
        Ok((phi, set))
    }

    /// Shannon entropy of the stationary distribution `d_v / vol(G)`.
    pub fn one_dim_entropy(&self) -> T {
        let vol = self.volume;
        -self.degree.iter().map(|&d| xlog2x(d / vol)).sum::<T>()
    }

    pub fn degree_distribution(&self) -> Distribution<T> {
        Distribution(self.degree.iter().map(|&d| d / self.volume).collect())
    }

    fn component_count(&self) -> usize {
        component_count(self.n(), self.edges.iter().map(|&(u, v, _)| (u, v)))
    }
}

/// Number of connected components of the graph on `0..n` with the given edges.
pub fn component_count(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for (u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru.max(rv)] = ru.min(rv);
            components -= 1;
        }
    }
    components
}
