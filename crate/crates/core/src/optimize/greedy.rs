//! Greedy merge/combine search over encoding trees.

use std::collections::BTreeMap;

use crate::entropy::entropy_of;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::scalar::Scalar;
use crate::tree::{EncodingTree, NodeId, NodePath, ROOT};

use super::{Move, MoveKind, OptimizeResult};

/// `-(cut/vol)·log2(V/V_parent)`, the contribution of one node.
#[inline]
fn node_term<T: Scalar>(cut: T, v: T, v_parent: T, vol: T) -> T {
    -(cut / vol) * (v / v_parent).log2()
}

/// Statistics of one side of a candidate move.
#[derive(Debug, Clone, Copy)]
struct Side<T> {
    vol: T,
    cut: T,
    /// Sum of the children's cuts, or the node's own cut for a leaf.
    below: T,
}

fn merge_gain<T: Scalar>(a: Side<T>, b: Side<T>, cross: T, v_parent: T, vol: T) -> T {
    let v = a.vol + b.vol;
    let cut = a.cut + b.cut - (cross + cross);
    node_term(a.cut, a.vol, v_parent, vol) + node_term(b.cut, b.vol, v_parent, vol)
        - node_term(cut, v, v_parent, vol)
        - (a.below / vol) * (v / a.vol).log2()
        - (b.below / vol) * (v / b.vol).log2()
}

fn combine_gain<T: Scalar>(a: Side<T>, b: Side<T>, cross: T, v_parent: T, vol: T) -> T {
    let v = a.vol + b.vol;
    let cut = a.cut + b.cut - (cross + cross);
    node_term(a.cut, a.vol, v_parent, vol) + node_term(b.cut, b.vol, v_parent, vol)
        - node_term(cut, v, v_parent, vol)
        - node_term(a.cut, a.vol, v, vol)
        - node_term(b.cut, b.vol, v, vol)
}

fn side<T: Scalar>(t: &EncodingTree<T>, id: NodeId) -> Side<T> {
    let node = t.node(id);
    let below = if node.is_leaf() {
        node.cut()
    } else {
        node.children().iter().map(|&c| t.node(c).cut()).sum()
    };
    Side { vol: node.vol(), cut: node.cut(), below }
}

fn check_siblings<T: Scalar>(t: &EncodingTree<T>, a: NodeId, b: NodeId) -> Result<NodeId> {
    if a >= t.len() || b >= t.len() || !t.siblings(a, b) {
        return Err(Error::NotSiblings);
    }
    Ok(t.node(a).parent().expect("siblings have a parent"))
}

/// Entropy decrease from fusing siblings `a` and `b`, computed from local
/// statistics only.
pub fn merge_delta<T: Scalar>(g: &Graph<T>, t: &EncodingTree<T>, a: NodeId, b: NodeId) -> Result<T> {
    let parent = check_siblings(t, a, b)?;
    let cross = g.cross_weight(t.node(a).marker(), t.node(b).marker());
    Ok(merge_gain(side(t, a), side(t, b), cross, t.node(parent).vol(), g.volume()))
}

/// Entropy decrease from inserting a common parent above siblings `a`, `b`.
pub fn combine_delta<T: Scalar>(g: &Graph<T>, t: &EncodingTree<T>, a: NodeId, b: NodeId) -> Result<T> {
    let parent = check_siblings(t, a, b)?;
    let cross = g.cross_weight(t.node(a).marker(), t.node(b).marker());
    Ok(combine_gain(side(t, a), side(t, b), cross, t.node(parent).vol(), g.volume()))
}

#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    key: (usize, usize),
    kind: MoveKind,
    delta: T,
    a: NodeId,
    b: NodeId,
}

/// Largest delta wins; candidates within tolerance of it tie and the
/// smallest `(min vertex a, min vertex b)`, then merge before combine, wins.
fn select<T: Scalar>(candidates: &[Candidate<T>]) -> Option<Candidate<T>> {
    let tol = T::move_tol();
    let best = candidates.iter().map(|c| c.delta).fold(T::neg_infinity(), T::max);
    if !(best > tol) {
        return None;
    }
    candidates
        .iter()
        .filter(|c| c.delta >= best - tol)
        .min_by_key(|c| (c.key, c.kind))
        .copied()
}

/// Greedy two-level minimization from the star tree.
///
/// Modules are tracked with their volume, cut and the cross weights to
/// adjacent modules, so a merge costs time proportional to the adjacency of
/// the two modules involved.
pub fn minimize_2d<T: Scalar>(g: &Graph<T>) -> Result<OptimizeResult<T>> {
    let n = g.n();
    let vol = g.volume();
    // module id = smallest member
    let mut members: Vec<Option<VertexSet>> = (0..n).map(|v| Some(VertexSet::singleton(v))).collect();
    let mut mod_vol: Vec<T> = g.degrees().to_vec();
    let mut mod_cut: Vec<T> = g.degrees().to_vec();
    let mut cross: Vec<BTreeMap<usize, T>> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&(u, w)| (u, w)).collect())
        .collect();
    let mut alive = n;
    let mut trace = Vec::new();

    while alive > 2 {
        let mut candidates = Vec::new();
        for a in 0..n {
            if members[a].is_none() {
                continue;
            }
            let sa = Side { vol: mod_vol[a], cut: mod_cut[a], below: mod_vol[a] };
            for (&b, &w) in cross[a].range(a + 1..) {
                if !(w > T::zero()) {
                    continue;
                }
                let sb = Side { vol: mod_vol[b], cut: mod_cut[b], below: mod_vol[b] };
                let delta = merge_gain(sa, sb, w, vol, vol);
                candidates.push(Candidate { key: (a, b), kind: MoveKind::Merge, delta, a, b });
            }
        }
        let Some(best) = select(&candidates) else { break };
        let (a, b) = (best.a, best.b);
        let rank = |m: usize| members[..m].iter().filter(|x| x.is_some()).count();
        trace.push(Move { kind: MoveKind::Merge, a: NodePath(vec![rank(a)]), b: NodePath(vec![rank(b)]), delta: best.delta });

        let w_ab = cross[a].remove(&b).unwrap_or_else(T::zero);
        let row_b = std::mem::take(&mut cross[b]);
        for (c, w) in row_b {
            if c == a {
                continue;
            }
            let back = cross[c].remove(&b).unwrap_or_else(T::zero);
            debug_assert!((back - w).abs() <= T::check_tol());
            *cross[a].entry(c).or_insert_with(T::zero) += w;
            *cross[c].entry(a).or_insert_with(T::zero) += w;
        }
        let mb = members[b].take().expect("alive module");
        let ma = members[a].take().expect("alive module");
        members[a] = Some(ma.union(&mb));
        mod_vol[a] = mod_vol[a] + mod_vol[b];
        mod_cut[a] = mod_cut[a] + mod_cut[b] - (w_ab + w_ab);
        alive -= 1;
    }

    let parts: Vec<VertexSet> = members.into_iter().flatten().collect();
    let tree = EncodingTree::from_partition(g, &parts)?;
    let entropy = entropy_of(g, &tree);
    Ok(OptimizeResult { tree, entropy, trace })
}

/// Cross weights between the children of `parent`, keyed by child positions.
fn sibling_cross<T: Scalar>(g: &Graph<T>, t: &EncodingTree<T>, parent: NodeId) -> BTreeMap<(usize, usize), T> {
    let children = t.node(parent).children();
    let mut owner = vec![usize::MAX; g.n()];
    for (i, &c) in children.iter().enumerate() {
        for v in t.node(c).marker().iter() {
            owner[v] = i;
        }
    }
    let mut out = BTreeMap::new();
    for v in t.node(parent).marker().iter() {
        for &(u, w) in g.neighbors(v) {
            let (i, j) = (owner[v], owner[u]);
            if u > v && j != usize::MAX && i != j {
                *out.entry((i.min(j), i.max(j))).or_insert_with(T::zero) += w;
            }
        }
    }
    out
}

/// Greedy minimization over trees of height at most `cap`, applying the best
/// merge or combine among adjacent siblings until no move helps.
pub fn minimize_kd<T: Scalar>(g: &Graph<T>, cap: usize) -> Result<OptimizeResult<T>> {
    if cap < 2 {
        return Err(Error::Argument(format!("height cap must be at least 2, got {cap}")));
    }
    if cap == 2 {
        return minimize_2d(g);
    }
    tree_search(g, cap)
}

/// The general merge/combine loop; at cap 2 it explores the same moves as
/// [`minimize_2d`].
pub(crate) fn tree_search<T: Scalar>(g: &Graph<T>, cap: usize) -> Result<OptimizeResult<T>> {
    let vol = g.volume();
    let mut tree = EncodingTree::star(g);
    let mut trace = Vec::new();
    loop {
        let mut candidates = Vec::new();
        for (parent, node) in tree.nodes() {
            if node.children().len() < 3 {
                continue;
            }
            let depth = tree.depth(parent);
            let v_parent = node.vol();
            let children = node.children();
            for ((i, j), w) in sibling_cross(g, &tree, parent) {
                if !(w > T::zero()) {
                    continue;
                }
                let (a, b) = (children[i], children[j]);
                let (ha, hb) = (tree.subtree_height(a), tree.subtree_height(b));
                let key = (
                    tree.node(a).marker().first().expect("nonempty"),
                    tree.node(b).marker().first().expect("nonempty"),
                );
                let (sa, sb) = (side(&tree, a), side(&tree, b));
                if depth + 1 + ha.max(1).max(hb.max(1)) <= cap {
                    let delta = merge_gain(sa, sb, w, v_parent, vol);
                    candidates.push(Candidate { key, kind: MoveKind::Merge, delta, a, b });
                }
                if depth + 2 + ha.max(hb) <= cap {
                    let delta = combine_gain(sa, sb, w, v_parent, vol);
                    candidates.push(Candidate { key, kind: MoveKind::Combine, delta, a, b });
                }
            }
        }
        let Some(best) = select(&candidates) else { break };
        trace.push(Move { kind: best.kind, a: tree.path(best.a), b: tree.path(best.b), delta: best.delta });
        tree = match best.kind {
            MoveKind::Merge => tree.merge_apply(g, best.a, best.b)?,
            MoveKind::Combine => tree.combine_apply(g, best.a, best.b, cap)?,
        };
    }
    debug_assert!(tree.node(ROOT).children().len() >= 2);
    let entropy = entropy_of(g, &tree);
    Ok(OptimizeResult { tree, entropy, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::structural_entropy;
    use crate::graph::fixtures::*;
    use crate::optimize::brute_force_2d;
    use proptest::prelude::*;

    fn set(vs: &[usize]) -> VertexSet {
        vs.iter().copied().collect()
    }

    fn two_cliques(a: usize, b: usize) -> Graph {
        let mut edges = Vec::new();
        for (lo, hi) in [(0, a), (a, a + b)] {
            for u in lo..hi {
                for v in u + 1..hi {
                    edges.push((u, v, 1.0));
                }
            }
        }
        edges.push((a - 1, a, 1.0));
        Graph::new((0..a + b).map(|i| i.to_string()).collect(), edges).unwrap()
    }

    /// Replays a trace and checks each recorded delta against the global
    /// entropy difference.
    fn replay(g: &Graph, result: &OptimizeResult, cap: usize) {
        let mut t = EncodingTree::star(g);
        for m in &result.trace {
            let a = t.node_at(&m.a).unwrap();
            let b = t.node_at(&m.b).unwrap();
            let next = match m.kind {
                MoveKind::Merge => t.merge_apply(g, a, b).unwrap(),
                MoveKind::Combine => t.combine_apply(g, a, b, cap).unwrap(),
            };
            let before = structural_entropy(g, &t).unwrap();
            let after = structural_entropy(g, &next).unwrap();
            assert!((before - after - m.delta).abs() < 1e-9, "{m:?}: {}", before - after);
            assert!(m.delta > 1e-12);
            t = next;
        }
        assert_eq!(t, result.tree);
    }

    fn same_run(x: &OptimizeResult, y: &OptimizeResult) {
        assert_eq!(x.tree, y.tree);
        assert!((x.entropy - y.entropy).abs() < 1e-12);
        assert_eq!(x.trace.len(), y.trace.len());
        for (m, n) in x.trace.iter().zip(&y.trace) {
            assert_eq!((m.kind, &m.a, &m.b), (n.kind, &n.a, &n.b));
            assert!((m.delta - n.delta).abs() < 1e-12);
        }
    }

    #[test]
    fn merge_delta_matches_recomputation() {
        let g = barbell();
        let star = EncodingTree::star(&g);
        let (a, b) = (star.leaf(0).unwrap(), star.leaf(1).unwrap());
        let merged = star.merge_apply(&g, a, b).unwrap();
        let expected = structural_entropy(&g, &star).unwrap() - structural_entropy(&g, &merged).unwrap();
        assert!((merge_delta(&g, &star, a, b).unwrap() - expected).abs() < 1e-12);
        // combining two leaves is the same move
        assert!((combine_delta(&g, &star, a, b).unwrap() - expected).abs() < 1e-12);
        assert!(matches!(merge_delta(&g, &star, a, ROOT), Err(Error::NotSiblings)));
    }

    #[test]
    fn merging_the_halves_loses() {
        let g = barbell();
        let t = EncodingTree::from_partition(&g, &[set(&[0, 1]), set(&[2]), set(&[3, 4, 5])]).unwrap();
        let (m, s) = (t.node(ROOT).children()[0], t.node(ROOT).children()[1]);
        let merged = t.merge_apply(&g, m, s).unwrap();
        let expected = structural_entropy(&g, &t).unwrap() - structural_entropy(&g, &merged).unwrap();
        assert!((merge_delta(&g, &t, m, s).unwrap() - expected).abs() < 1e-12);

        // with only two modules left, fusing them is not a legal tree; the
        // 2-part tree beats every coarser option
        let split = EncodingTree::from_partition(&g, &[set(&[0, 1, 2]), set(&[3, 4, 5])]).unwrap();
        let best = brute_force_2d(&g).unwrap();
        assert_eq!(best.tree, split);
        assert!(structural_entropy(&g, &split).unwrap() < g.one_dim_entropy());
    }

    /// Merge greedy over partitions with every candidate scored by full
    /// recomputation.
    fn naive_merge_greedy(g: &Graph) -> Vec<VertexSet> {
        let score = |parts: &[VertexSet]| {
            structural_entropy(g, &EncodingTree::from_partition(g, parts).unwrap()).unwrap()
        };
        let mut parts: Vec<VertexSet> = (0..g.n()).map(VertexSet::singleton).collect();
        loop {
            let current = score(&parts);
            let mut best: Option<(f64, Vec<VertexSet>)> = None;
            for i in 0..parts.len() {
                for j in i + 1..parts.len() {
                    if parts.len() == 2 || g.cross_weight(&parts[i], &parts[j]) == 0.0 {
                        continue;
                    }
                    let mut next: Vec<VertexSet> =
                        parts.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, p)| p.clone()).collect();
                    next.push(parts[i].union(&parts[j]));
                    next.sort();
                    let delta = current - score(&next);
                    if best.as_ref().map_or(true, |(d, _)| delta > d + 1e-12) {
                        best = Some((delta, next));
                    }
                }
            }
            match best {
                Some((d, next)) if d > 1e-12 => parts = next,
                _ => return parts,
            }
        }
    }

    #[test]
    fn barbell_greedy() {
        let g = barbell();
        let r = minimize_2d(&g).unwrap();
        // merge greedy pairs up {0,1}, {4,5}, then the bridge ends; every
        // further merge loses, so the planted split is not reached
        assert_eq!(r.tree.modules(), vec![set(&[0, 1]), set(&[2, 3]), set(&[4, 5])]);
        assert_eq!(r.tree.modules(), naive_merge_greedy(&g));
        assert!((r.entropy - 1.865642098).abs() < 1e-9);
        assert!(r.entropy > brute_force_2d(&g).unwrap().entropy);
        replay(&g, &r, 2);
        same_run(&r, &tree_search(&g, 2).unwrap());
    }

    #[test]
    fn triangle_pairs_two_vertices() {
        let g = complete(3);
        let r = minimize_2d(&g).unwrap();
        assert_eq!(r.tree.modules(), vec![set(&[0, 1]), set(&[2])]);
        let oracle = brute_force_2d(&g).unwrap();
        assert!((r.entropy - oracle.entropy).abs() < 1e-12);
        assert!((r.entropy - 1.389975000).abs() < 1e-9);
    }

    #[test]
    fn clique_pairs_follow_naive_greedy() {
        for a in 3..6 {
            for b in 3..6 {
                let g = two_cliques(a, b);
                let r = minimize_2d(&g).unwrap();
                assert_eq!(r.tree.modules(), naive_merge_greedy(&g), "{a}+{b}");
                assert!(r.entropy >= brute_force_2d(&g).unwrap().entropy - 1e-12);
            }
        }
        let r = minimize_2d(&two_cliques(4, 5)).unwrap();
        assert_eq!(r.tree.modules(), vec![(0..4).collect(), (4..9).collect()]);
    }

    #[test]
    fn k4_height_three() {
        let g = complete(4);
        let r = minimize_kd(&g, 3).unwrap();
        assert!(r.entropy <= 2.0 + 1e-12);
        assert!(r.tree.height() <= 3);
    }

    /// Four triangles; triangles 0,1 and 2,3 are paired by two edges each and
    /// the pairs are joined by a single edge.
    fn triangle_pairs() -> Graph {
        let mut edges = Vec::new();
        for t in 0..4 {
            let o = 3 * t;
            edges.extend([(o, o + 1, 1.0), (o, o + 2, 1.0), (o + 1, o + 2, 1.0)]);
        }
        edges.extend([(2, 3, 1.0), (1, 4, 1.0), (8, 9, 1.0), (7, 10, 1.0), (5, 6, 1.0)]);
        Graph::new((0..12).map(|i| i.to_string()).collect(), edges).unwrap()
    }

    #[test]
    fn nested_triangles_at_height_three() {
        let g = triangle_pairs();
        let flat = minimize_2d(&g).unwrap();
        let deep = minimize_kd(&g, 3).unwrap();
        replay(&g, &deep, 3);
        assert!(deep.entropy <= flat.entropy + 1e-12);
        assert_eq!(deep.tree.height(), 3);
        // triangles become the top modules, each splitting off the vertex
        // that carries the pairing edge
        let top: Vec<VertexSet> = deep.tree.modules();
        assert_eq!(top, vec![set(&[0, 1, 2]), set(&[3, 4, 5]), set(&[6, 7, 8]), set(&[9, 10, 11])]);
        for &m in deep.tree.node(ROOT).children() {
            assert_eq!(deep.tree.node(m).children().len(), 2);
        }
        assert!((deep.entropy - 2.009197523).abs() < 1e-9);
    }

    #[test]
    fn rejects_low_cap() {
        assert!(minimize_kd(&barbell(), 1).is_err());
    }

    #[test]
    fn trace_format() {
        let r = minimize_2d(&barbell()).unwrap();
        let text = r.trace_text();
        let first = text.lines().next().unwrap();
        let fields: Vec<&str> = first.split(' ').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0], "1");
        assert_eq!(fields[1], "merge");
        assert_eq!(fields[4].split('.').nth(1).unwrap().len(), 9);
    }

    #[test]
    fn robust_to_weight_perturbation() {
        let base = barbell();
        for (u, v) in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)] {
            for scale in [0.9, 1.1] {
                let edges: Vec<_> = base
                    .edges()
                    .iter()
                    .map(|&(a, b, w)| if (a, b) == (u, v) { (a, b, w * scale) } else { (a, b, w) })
                    .collect();
                let g = Graph::new(base.ids().to_vec(), edges).unwrap();
                let r = minimize_2d(&g).unwrap();
                assert_eq!(r.tree.modules(), naive_merge_greedy(&g));
            }
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (3usize..9).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (Just(n), proptest::collection::vec(proptest::option::weighted(0.45, 0.5f64..3.0), pairs))
        })
        .prop_filter_map("connected", |(n, weights)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if let Some(w) = weights[k] {
                        edges.push((u, v, w));
                    }
                    k += 1;
                }
            }
            Graph::new((0..n).map(|i| format!("v{i}")).collect(), edges).ok()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn greedy_moves_are_exact(g in arb_graph(), cap in 2usize..5) {
            let r = minimize_kd(&g, cap).unwrap();
            replay(&g, &r, cap);
            prop_assert!(r.tree.height() <= cap);
            prop_assert!(r.entropy <= g.one_dim_entropy() + 1e-12);
            prop_assert!(r.trace.len() <= 2 * g.n());
            prop_assert!((r.entropy - structural_entropy(&g, &r.tree).unwrap()).abs() < 1e-12);
            let flat = minimize_2d(&g).unwrap();
            prop_assert!(brute_force_2d(&g).unwrap().entropy <= flat.entropy + 1e-12);
            same_run(&flat, &tree_search(&g, 2).unwrap());
        }

        #[test]
        fn greedy_matches_naive_merge_greedy(g in arb_graph()) {
            prop_assert_eq!(minimize_2d(&g).unwrap().tree.modules(), naive_merge_greedy(&g));
        }

        #[test]
        fn greedy_is_deterministic(g in arb_graph()) {
            prop_assert_eq!(minimize_kd(&g, 3).unwrap(), minimize_kd(&g, 3).unwrap());
            prop_assert_eq!(minimize_2d(&g).unwrap(), minimize_2d(&g).unwrap());
        }

        #[test]
        fn disconnected_modules_never_merge_profitably(g in arb_graph(), mask in any::<u16>()) {
            // split vertices into two random modules with everything else singleton
            // and check every zero-cross pair among root children
            let n = g.n();
            let a: VertexSet = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            prop_assume!(a.len() >= 1 && a.len() < n - 1);
            let mut parts = vec![a.clone()];
            parts.extend((0..n).filter(|&v| !a.contains(v)).map(VertexSet::singleton));
            let t = EncodingTree::from_partition(&g, &parts).unwrap();
            let kids = t.node(ROOT).children().to_vec();
            for i in 0..kids.len() {
                for j in i + 1..kids.len() {
                    let w = g.cross_weight(t.node(kids[i]).marker(), t.node(kids[j]).marker());
                    if w == 0.0 {
                        let delta = merge_delta(&g, &t, kids[i], kids[j]).unwrap();
                        // (g_A - V_A) log(V_M / V_A) per side: zero only when
                        // neither side holds an internal edge
                        let internal = |id: usize| t.node(id).vol() - t.node(id).cut() > 1e-9;
                        if internal(kids[i]) || internal(kids[j]) {
                            prop_assert!(delta < 0.0);
                        } else {
                            prop_assert!(delta.abs() < 1e-9);
                        }
                    }
                }
            }
        }
    }
}
