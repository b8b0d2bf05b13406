//! Exhaustive oracles for the height-2 and height-k structural entropy.

use crate::entropy::entropy_of;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::scalar::{xlog2x, Scalar};
use crate::tree::{EncodingTree, Nested};

use super::OptimizeResult;

pub const BRUTE_FORCE_2D_LIMIT: usize = 10;
pub const BRUTE_FORCE_KD_LIMIT: usize = 6;

/// Set partitions of `0..n` as restricted growth strings, in lexicographic
/// order (the single block first).
pub struct SetPartitions {
    labels: Vec<usize>,
    maxes: Vec<usize>,
    done: bool,
}

pub fn set_partitions(n: usize) -> SetPartitions {
    SetPartitions { labels: vec![0; n], maxes: vec![0; n], done: n == 0 }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.labels.clone();
        let n = self.labels.len();
        // maxes[i] = max(labels[..i]), labels[i] may go up to maxes[i] + 1
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.labels[i] <= self.maxes[i] {
                self.labels[i] += 1;
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.maxes[j] = self.maxes[j - 1].max(self.labels[j - 1]);
                }
                break;
            }
        }
        Some(out)
    }
}

fn blocks(labels: &[usize]) -> Vec<VertexSet> {
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut parts = vec![Vec::new(); count];
    for (v, &l) in labels.iter().enumerate() {
        parts[l].push(v);
    }
    parts.into_iter().map(VertexSet::from_sorted_unchecked).collect()
}

/// Exact minimum of the structural entropy over all two-level trees, i.e.
/// over all set partitions of the vertices. Ties keep the partition whose
/// restricted growth string comes first.
pub fn brute_force_2d<T: Scalar>(g: &Graph<T>) -> Result<OptimizeResult<T>> {
    let n = g.n();
    if n > BRUTE_FORCE_2D_LIMIT {
        return Err(Error::SizeGuard { what: "two-level brute force", limit: BRUTE_FORCE_2D_LIMIT, n });
    }
    let vol = g.volume();
    let degree_terms: T = g.degrees().iter().map(|&d| xlog2x(d)).sum();
    let tol = T::move_tol();
    let mut best: Option<(T, Vec<usize>)> = None;
    let mut bvol = vec![T::zero(); n];
    let mut binner = vec![T::zero(); n];
    let mut bsize = vec![0usize; n];
    for labels in set_partitions(n) {
        bvol.iter_mut().for_each(|x| *x = T::zero());
        binner.iter_mut().for_each(|x| *x = T::zero());
        bsize.iter_mut().for_each(|x| *x = 0);
        for v in 0..n {
            bvol[labels[v]] += g.degree(v);
            bsize[labels[v]] += 1;
        }
        for &(u, v, w) in g.edges() {
            if labels[u] == labels[v] {
                binner[labels[u]] += w + w;
            }
        }
        // Σ over blocks of -(g/vol)log(V/vol) plus the leaf terms
        // -(d/vol)log(d/V); singleton blocks are leaves hanging off the root.
        let mut h = -degree_terms;
        for b in 0..n {
            if bsize[b] == 0 {
                continue;
            }
            let cut = bvol[b] - binner[b];
            if bsize[b] > 1 {
                h += -cut * (bvol[b] / vol).log2() + xlog2x(bvol[b]);
            } else {
                h += bvol[b] * vol.log2();
            }
        }
        let h = h / vol;
        if best.as_ref().map_or(true, |(b, _)| h < *b - tol) {
            best = Some((h, labels));
        }
    }
    let (_, labels) = best.expect("at least one partition");
    let tree = EncodingTree::from_partition(g, &blocks(&labels))?;
    let entropy = entropy_of(g, &tree);
    Ok(OptimizeResult { tree, entropy, trace: Vec::new() })
}

pub fn brute_force_kd<T: Scalar>(g: &Graph<T>, k: usize) -> Result<OptimizeResult<T>> {
    brute_force_kd_with_limit(g, k, BRUTE_FORCE_KD_LIMIT)
}

/// Exact minimum over all encoding trees of height at most `k`.
///
/// The entropy is a sum of per-node terms, and a node's term depends only on
/// its marker and its parent's marker, so the optimum decomposes over
/// subsets: `best(S, h)` is the cheapest split of `S` into at least two
/// blocks, each paying its own term relative to `S` plus `best(B, h - 1)`.
pub fn brute_force_kd_with_limit<T: Scalar>(g: &Graph<T>, k: usize, limit: usize) -> Result<OptimizeResult<T>> {
    let n = g.n();
    if n > limit || n > 20 {
        return Err(Error::SizeGuard { what: "height-k brute force", limit, n });
    }
    if k == 0 {
        return Err(Error::Argument("height must be at least 1".into()));
    }
    let dp = SubsetDp::new(g, k.min(n - 1));
    let full = (1usize << n) - 1;
    let shape = dp.shape(full, dp.cost.len() - 1);
    let tree = EncodingTree::from_nested(g, &shape)?;
    let entropy = entropy_of(g, &tree);
    Ok(OptimizeResult { tree, entropy, trace: Vec::new() })
}

struct SubsetDp<T> {
    vol: T,
    set_vol: Vec<T>,
    set_cut: Vec<T>,
    /// `cost[h][mask]`: cheapest subtree of height <= h over `mask`, not
    /// counting the term of its own root.
    cost: Vec<Vec<T>>,
}

impl<T: Scalar> SubsetDp<T> {
    fn new(g: &Graph<T>, k: usize) -> Self {
        let full = (1usize << g.n()) - 1;
        let mut set_vol = vec![T::zero(); full + 1];
        let mut set_cut = vec![T::zero(); full + 1];
        for mask in 1..=full {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let to_rest: T = g.neighbors(low).iter().filter(|&&(u, _)| rest >> u & 1 == 1).map(|&(_, w)| w).sum();
            set_vol[mask] = set_vol[rest] + g.degree(low);
            set_cut[mask] = set_cut[rest] + g.degree(low) - (to_rest + to_rest);
        }
        let mut dp = SubsetDp { vol: g.volume(), set_vol, set_cut, cost: Vec::with_capacity(k + 1) };
        for h in 0..=k {
            let mut row = vec![T::infinity(); full + 1];
            for mask in 1..=full {
                row[mask] = if mask & (mask - 1) == 0 {
                    T::zero()
                } else if h == 0 {
                    T::infinity()
                } else {
                    dp.split(mask, h).0
                };
            }
            dp.cost.push(row);
        }
        dp
    }

    fn block_cost(&self, block: usize, parent: usize, h: usize) -> T {
        let own = -(self.set_cut[block] / self.vol) * (self.set_vol[block] / self.set_vol[parent]).log2();
        own + self.cost[h - 1][block]
    }

    /// Best split of `mask` into at least two blocks at height `h`; ties keep
    /// the first block found in descending submask order.
    fn split(&self, mask: usize, h: usize) -> (T, Vec<usize>) {
        let bits: Vec<usize> = (0..usize::BITS as usize).filter(|&b| mask >> b & 1 == 1).collect();
        let expand = |c: usize| -> usize {
            bits.iter().enumerate().filter(|(i, _)| c >> i & 1 == 1).map(|(_, &b)| 1usize << b).sum()
        };
        let size = 1usize << bits.len();
        let tol = T::move_tol();
        let cost_of: Vec<T> = (0..size).map(|c| if c == 0 { T::zero() } else { self.block_cost(expand(c), mask, h) }).collect();
        // any number of blocks, over compact submask indices
        let mut value = vec![T::infinity(); size];
        let mut first = vec![0usize; size];
        value[0] = T::zero();
        let top = size - 1;
        for c in 1..size {
            let low = c & c.wrapping_neg();
            let rest = c ^ low;
            let mut sub = rest;
            loop {
                let block = sub | low;
                // the whole set as one block is not a split
                if !(c == top && block == top) {
                    let v = cost_of[block] + value[c ^ block];
                    if first[c] == 0 || v < value[c] - tol {
                        value[c] = v;
                        first[c] = block;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        let mut blocks = Vec::new();
        let mut c = top;
        while c != 0 {
            blocks.push(expand(first[c]));
            c ^= first[c];
        }
        (value[top], blocks)
    }

    fn shape(&self, mask: usize, h: usize) -> Nested {
        if mask & (mask - 1) == 0 {
            return Nested::Leaf(mask.trailing_zeros() as usize);
        }
        let (_, blocks) = self.split(mask, h);
        Nested::Node(blocks.into_iter().map(|b| self.shape(b, h - 1)).collect())
    }
}
