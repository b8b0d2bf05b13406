//! Structural entropy minimization.
//!
//! [`minimize_2d`] and [`minimize_kd`] are greedy searches starting from the
//! star tree; [`brute_force_2d`] and [`brute_force_kd`] are exact oracles for
//! small graphs.

mod brute;
mod greedy;

use std::fmt;
use std::fmt::Write as _;

pub use brute::{
    brute_force_2d, brute_force_kd, brute_force_kd_with_limit, set_partitions, SetPartitions,
    BRUTE_FORCE_2D_LIMIT, BRUTE_FORCE_KD_LIMIT,
};
pub use greedy::{combine_delta, merge_delta, minimize_2d, minimize_kd};

use crate::error::{Error, Result};
use crate::format::fixed9;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::tree::{EncodingTree, NodePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveKind {
    Merge,
    Combine,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveKind::Merge => "merge",
            MoveKind::Combine => "combine",
        })
    }
}

/// One applied greedy move; paths refer to the tree before the move.
#[derive(Debug, Clone, PartialEq)]
pub struct Move<T: Scalar = f64> {
    pub kind: MoveKind,
    pub a: NodePath,
    pub b: NodePath,
    pub delta: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult<T: Scalar = f64> {
    pub tree: EncodingTree<T>,
    pub entropy: T,
    pub trace: Vec<Move<T>>,
}

impl<T: Scalar> OptimizeResult<T> {
    /// `<step> <op-kind> <nodeA-path> <nodeB-path> <delta>` per applied move.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for (step, m) in self.trace.iter().enumerate() {
            let _ = writeln!(out, "{} {} {} {} {}", step + 1, m.kind, m.a, m.b, fixed9(m.delta.as_f64()));
        }
        out
    }
}

/// Greedy approximation of the height-`k` decoding information
/// `H¹(G) − H^k(G)`.
pub fn decoding_info_k<T: Scalar>(g: &Graph<T>, k: usize) -> Result<T> {
    let result = minimize_kd(g, k)?;
    Ok(g.one_dim_entropy() - result.entropy)
}

/// Exact height-`k` compressing ratio `(H¹ − H^k) / H¹`, by brute force.
pub fn compressing_ratio_exact<T: Scalar>(g: &Graph<T>, k: usize) -> Result<T> {
    let best = if k == 2 { brute_force_2d(g)? } else { brute_force_kd(g, k)? };
    let h1 = g.one_dim_entropy();
    Ok((h1 - best.entropy) / h1)
}

/// Whether `G` is `(n, k, ρ)`-compressible: its exact height-`k` compressing
/// ratio reaches `rho`.
pub fn is_compressible<T: Scalar>(g: &Graph<T>, k: usize, rho: T) -> Result<bool> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(Error::Argument(format!("ratio threshold {rho} must lie in (0, 1)")));
    }
    Ok(compressing_ratio_exact(g, k)? >= rho)
}
