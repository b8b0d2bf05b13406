//! Symmetric similarity matrices and top-k graph construction.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{component_count, Graph};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<T: Scalar = f64> {
    ids: Vec<String>,
    values: Vec<T>,
}

impl<T: Scalar> SimilarityMatrix<T> {
    /// Checks symmetry and non-negativity; the diagonal is ignored and zeroed.
    pub fn new(ids: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = ids.len();
        if n < 2 {
            return Err(Error::Similarity("need at least two samples".into()));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Similarity(format!("matrix must be {n}x{n}")));
        }
        let mut values = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let x = rows[i][j];
                if !x.is_finite() || x < T::zero() {
                    return Err(Error::Similarity(format!(
                        "entry ({}, {}) = {x} is negative or not finite",
                        ids[i], ids[j]
                    )));
                }
                if (x - rows[j][i]).abs() > T::check_tol() {
                    return Err(Error::Similarity(format!(
                        "asymmetric at ({}, {}): {x} vs {}",
                        ids[i], ids[j], rows[j][i]
                    )));
                }
                values[i * n + j] = x;
            }
        }
        Ok(Self { ids, values })
    }

    /// CSV with a header row of sample ids (first cell ignored) and one row
    /// per sample led by its id.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut records = reader.records().enumerate();
        let header = match records.next() {
            Some((_, rec)) => rec.map_err(|e| Error::Parse { line: 1, message: e.to_string() })?,
            None => return Err(Error::Similarity("empty file".into())),
        };
        let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::with_capacity(ids.len());
        for (i, rec) in records {
            let line = i + 1;
            let rec = rec.map_err(|e| Error::Parse { line, message: e.to_string() })?;
            if rec.len() != ids.len() + 1 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", ids.len() + 1, rec.len()),
                });
            }
            let row_id = &rec[0];
            let expected = ids.get(rows.len()).map(String::as_str);
            if expected != Some(row_id) {
                return Err(Error::Parse {
                    line,
                    message: format!("row id {row_id:?} does not match column order"),
                });
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|cell| {
                    cell.parse::<f64>()
                        .map(T::of)
                        .map_err(|_| Error::Parse { line, message: format!("bad number {cell:?}") })
                })
                .collect::<Result<Vec<T>>>()?;
            rows.push(row);
        }
        SimilarityMatrix::new(ids, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        SimilarityMatrix::parse_csv(&std::fs::read_to_string(path)?)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n() + j]
    }

    /// Positive off-diagonal pairs `(i, j, w)` with `i < j`, heaviest first;
    /// equal weights fall back to index order.
    pub fn ranked_pairs(&self) -> Vec<(usize, usize, T)> {
        let n = self.n();
        let mut pairs: Vec<(usize, usize, T)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.get(i, j)))
            .filter(|&(_, _, w)| w > T::zero())
            .collect();
        pairs.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then((a.0, a.1).cmp(&(b.0, b.1))));
        pairs
    }

    /// Graph keeping the `k` heaviest pairs as edges.
    pub fn topk_graph(&self, k: usize) -> Result<Graph<T>> {
        let ranked = self.ranked_pairs();
        topk_from_ranked(&self.ids, &ranked, k)
    }

    /// Smallest `k` whose top-k graph is connected, if any.
    pub fn min_connected_k(&self) -> Option<usize> {
        let ranked = self.ranked_pairs();
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for (k, &(i, j, _)) in ranked.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
                components -= 1;
                if components == 1 {
                    return Some(k + 1);
                }
            }
        }
        None
    }
}

pub(crate) fn topk_from_ranked<T: Scalar>(
    ids: &[String],
    ranked: &[(usize, usize, T)],
    k: usize,
) -> Result<Graph<T>> {
    if k == 0 || k > ranked.len() {
        return Err(Error::TooManyPairs { k, available: ranked.len() });
    }
    let edges = ranked[..k].to_vec();
    let components = component_count(ids.len(), edges.iter().map(|&(u, v, _)| (u, v)));
    if components != 1 {
        return Err(Error::Disconnected { components });
    }
    Graph::new(ids.to_vec(), edges)
}

/// Free-function form of [`SimilarityMatrix::topk_graph`].
pub fn build_topk_graph<T: Scalar>(sim: &SimilarityMatrix<T>, k: usize) -> Result<Graph<T>> {
    sim.topk_graph(k)
}
