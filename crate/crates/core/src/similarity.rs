//! Jaccard similarity between nodes on one side of the graph.
//!
//! Two users are similar when they share items, two items when they share
//! users. The score of a pair is `|A ∩ B| / |A ∪ B|` over their neighbor
//! sets. Only pairs with at least one common neighbor are stored; they are
//! found through the other side's adjacency lists, so the cost is
//! proportional to `Σ deg²` on the opposite side rather than `n²`.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::graph::{InteractionGraph, Side};

/// Symmetric sparse similarity over one side. Rows are sorted by neighbor
/// index, scores lie in `(0, 1]` and self-pairs are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSimilarity {
    side: Side,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    scores: Vec<f64>,
}

/// Filters applied while computing a [`SparseSimilarity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityOptions {
    /// Pairs scoring below this are dropped.
    pub min_score: f64,
    /// Keep at most this many highest-scoring entries per row before
    /// symmetrizing. A pair survives if either endpoint keeps it, so rows
    /// can end up slightly longer than `k`.
    pub topk: Option<usize>,
}

impl Default for SimilarityOptions {
    fn default() -> Self {
        Self {
            min_score: 0.0,
            topk: None,
        }
    }
}

impl SparseSimilarity {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored (directed) entries.
    pub fn nnz(&self) -> usize {
        self.neighbors.len()
    }

    pub fn row(&self, node: usize) -> (&[u32], &[f64]) {
        let range = self.offsets[node]..self.offsets[node + 1];
        (&self.neighbors[range.clone()], &self.scores[range])
    }

    pub fn row_iter(&self, node: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let (n, s) = self.row(node);
        n.iter().copied().zip(s.iter().copied())
    }

    /// Score of `(a, b)`; zero when the pair is absent or `a == b`.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        let (neighbors, scores) = self.row(a);
        match neighbors.binary_search(&(b as u32)) {
            Ok(pos) => scores[pos],
            Err(_) => 0.0,
        }
    }

    /// `a<TAB>b<TAB>score` for every stored pair with `a < b`, scores printed
    /// with nine significant digits.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for a in 0..self.num_nodes() {
            for (b, s) in self.row_iter(a) {
                if (a as u32) < b {
                    writeln!(out, "{a}\t{b}\t{}", format_significant(s, 9))?;
                }
            }
        }
        out.flush()
    }

    fn from_rows(side: Side, rows: Vec<Vec<(u32, f64)>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let total = rows.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        let mut scores = Vec::with_capacity(total);
        for row in rows {
            for (b, s) in row {
                neighbors.push(b);
                scores.push(s);
            }
            offsets.push(neighbors.len());
        }
        Self {
            side,
            offsets,
            neighbors,
            scores,
        }
    }
}

/// Formats `x` with `digits` significant digits in fixed notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Item–item concurrence scores. The diagonal is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceMatrix(SparseSimilarity);

impl ConcurrenceMatrix {
    pub fn from_similarity(sim: SparseSimilarity) -> Self {
        assert_eq!(sim.side(), Side::Items, "concurrence is defined over items");
        Self(sim)
    }

    pub fn similarity(&self) -> &SparseSimilarity {
        &self.0
    }

    pub fn num_items(&self) -> usize {
        self.0.num_nodes()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn row_iter(&self, item: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.0.row_iter(item)
    }
}

pub fn pairwise_similarity(g: &InteractionGraph, side: Side) -> SparseSimilarity {
    pairwise_similarity_with(g, side, SimilarityOptions::default())
}

pub fn pairwise_similarity_with(
    g: &InteractionGraph,
    side: Side,
    opts: SimilarityOptions,
) -> SparseSimilarity {
    let n = g.num_nodes(side);
    let degrees = g.degrees(side);

    let rows: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::new()),
            |(counts, touched), a| {
                for &via in g.neighbors(side, a) {
                    for &b in g.neighbors(side.other(), via as usize) {
                        if b as usize == a {
                            continue;
                        }
                        if counts[b as usize] == 0 {
                            touched.push(b);
                        }
                        counts[b as usize] += 1;
                    }
                }
                let mut row: Vec<(u32, f64)> = touched
                    .drain(..)
                    .filter_map(|b| {
                        let common = std::mem::take(&mut counts[b as usize]) as usize;
                        let union = degrees[a] + degrees[b as usize] - common;
                        let score = common as f64 / union as f64;
                        (score >= opts.min_score).then_some((b, score))
                    })
                    .collect();
                if let Some(k) = opts.topk {
                    keep_top(&mut row, k);
                }
                row.sort_unstable_by_key(|&(b, _)| b);
                row
            },
        )
        .collect();

    let rows = if opts.topk.is_some() {
        symmetrize(rows)
    } else {
        rows
    };
    SparseSimilarity::from_rows(side, rows)
}

/// Keeps the `k` largest scores; ties go to the smaller index.
fn keep_top(row: &mut Vec<(u32, f64)>, k: usize) {
    if row.len() <= k {
        return;
    }
    let by_rank = |x: &(u32, f64), y: &(u32, f64)| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0));
    if k > 0 {
        row.select_nth_unstable_by(k - 1, by_rank);
    }
    row.truncate(k);
}

/// Adds `(b, a)` wherever only `(a, b)` survived truncation.
fn symmetrize(mut rows: Vec<Vec<(u32, f64)>>) -> Vec<Vec<(u32, f64)>> {
    let mut missing: Vec<Vec<(u32, f64)>> = vec![Vec::new(); rows.len()];
    for (a, row) in rows.iter().enumerate() {
        for &(b, s) in row {
            let back = &rows[b as usize];
            if back.binary_search_by_key(&(a as u32), |e| e.0).is_err() {
                missing[b as usize].push((a as u32, s));
            }
        }
    }
    for (row, extra) in rows.iter_mut().zip(missing) {
        if !extra.is_empty() {
            row.extend(extra);
            row.sort_unstable_by_key(|&(b, _)| b);
        }
    }
    rows
}

/// Item–item concurrence matrix, optionally truncated to the `topk`
/// strongest entries per item.
pub fn concurrence_matrix(g: &InteractionGraph, topk: Option<usize>) -> ConcurrenceMatrix {
    ConcurrenceMatrix(pairwise_similarity_with(
        g,
        Side::Items,
        SimilarityOptions {
            min_score: 0.0,
            topk,
        },
    ))
}

/// Mean concurrence between `item` and the members of `sampled`; zero for
/// an empty set.
pub fn set_score(s: &ConcurrenceMatrix, item: usize, sampled: &[u32]) -> f64 {
    if sampled.is_empty() {
        return 0.0;
    }
    let sum: f64 = sampled.iter().map(|&j| s.get(item, j as usize)).sum();
    sum / sampled.len() as f64
}

/// Running per-item sums `Σ_{j∈set} S(i, j)` for a growing item set, so
/// [`set_score`] for any item costs O(1) after each insertion costs one row
/// of `S`.
#[derive(Debug, Clone)]
pub struct SetScoreAccumulator {
    sums: Vec<f64>,
    touched: Vec<u32>,
    len: usize,
}

impl SetScoreAccumulator {
    pub fn new(num_items: usize) -> Self {
        Self {
            sums: vec![0.0; num_items],
            touched: Vec::new(),
            len: 0,
        }
    }

    pub fn insert(&mut self, s: &ConcurrenceMatrix, item: u32) {
        for (i, score) in s.row_iter(item as usize) {
            let slot = &mut self.sums[i as usize];
            if *slot == 0.0 {
                self.touched.push(i);
            }
            *slot += score;
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sum(&self, item: usize) -> f64 {
        self.sums[item]
    }

    pub fn score(&self, item: usize) -> f64 {
        if self.len == 0 {
            0.0
        } else {
            self.sums[item] / self.len as f64
        }
    }

    /// Items with a nonzero running sum, in first-touched order.
    pub fn touched(&self) -> &[u32] {
        &self.touched
    }

    pub fn clear(&mut self) {
        for &i in &self.touched {
            self.sums[i as usize] = 0.0;
        }
        self.touched.clear();
        self.len = 0;
    }
}
