//! Density-based clustering of users and items, the cluster-pair edge
//! counts and the per-user-cluster item preference weights derived from them.

use std::collections::HashMap;
use std::io::{self, Write};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, Side};
use crate::similarity::SparseSimilarity;

/// Slack for comparing `1 - score` against `eps` (`1 - 0.3 > 0.7` in f64).
const EPS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbscanParams {
    /// Neighborhood radius on the distance `1 - score`.
    pub eps: f64,
    /// Minimum neighborhood size, the point itself included, for a core point.
    pub min_pts: usize,
}

impl Default for DbscanParams {
    fn default() -> Self {
        Self {
            eps: 0.7,
            min_pts: 4,
        }
    }
}

impl DbscanParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dbscan eps must be positive, got {}",
                self.eps
            )));
        }
        if self.min_pts == 0 {
            return Err(Error::InvalidParameter("dbscan min_pts must be at least 1".into()));
        }
        Ok(())
    }

    /// Lowest similarity score that still counts as a neighbor.
    pub fn min_score(&self) -> f64 {
        (1.0 - self.eps - EPS_SLACK).max(0.0)
    }
}

/// One cluster index per node. Cluster ids are dense and numbered by the
/// smallest node they contain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    side: Side,
    labels: Vec<u32>,
    sizes: Vec<usize>,
}

impl ClusterAssignment {
    /// Canonicalizes arbitrary labels: equal labels share a cluster, and
    /// clusters are renumbered in order of first appearance.
    pub fn from_labels(side: Side, raw: &[u32]) -> Self {
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut sizes = Vec::new();
        let labels = raw
            .iter()
            .map(|&l| {
                let next = remap.len() as u32;
                let id = *remap.entry(l).or_insert(next);
                if id as usize == sizes.len() {
                    sizes.push(0);
                }
                sizes[id as usize] += 1;
                id
            })
            .collect();
        Self { side, labels, sizes }
    }

    pub fn singletons(side: Side, n: usize) -> Self {
        Self {
            side,
            labels: (0..n as u32).collect(),
            sizes: vec![1; n],
        }
    }

    pub fn single_cluster(side: Side, n: usize) -> Self {
        Self {
            side,
            labels: vec![0; n],
            sizes: if n == 0 { Vec::new() } else { vec![n] },
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.sizes.len()
    }

    pub fn cluster_of(&self, node: usize) -> u32 {
        self.labels[node]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Sorted members of every cluster.
    pub fn members(&self) -> Vec<Vec<u32>> {
        let mut members: Vec<Vec<u32>> =
            self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (node, &c) in self.labels.iter().enumerate() {
            members[c as usize].push(node as u32);
        }
        members
    }

    /// `node<TAB>cluster` per line.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (node, c) in self.labels.iter().enumerate() {
            writeln!(out, "{node}\t{c}")?;
        }
        out.flush()
    }

    fn check_covers(&self, side: Side, expected: usize) -> Result<()> {
        if self.side != side || self.len() != expected {
            return Err(Error::DimensionMismatch {
                side,
                expected,
                actual: self.len(),
            });
        }
        Ok(())
    }
}

/// DBSCAN over the distance `1 - score`.
///
/// Only stored pairs can be neighbors; a pair with no common neighbor is
/// never within reach, whatever `eps` is. Points are visited in index order
/// and clusters grow breadth-first, so the result is deterministic. Points
/// left as noise each become their own cluster.
pub fn dbscan(sim: &SparseSimilarity, params: DbscanParams) -> Result<ClusterAssignment> {
    params.validate()?;
    let n = sim.num_nodes();
    let min_score = params.min_score();
    let reach = |p: usize| {
        sim.row_iter(p)
            .filter(move |&(_, s)| s >= min_score)
            .map(|(q, _)| q as usize)
    };
    let core: Vec<bool> = (0..n)
        .map(|p| reach(p).count() + 1 >= params.min_pts)
        .collect();

    const UNSET: u32 = u32::MAX;
    let mut labels = vec![UNSET; n];
    let mut next = 0u32;
    let mut queue = std::collections::VecDeque::new();
    for p in 0..n {
        if labels[p] != UNSET || !core[p] {
            continue;
        }
        labels[p] = next;
        queue.push_back(p);
        while let Some(q) = queue.pop_front() {
            for r in reach(q) {
                if labels[r] == UNSET {
                    labels[r] = next;
                    if core[r] {
                        queue.push_back(r);
                    }
                }
            }
        }
        next += 1;
    }
    for label in labels.iter_mut().filter(|l| **l == UNSET) {
        *label = next;
        next += 1;
    }
    Ok(ClusterAssignment::from_labels(sim.side(), &labels))
}

/// Edge counts between user clusters (rows) and item clusters (columns),
/// stored sparsely: one sorted `(item_cluster, count)` list per user cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterScoreMatrix {
    cols: usize,
    rows: Vec<Vec<(u32, u64)>>,
}

impl ClusterScoreMatrix {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, user_cluster: usize) -> &[(u32, u64)] {
        &self.rows[user_cluster]
    }

    pub fn get(&self, user_cluster: usize, item_cluster: usize) -> u64 {
        let row = &self.rows[user_cluster];
        match row.binary_search_by_key(&(item_cluster as u32), |e| e.0) {
            Ok(pos) => row[pos].1,
            Err(_) => 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().flatten().map(|e| e.1).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0; self.cols];
                for &(c, v) in row {
                    dense[c as usize] = v;
                }
                dense
            })
            .collect()
    }

    /// Nonzero entries as `user_cluster,item_cluster,count` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "user_cluster,item_cluster,count")?;
        for (a, row) in self.rows.iter().enumerate() {
            for &(b, v) in row {
                writeln!(out, "{a},{b},{v}")?;
            }
        }
        out.flush()
    }
}

/// Counts edges of `g` between every pair of user and item clusters.
pub fn cluster_scores(
    g: &InteractionGraph,
    users: &ClusterAssignment,
    items: &ClusterAssignment,
) -> Result<ClusterScoreMatrix> {
    users.check_covers(Side::Users, g.num_users())?;
    items.check_covers(Side::Items, g.num_items())?;

    let mut acc: Vec<HashMap<u32, u64>> = vec![HashMap::new(); users.num_clusters()];
    for (u, i) in g.edges() {
        *acc[users.cluster_of(u as usize) as usize]
            .entry(items.cluster_of(i as usize))
            .or_insert(0) += 1;
    }
    let rows = acc
        .into_iter()
        .map(|m| {
            let mut row: Vec<(u32, u64)> = m.into_iter().collect();
            row.sort_unstable();
            row
        })
        .collect();
    Ok(ClusterScoreMatrix {
        cols: items.num_clusters(),
        rows,
    })
}

/// Normalized item weights per user cluster: item `i` gets
/// `e(a, c_i) / |c_i| · deg(i)`, scaled to sum to one over all items.
///
/// Rows are built on first use and cached.
#[derive(Debug)]
pub struct PreferenceDistribution {
    num_items: usize,
    scores: ClusterScoreMatrix,
    item_members: Vec<Vec<u32>>,
    item_degrees: Vec<usize>,
    rows: Vec<OnceLock<Vec<(u32, f64)>>>,
}

pub fn preference(
    scores: &ClusterScoreMatrix,
    items: &ClusterAssignment,
    item_degrees: &[usize],
) -> Result<PreferenceDistribution> {
    items.check_covers(Side::Items, item_degrees.len())?;
    if scores.num_cols() != items.num_clusters() {
        return Err(Error::DimensionMismatch {
            side: Side::Items,
            expected: items.num_clusters(),
            actual: scores.num_cols(),
        });
    }
    Ok(PreferenceDistribution {
        num_items: item_degrees.len(),
        scores: scores.clone(),
        item_members: items.members(),
        item_degrees: item_degrees.to_vec(),
        rows: (0..scores.num_rows()).map(|_| OnceLock::new()).collect(),
    })
}

impl PreferenceDistribution {
    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn num_user_clusters(&self) -> usize {
        self.rows.len()
    }

    /// Items with positive weight for `user_cluster`, sorted by item.
    pub fn row(&self, user_cluster: usize) -> &[(u32, f64)] {
        self.rows[user_cluster].get_or_init(|| self.build_row(user_cluster))
    }

    pub fn weight(&self, user_cluster: usize, item: usize) -> f64 {
        let row = self.row(user_cluster);
        match row.binary_search_by_key(&(item as u32), |e| e.0) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self, user_cluster: usize) -> Vec<f64> {
        let mut dense = vec![0.0; self.num_items];
        for &(i, w) in self.row(user_cluster) {
            dense[i as usize] = w;
        }
        dense
    }

    fn build_row(&self, a: usize) -> Vec<(u32, f64)> {
        // Per item cluster b the weight is factor_b · deg(i), with
        // factor_b = e(a, b) / |b| / total.
        let per_degree: Vec<(u32, f64)> = self
            .scores
            .row(a)
            .iter()
            .map(|&(b, e)| (b, e as f64 / self.item_members[b as usize].len() as f64))
            .collect();
        let total: f64 = per_degree
            .iter()
            .map(|&(b, f)| {
                let degree_sum: usize = self.item_members[b as usize]
                    .iter()
                    .map(|&i| self.item_degrees[i as usize])
                    .sum();
                f * degree_sum as f64
            })
            .sum();

        if !(total > 0.0) {
            let w = 1.0 / self.num_items as f64;
            return (0..self.num_items as u32).map(|i| (i, w)).collect();
        }

        let mut row: Vec<(u32, f64)> = per_degree
            .iter()
            .flat_map(|&(b, f)| {
                let factor = f / total;
                self.item_members[b as usize].iter().filter_map(move |&i| {
                    let d = self.item_degrees[i as usize];
                    (d > 0).then_some((i, factor * d as f64))
                })
            })
            .collect();
        row.sort_unstable_by_key(|e| e.0);
        row
    }
}
