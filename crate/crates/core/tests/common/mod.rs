//! Fixtures and brute-force oracles shared by the integration tests.
//!
//! The oracles work on plain item sets and never call into the sampler or
//! the similarity kernels, so they can check them.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use peco::clustering::ClusterAssignment;
use peco::graph::{InteractionGraph, Side};
use peco::rng::stream_rng;
use peco::synthetic::{stochastic_block_graph, BlockModel};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// u1:{i1,i2}, u2:{i2,i3}, u3:{i3,i4}
pub fn t1() -> InteractionGraph {
    InteractionGraph::from_rows(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap()
}

/// Users {u1,u2}|{u3}, items {i1,i2}|{i3,i4}.
pub fn t1_clusters() -> (ClusterAssignment, ClusterAssignment) {
    (
        ClusterAssignment::from_labels(Side::Users, &[0, 0, 1]),
        ClusterAssignment::from_labels(Side::Items, &[0, 0, 1, 1]),
    )
}

/// Small stand-ins for the four benchmark datasets: node counts scaled down
/// by 100, mean user degree kept where the catalog allows it.
pub fn toy_datasets() -> Vec<(&'static str, InteractionGraph)> {
    [
        ("amazon-beauty", 71, 38, 710, 5),
        ("movielens-1m", 61, 33, 61 * 16, 3),
        ("yelp2018", 460, 456, 9_200, 20),
        ("amazon-cds", 432, 357, 7_776, 18),
    ]
    .into_iter()
    .enumerate()
    .map(|(k, (name, users, items, edges, blocks))| {
        let model = BlockModel::with_edges(users, items, edges, blocks);
        (name, stochastic_block_graph(&model, 100 + k as u64).unwrap())
    })
    .collect()
}

/// Uniform random graph; every user has at least `min_degree` items.
pub fn random_graph(rng: &mut impl Rng, users: usize, items: usize, min_degree: usize) -> InteractionGraph {
    let p = rng.random_range(0.05..0.7);
    let rows = (0..users)
        .map(|_| {
            let mut row: Vec<u32> = (0..items as u32).filter(|_| rng.random_bool(p)).collect();
            while row.len() < min_degree.min(items) {
                let i = rng.random_range(0..items as u32);
                if !row.contains(&i) {
                    row.push(i);
                }
            }
            row
        })
        .collect();
    InteractionGraph::from_rows(items, rows).unwrap()
}

pub fn random_assignment(rng: &mut impl Rng, side: Side, n: usize) -> ClusterAssignment {
    let k = rng.random_range(1..=n.max(1)) as u32;
    let labels: Vec<u32> = (0..n).map(|_| rng.random_range(0..k)).collect();
    ClusterAssignment::from_labels(side, &labels)
}

pub fn item_sets(g: &InteractionGraph) -> Vec<HashSet<u32>> {
    (0..g.num_users())
        .map(|u| g.items_of(u).iter().copied().collect())
        .collect()
}

pub fn user_sets_of_items(g: &InteractionGraph) -> Vec<HashSet<u32>> {
    let mut sets = vec![HashSet::new(); g.num_items()];
    for (u, i) in g.edges() {
        sets[i as usize].insert(u);
    }
    sets
}

pub fn jaccard(a: &HashSet<u32>, b: &HashSet<u32>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.union(b).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Dense item-item Jaccard with a zero diagonal.
pub fn brute_concurrence(g: &InteractionGraph) -> Vec<Vec<f64>> {
    let sets = user_sets_of_items(g);
    let n = sets.len();
    let mut s = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                s[a][b] = jaccard(&sets[a], &sets[b]);
            }
        }
    }
    s
}

/// Edge counts between user and item clusters by a double loop over edges.
pub fn brute_cluster_counts(
    g: &InteractionGraph,
    users: &ClusterAssignment,
    items: &ClusterAssignment,
) -> Vec<Vec<u64>> {
    let mut e = vec![vec![0u64; items.num_clusters()]; users.num_clusters()];
    for (u, i) in g.edges() {
        e[users.cluster_of(u as usize) as usize][items.cluster_of(i as usize) as usize] += 1;
    }
    e
}

/// Item weights for every user cluster: `e(a, b) / |b| · degree(i)`,
/// normalized over the catalog; uniform when the cluster has no edges.
pub fn brute_preference(
    g: &InteractionGraph,
    users: &ClusterAssignment,
    items: &ClusterAssignment,
) -> Vec<Vec<f64>> {
    let e = brute_cluster_counts(g, users, items);
    let degrees = g.degrees(Side::Items);
    let sizes: Vec<usize> = (0..items.num_clusters())
        .map(|b| (0..g.num_items()).filter(|&i| items.cluster_of(i) as usize == b).count())
        .collect();
    e.iter()
        .map(|row| {
            let raw: Vec<f64> = (0..g.num_items())
                .map(|i| {
                    let b = items.cluster_of(i) as usize;
                    row[b] as f64 / sizes[b] as f64 * degrees[i] as f64
                })
                .collect();
            let total: f64 = raw.iter().sum();
            if total > 0.0 {
                raw.iter().map(|w| w / total).collect()
            } else {
                vec![1.0 / g.num_items() as f64; g.num_items()]
            }
        })
        .collect()
}

/// Exact distribution of the final item set of one user: every uniformly
/// chosen retained subset, then every order of weighted draws with weight
/// `pref(i) + alpha · mean_{j in set} s(i, j)`, uniform when all weights vanish.
pub fn sequence_oracle(
    own: &[u32],
    num_items: usize,
    pref: &[f64],
    s: &[Vec<f64>],
    alpha: f64,
    retain: f64,
) -> BTreeMap<Vec<u32>, f64> {
    let target = own.len();
    let keep = ((retain * target as f64 + 1e-9).floor() as usize).min(target);
    let subsets = combinations(own, keep);
    let p0 = 1.0 / subsets.len() as f64;
    let mut out = BTreeMap::new();
    for start in subsets {
        expand(&start, p0, target, num_items, pref, s, alpha, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn expand(
    set: &[u32],
    p: f64,
    target: usize,
    num_items: usize,
    pref: &[f64],
    s: &[Vec<f64>],
    alpha: f64,
    out: &mut BTreeMap<Vec<u32>, f64>,
) {
    if set.len() == target.min(num_items) {
        let mut key = set.to_vec();
        key.sort_unstable();
        *out.entry(key).or_insert(0.0) += p;
        return;
    }
    let free: Vec<u32> = (0..num_items as u32).filter(|i| !set.contains(i)).collect();
    let weights: Vec<f64> = free
        .iter()
        .map(|&i| {
            let mean_s = if set.is_empty() {
                0.0
            } else {
                set.iter().map(|&j| s[i as usize][j as usize]).sum::<f64>() / set.len() as f64
            };
            pref[i as usize] + alpha * mean_s
        })
        .collect();
    let total: f64 = weights.iter().sum();
    for (k, &i) in free.iter().enumerate() {
        let step = if total > 0.0 {
            weights[k] / total
        } else {
            1.0 / free.len() as f64
        };
        if step > 0.0 {
            let mut next = set.to_vec();
            next.push(i);
            expand(&next, p * step, target, num_items, pref, s, alpha, out);
        }
    }
}

pub fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut with_first: Vec<Vec<u32>> = combinations(&items[1..], k - 1)
        .into_iter()
        .map(|mut c| {
            c.insert(0, items[0]);
            c
        })
        .collect();
    with_first.extend(combinations(&items[1..], k));
    with_first
}

/// Pearson chi-square goodness of fit. Outcomes with expected count below 5
/// are pooled into one bin. Returns `(statistic, degrees of freedom, p-value)`;
/// an observed outcome with zero expected probability gives p = 0.
pub fn chi_square<K: Ord>(
    expected: &BTreeMap<K, f64>,
    observed: &BTreeMap<K, usize>,
    trials: usize,
) -> (f64, usize, f64) {
    if observed.keys().any(|k| !expected.contains_key(k)) {
        return (f64::INFINITY, 0, 0.0);
    }
    let n = trials as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (k, &p) in expected {
        let o = *observed.get(k).unwrap_or(&0) as f64;
        if p * n >= 5.0 {
            bins.push((o, p * n));
        } else {
            pooled.0 += o;
            pooled.1 += p * n;
        }
    }
    if pooled.1 > 0.0 {
        bins.push(pooled);
    }
    let stat: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let df = bins.len().saturating_sub(1);
    let p = if df == 0 {
        if stat < 1e-9 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat)
    };
    (stat, df, p)
}

pub fn rng(seed: u64) -> peco::rng::StreamRng {
    stream_rng(seed, u64::MAX)
}
