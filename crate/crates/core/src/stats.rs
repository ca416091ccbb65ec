//! How well an ensemble of sampled graphs preserves the source graph:
//! item degrees, item concurrence and cluster-pair edge counts.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::clustering::{cluster_scores, ClusterAssignment, ClusterScoreMatrix};
use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, Side};
use crate::similarity::{concurrence_matrix, ConcurrenceMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeRow {
    pub item: u32,
    pub original: usize,
    pub mean: f64,
    pub std: f64,
}

/// Per-item degree in the source graph against the ensemble mean, ordered
/// by decreasing source degree (ties by item index).
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub rows: Vec<DegreeRow>,
    /// Spearman correlation between source and mean degrees; `None` when
    /// either side is constant.
    pub spearman: Option<f64>,
}

impl DegreeReport {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "rank,item,original_degree,mean_degree,std_degree")?;
        for (rank, r) in self.rows.iter().enumerate() {
            writeln!(out, "{rank},{},{},{},{}", r.item, r.original, r.mean, r.std)?;
        }
        out.flush()
    }
}

fn check_nodes(g: &InteractionGraph, ensemble: &[InteractionGraph]) -> Result<()> {
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("ensemble is empty".into()));
    }
    for sample in ensemble {
        for side in [Side::Users, Side::Items] {
            if sample.num_nodes(side) != g.num_nodes(side) {
                return Err(Error::DimensionMismatch {
                    side,
                    expected: g.num_nodes(side),
                    actual: sample.num_nodes(side),
                });
            }
        }
    }
    Ok(())
}

pub fn degree_report(g: &InteractionGraph, ensemble: &[InteractionGraph]) -> Result<DegreeReport> {
    check_nodes(g, ensemble)?;
    let n = g.num_items();
    let k = ensemble.len() as f64;
    let mut sum = vec![0.0f64; n];
    let mut sum_sq = vec![0.0f64; n];
    for sample in ensemble {
        for (i, d) in sample.degrees(Side::Items).into_iter().enumerate() {
            sum[i] += d as f64;
            sum_sq[i] += (d * d) as f64;
        }
    }
    let original = g.degrees(Side::Items);
    let mut rows: Vec<DegreeRow> = (0..n)
        .map(|i| {
            let mean = sum[i] / k;
            let var = (sum_sq[i] / k - mean * mean).max(0.0);
            DegreeRow {
                item: i as u32,
                original: original[i],
                mean,
                std: var.sqrt(),
            }
        })
        .collect();
    let orig: Vec<f64> = rows.iter().map(|r| r.original as f64).collect();
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let spearman = spearman(&orig, &means);
    rows.sort_by(|a, b| b.original.cmp(&a.original).then(a.item.cmp(&b.item)));
    Ok(DegreeReport { rows, spearman })
}

/// Ranks with ties sharing their average rank (1-based).
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceSummary {
    /// Mean of `|E[S_sample](i,j) - S(i,j)|` over pairs `i < j` stored in
    /// either the source matrix or some sample.
    pub mean_abs_deviation: f64,
    /// Spearman correlation over pairs stored on both sides.
    pub rank_correlation: Option<f64>,
    pub compared_pairs: usize,
    pub overlapping_pairs: usize,
}

/// Compares the source concurrence matrix against the ensemble-mean
/// concurrence. Sample matrices are computed with the same `topk`.
pub fn concurrence_report(
    s_orig: &ConcurrenceMatrix,
    ensemble: &[InteractionGraph],
    topk: Option<usize>,
) -> Result<ConcurrenceSummary> {
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("ensemble is empty".into()));
    }
    let n = s_orig.num_items();
    for sample in ensemble {
        if sample.num_items() != n {
            return Err(Error::DimensionMismatch {
                side: Side::Items,
                expected: n,
                actual: sample.num_items(),
            });
        }
    }
    let k = ensemble.len() as f64;
    let sampled: Vec<ConcurrenceMatrix> = ensemble
        .iter()
        .map(|g| concurrence_matrix(g, topk))
        .collect();

    struct RowStats {
        abs_dev: f64,
        compared: usize,
        overlap: Vec<(f64, f64)>,
    }
    let per_row: Vec<RowStats> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut entries: Vec<(u32, f64)> = sampled
                .iter()
                .flat_map(|s| s.row_iter(a).filter(|&(b, _)| b as usize > a))
                .collect();
            entries.sort_by_key(|e| e.0);
            let mut mean_row: Vec<(u32, f64)> = Vec::new();
            for (b, v) in entries {
                match mean_row.last_mut() {
                    Some(last) if last.0 == b => last.1 += v,
                    _ => mean_row.push((b, v)),
                }
            }
            let orig: Vec<(u32, f64)> =
                s_orig.row_iter(a).filter(|&(b, _)| b as usize > a).collect();

            let mut stats = RowStats {
                abs_dev: 0.0,
                compared: 0,
                overlap: Vec::new(),
            };
            let (mut x, mut y) = (0, 0);
            while x < orig.len() || y < mean_row.len() {
                let ob = orig.get(x).map(|e| e.0);
                let mb = mean_row.get(y).map(|e| e.0);
                let (o, m) = match (ob, mb) {
                    (Some(p), Some(q)) if p == q => {
                        let pair = (orig[x].1, mean_row[y].1 / k);
                        stats.overlap.push(pair);
                        x += 1;
                        y += 1;
                        pair
                    }
                    (Some(p), Some(q)) if p < q => {
                        x += 1;
                        (orig[x - 1].1, 0.0)
                    }
                    (Some(_), None) => {
                        x += 1;
                        (orig[x - 1].1, 0.0)
                    }
                    _ => {
                        y += 1;
                        (0.0, mean_row[y - 1].1 / k)
                    }
                };
                stats.abs_dev += (o - m).abs();
                stats.compared += 1;
            }
            stats
        })
        .collect();

    let compared: usize = per_row.iter().map(|r| r.compared).sum();
    let abs_dev: f64 = per_row.iter().map(|r| r.abs_dev).sum();
    let (orig_vals, mean_vals): (Vec<f64>, Vec<f64>) =
        per_row.into_iter().flat_map(|r| r.overlap).unzip();
    Ok(ConcurrenceSummary {
        mean_abs_deviation: if compared == 0 {
            0.0
        } else {
            abs_dev / compared as f64
        },
        rank_correlation: spearman(&orig_vals, &mean_vals),
        compared_pairs: compared,
        overlapping_pairs: orig_vals.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceSummary {
    /// Mean over samples of the total-variation distance between the
    /// normalized source and sample cluster-pair edge counts.
    pub mean_tv_distance: f64,
    /// Total-variation distance between the source counts and the
    /// ensemble-mean counts, both normalized.
    pub tv_of_mean: f64,
    /// Ensemble-mean edge count per (user cluster, item cluster), sparse rows.
    pub mean_scores: Vec<Vec<(u32, f64)>>,
    /// Edge total of every sample's count matrix.
    pub sample_totals: Vec<u64>,
}

/// Recounts cluster-pair edges on every sample using the source clustering.
pub fn preference_report(
    e_orig: &ClusterScoreMatrix,
    ensemble: &[InteractionGraph],
    users: &ClusterAssignment,
    items: &ClusterAssignment,
) -> Result<PreferenceSummary> {
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("ensemble is empty".into()));
    }
    let rows = e_orig.num_rows();
    let as_f64 = |m: &ClusterScoreMatrix| -> Vec<Vec<(u32, f64)>> {
        (0..m.num_rows())
            .map(|a| m.row(a).iter().map(|&(b, v)| (b, v as f64)).collect())
            .collect()
    };
    let orig = as_f64(e_orig);

    let mut sum: Vec<Vec<(u32, f64)>> = vec![Vec::new(); rows];
    let mut tv_sum = 0.0;
    let mut sample_totals = Vec::with_capacity(ensemble.len());
    for sample in ensemble {
        let e = cluster_scores(sample, users, items)?;
        let e_rows = as_f64(&e);
        tv_sum += tv_distance(&orig, &e_rows);
        sample_totals.push(e.total());
        for (acc, row) in sum.iter_mut().zip(&e_rows) {
            *acc = merge_add(acc, row);
        }
    }
    let k = ensemble.len() as f64;
    let mean_scores: Vec<Vec<(u32, f64)>> = sum
        .into_iter()
        .map(|row| row.into_iter().map(|(b, v)| (b, v / k)).collect())
        .collect();
    Ok(PreferenceSummary {
        mean_tv_distance: tv_sum / k,
        tv_of_mean: tv_distance(&orig, &mean_scores),
        mean_scores,
        sample_totals,
    })
}

fn merge_add(a: &[(u32, f64)], b: &[(u32, f64)]) -> Vec<(u32, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        if y == b.len() || (x < a.len() && a[x].0 < b[y].0) {
            out.push(a[x]);
            x += 1;
        } else if x == a.len() || b[y].0 < a[x].0 {
            out.push(b[y]);
            y += 1;
        } else {
            out.push((a[x].0, a[x].1 + b[y].1));
            x += 1;
            y += 1;
        }
    }
    out
}

/// `½ Σ |a/Σa − b/Σb|` over sparse row-major matrices.
fn tv_distance(a: &[Vec<(u32, f64)>], b: &[Vec<(u32, f64)>]) -> f64 {
    let total = |m: &[Vec<(u32, f64)>]| m.iter().flatten().map(|e| e.1).sum::<f64>();
    let (ta, tb) = (total(a), total(b));
    let norm = |v: f64, t: f64| if t > 0.0 { v / t } else { 0.0 };
    let mut dist = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        let negated: Vec<(u32, f64)> = rb.iter().map(|&(c, v)| (c, -norm(v, tb))).collect();
        let scaled: Vec<(u32, f64)> = ra.iter().map(|&(c, v)| (c, norm(v, ta))).collect();
        dist += merge_add(&scaled, &negated)
            .iter()
            .map(|e| e.1.abs())
            .sum::<f64>();
    }
    dist / 2.0
}

/// Mean pairwise concurrence inside each user's item set, averaged over
/// users with at least two items. Zero when no user qualifies.
pub fn neighborhood_concurrence(s: &ConcurrenceMatrix, g: &InteractionGraph) -> f64 {
    let (sum, users) = (0..g.num_users())
        .into_par_iter()
        .filter_map(|u| {
            let set = g.items_of(u);
            let n = set.len();
            if n < 2 {
                return None;
            }
            let total: f64 = set
                .iter()
                .map(|&i| {
                    s.row_iter(i as usize)
                        .filter(|&(j, _)| j > i && set.binary_search(&j).is_ok())
                        .map(|(_, v)| v)
                        .sum::<f64>()
                })
                .sum();
            Some((total / (n * (n - 1) / 2) as f64, 1usize))
        })
        .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if users == 0 {
        0.0
    } else {
        sum / users as f64
    }
}
