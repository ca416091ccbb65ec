//! Top-K ranking metrics for implicit feedback.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, Side};

/// A ranked recommendation list and the items the user actually interacted with.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingJudgment {
    ranked: Vec<u32>,
    relevant: HashSet<u32>,
}

impl RankingJudgment {
    pub fn new(ranked: Vec<u32>, relevant: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(ranked.len());
        if let Some(dup) = ranked.iter().find(|i| !seen.insert(**i)) {
            return Err(Error::InvalidParameter(format!(
                "item {dup} appears twice in a ranked list"
            )));
        }
        Ok(Self {
            ranked,
            relevant: relevant.into_iter().collect(),
        })
    }

    pub fn ranked(&self) -> &[u32] {
        &self.ranked
    }

    pub fn num_relevant(&self) -> usize {
        self.relevant.len()
    }

    fn hits(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.ranked
            .iter()
            .take(k)
            .enumerate()
            .filter(|(_, i)| self.relevant.contains(i))
            .map(|(pos, _)| pos)
    }
}

/// Share of relevant items found in the top `k`; `None` without relevant items.
pub fn recall_at_k(j: &RankingJudgment, k: usize) -> Option<f64> {
    if j.relevant.is_empty() {
        return None;
    }
    Some(j.hits(k).count() as f64 / j.relevant.len() as f64)
}

/// Binary-gain NDCG with a `log2(rank + 1)` discount. The ideal ranking puts
/// `min(k, |relevant|)` relevant items first. `None` without relevant items.
pub fn ndcg_at_k(j: &RankingJudgment, k: usize) -> Option<f64> {
    if j.relevant.is_empty() {
        return None;
    }
    let discount = |pos: usize| 1.0 / ((pos + 2) as f64).log2();
    let dcg: f64 = j.hits(k).map(discount).sum();
    let idcg: f64 = (0..k.min(j.relevant.len())).map(discount).sum();
    Some(if idcg > 0.0 { dcg / idcg } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub k: usize,
    pub recall: f64,
    pub ndcg: f64,
    /// Users contributing to the averages.
    pub evaluated: usize,
    /// Users skipped because they have no relevant items.
    pub excluded: usize,
}

/// Averages recall and NDCG over judgments with at least one relevant item.
pub fn evaluate(judgments: &[RankingJudgment], k: usize) -> Result<MetricSummary> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let mut summary = MetricSummary {
        k,
        recall: 0.0,
        ndcg: 0.0,
        evaluated: 0,
        excluded: 0,
    };
    for j in judgments {
        match (recall_at_k(j, k), ndcg_at_k(j, k)) {
            (Some(r), Some(n)) => {
                summary.recall += r;
                summary.ndcg += n;
                summary.evaluated += 1;
            }
            _ => summary.excluded += 1,
        }
    }
    if summary.evaluated > 0 {
        summary.recall /= summary.evaluated as f64;
        summary.ndcg /= summary.evaluated as f64;
    }
    Ok(summary)
}

/// Most popular items in `train` that `user` has not interacted with yet.
pub fn popularity_ranking(train: &InteractionGraph, user: usize, k: usize) -> Vec<u32> {
    let degrees = train.degrees(Side::Items);
    let mut order: Vec<u32> = (0..train.num_items() as u32)
        .filter(|&i| !train.contains(user, i))
        .collect();
    order.sort_by(|&a, &b| degrees[b as usize].cmp(&degrees[a as usize]).then(a.cmp(&b)));
    order.truncate(k);
    order
}
