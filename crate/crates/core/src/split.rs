//! Per-user train / validation / test partitioning.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::rng::stream_rng;

/// Share of each user's interactions assigned to each part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitFractions {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.6,
            validation: 0.2,
            test: 0.2,
        }
    }
}

impl SplitFractions {
    fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(format!(
                "split fractions must lie in [0, 1], got {parts:?}"
            )));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "split fractions must sum to 1, got {parts:?}"
            )));
        }
        Ok(())
    }
}

/// Three edge-disjoint graphs over the source node sets.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: InteractionGraph,
    pub validation: InteractionGraph,
    pub test: InteractionGraph,
    /// Users with fewer than three interactions, kept entirely in `train`.
    pub degenerate_users: usize,
}

const MIN_SPLITTABLE: usize = 3;

/// Shuffles each user's items with that user's random stream and cuts off
/// `floor(validation·n)` validation and `floor(test·n)` test items; the
/// remainder is training data.
pub fn split(g: &InteractionGraph, fractions: SplitFractions, seed: u64) -> Result<DatasetSplit> {
    fractions.validate()?;
    let n_users = g.num_users();
    let mut train = Vec::with_capacity(n_users);
    let mut validation = Vec::with_capacity(n_users);
    let mut test = Vec::with_capacity(n_users);
    let mut degenerate_users = 0;

    for u in 0..n_users {
        let mut items = g.items_of(u).to_vec();
        let n = items.len();
        if n < MIN_SPLITTABLE {
            if n > 0 {
                degenerate_users += 1;
            }
            train.push(items);
            validation.push(Vec::new());
            test.push(Vec::new());
            continue;
        }
        items.shuffle(&mut stream_rng(seed, u as u64));
        let n_val = floor_share(fractions.validation, n);
        let n_test = floor_share(fractions.test, n);
        let rest = items.split_off(n_val + n_test);
        let test_part = items.split_off(n_val);
        validation.push(items);
        test.push(test_part);
        train.push(rest);
    }

    if degenerate_users > 0 {
        log::warn!(
            "{degenerate_users} users with fewer than {MIN_SPLITTABLE} interactions kept entirely in train"
        );
    }

    let build = |rows| -> Result<InteractionGraph> {
        let part = InteractionGraph::from_rows(g.num_items(), rows)?;
        Ok(match g.labels() {
            Some(labels) => part.with_labels(labels.clone()),
            None => part,
        })
    };
    Ok(DatasetSplit {
        train: build(train)?,
        validation: build(validation)?,
        test: build(test)?,
        degenerate_users,
    })
}

/// `floor(fraction · n)`, tolerant of products like 0.29·100 = 28.999…
fn floor_share(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 + 1e-9).floor() as usize).min(n)
}
