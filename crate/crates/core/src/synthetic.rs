//! Synthetic block-structured interaction graphs for tests and benchmarks.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::rng::stream_rng;

/// Users and items are assigned to `blocks` communities round-robin. Each
/// user draws a degree uniformly from `1..=2·mean_degree-1` and picks each
/// item from its own community with probability `in_block`, otherwise from
/// the whole catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockModel {
    pub users: usize,
    pub items: usize,
    pub blocks: usize,
    pub mean_degree: usize,
    pub in_block: f64,
}

impl BlockModel {
    /// A model whose expected edge count is close to `edges`.
    pub fn with_edges(users: usize, items: usize, edges: usize, blocks: usize) -> Self {
        Self {
            users,
            items,
            blocks,
            mean_degree: (edges / users.max(1)).max(1),
            in_block: 0.8,
        }
    }
}

pub fn stochastic_block_graph(model: &BlockModel, seed: u64) -> Result<InteractionGraph> {
    if model.users == 0 || model.items == 0 || model.blocks == 0 || model.mean_degree == 0 {
        return Err(Error::InvalidParameter(format!(
            "degenerate block model {model:?}"
        )));
    }
    if !(0.0..=1.0).contains(&model.in_block) {
        return Err(Error::InvalidParameter(format!(
            "in-block probability must lie in [0, 1], got {}",
            model.in_block
        )));
    }
    let blocks = model.blocks.min(model.items);
    let max_degree = (2 * model.mean_degree - 1).min(model.items);
    let rows: Vec<Vec<u32>> = (0..model.users)
        .into_par_iter()
        .map(|u| {
            let mut rng = stream_rng(seed, u as u64);
            let block = u % blocks;
            let block_size = (model.items - block).div_ceil(blocks);
            let degree = rng.random_range(1..=max_degree);
            let mut row: Vec<u32> = Vec::with_capacity(degree);
            while row.len() < degree {
                let item = if rng.random_bool(model.in_block) {
                    block + blocks * rng.random_range(0..block_size)
                } else {
                    rng.random_range(0..model.items)
                };
                if !row.contains(&(item as u32)) {
                    row.push(item as u32);
                }
            }
            row
        })
        .collect();
    InteractionGraph::from_rows(model.items, rows)
}
