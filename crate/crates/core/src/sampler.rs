//! Sampled graph generation.
//!
//! Every user's item set is drawn independently. A PECO draw starts from a
//! uniformly chosen `floor(r·|N(u)|)` subset of the user's own items, then
//! adds one item at a time until the set is as large as `N(u)`. Each step
//! picks an item outside the set with probability proportional to
//!
//! ```text
//! q(c_u, i) + alpha · mean_{j in set} S(i, j)
//! ```
//!
//! where `q` is the user cluster's [`PreferenceDistribution`] and `S` the
//! item [`ConcurrenceMatrix`]. Any item in the catalog can be drawn, not only
//! ones the user has seen. When every candidate has zero weight the step
//! falls back to a uniform draw.
//!
//! Each user consumes its own random stream, so a sampled graph depends only
//! on `(graph, model, config, seed)` and not on the thread count.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{
    cluster_scores, dbscan, preference, ClusterAssignment, ClusterScoreMatrix, DbscanParams,
    PreferenceDistribution,
};
use crate::error::{Error, Result};
use crate::graph::{InteractionGraph, Side};
use crate::rng::{stream_rng, StreamRng};
use crate::similarity::{
    concurrence_matrix, pairwise_similarity_with, ConcurrenceMatrix, SetScoreAccumulator,
    SimilarityOptions, SparseSimilarity,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Weight of the concurrence term.
    pub alpha: f64,
    /// Fraction of each user's items kept before iterative drawing.
    pub retain: f64,
    pub ensemble_size: usize,
    pub seed: u64,
    /// Draw uniformly when all candidates have zero weight; otherwise fail.
    pub uniform_fallback: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            retain: 0.0,
            ensemble_size: 1,
            seed: 0,
            uniform_fallback: true,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a finite non-negative number, got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.retain) {
            return Err(Error::InvalidParameter(format!(
                "retain fraction must lie in [0, 1], got {}",
                self.retain
            )));
        }
        if self.ensemble_size == 0 {
            return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_preset(mut self, preset: Preset) -> Self {
        self.alpha = preset.alpha();
        self.retain = preset.retain();
        self
    }
}

/// Tuned `(alpha, retain)` settings for the public benchmark datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    AmazonBeauty,
    MovieLens1m,
    Yelp2018,
    AmazonCds,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::AmazonBeauty,
        Preset::MovieLens1m,
        Preset::Yelp2018,
        Preset::AmazonCds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::AmazonBeauty => "amazon-beauty",
            Preset::MovieLens1m => "movielens-1m",
            Preset::Yelp2018 => "yelp2018",
            Preset::AmazonCds => "amazon-cds",
        }
    }

    pub fn alpha(self) -> f64 {
        match self {
            Preset::AmazonBeauty => 1000.0,
            Preset::MovieLens1m => 0.0,
            Preset::Yelp2018 => 100.0,
            Preset::AmazonCds => 10.0,
        }
    }

    pub fn retain(self) -> f64 {
        match self {
            Preset::Yelp2018 => 0.5,
            _ => 0.0,
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown preset `{s}` (expected amazon-beauty, movielens-1m, yelp2018 or amazon-cds)"
                ))
            })
    }
}

/// Clustering and truncation settings used to fit a [`PecoModel`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelOptions {
    pub users: DbscanParams,
    pub items: DbscanParams,
    /// Per-item truncation of the concurrence matrix.
    pub topk: Option<usize>,
}

/// Everything the sampler needs from the observed graph.
#[derive(Debug)]
pub struct PecoModel {
    user_clusters: ClusterAssignment,
    item_clusters: ClusterAssignment,
    scores: ClusterScoreMatrix,
    preference: PreferenceDistribution,
    concurrence: ConcurrenceMatrix,
}

impl PecoModel {
    /// Clusters both sides with DBSCAN and derives preference and concurrence.
    pub fn fit(g: &InteractionGraph, opts: ModelOptions) -> Result<Self> {
        let users = cluster_side(g, Side::Users, opts.users)?;
        let items = cluster_side(g, Side::Items, opts.items)?;
        let concurrence = concurrence_matrix(g, opts.topk);
        Self::from_parts(g, users, items, concurrence)
    }

    pub fn from_parts(
        g: &InteractionGraph,
        user_clusters: ClusterAssignment,
        item_clusters: ClusterAssignment,
        concurrence: ConcurrenceMatrix,
    ) -> Result<Self> {
        if concurrence.num_items() != g.num_items() {
            return Err(Error::DimensionMismatch {
                side: Side::Items,
                expected: g.num_items(),
                actual: concurrence.num_items(),
            });
        }
        let scores = cluster_scores(g, &user_clusters, &item_clusters)?;
        let preference = preference(&scores, &item_clusters, &g.degrees(Side::Items))?;
        Ok(Self {
            user_clusters,
            item_clusters,
            scores,
            preference,
            concurrence,
        })
    }

    pub fn user_clusters(&self) -> &ClusterAssignment {
        &self.user_clusters
    }

    pub fn item_clusters(&self) -> &ClusterAssignment {
        &self.item_clusters
    }

    pub fn scores(&self) -> &ClusterScoreMatrix {
        &self.scores
    }

    pub fn preference(&self) -> &PreferenceDistribution {
        &self.preference
    }

    pub fn concurrence(&self) -> &ConcurrenceMatrix {
        &self.concurrence
    }

    /// Preference weights for `user`'s cluster.
    pub fn user_preference(&self, user: usize) -> &[(u32, f64)] {
        self.preference
            .row(self.user_clusters.cluster_of(user) as usize)
    }
}

/// DBSCAN over one side. Only pairs that can be eps-neighbors are kept.
pub fn cluster_side(
    g: &InteractionGraph,
    side: Side,
    params: DbscanParams,
) -> Result<ClusterAssignment> {
    params.validate()?;
    let sim = pairwise_similarity_with(
        g,
        side,
        SimilarityOptions {
            min_score: params.min_score(),
            topk: None,
        },
    );
    dbscan(&sim, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMethod {
    Peco,
    NodeCopy,
}

/// How a sampled graph was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: SamplingMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub seed: u64,
    /// Content hash of the source graph's canonical edge list.
    pub source_hash: String,
}

#[derive(Debug, Clone)]
pub struct SampledGraph {
    pub graph: InteractionGraph,
    pub provenance: Provenance,
}

/// Per-thread buffers reused across users.
struct Scratch {
    in_set: Vec<bool>,
    listed: Vec<bool>,
    pref: Vec<f64>,
    candidates: Vec<u32>,
    acc: SetScoreAccumulator,
    chosen: Vec<u32>,
}

impl Scratch {
    fn new(num_items: usize) -> Self {
        Self {
            in_set: vec![false; num_items],
            listed: vec![false; num_items],
            pref: vec![0.0; num_items],
            candidates: Vec::new(),
            acc: SetScoreAccumulator::new(num_items),
            chosen: Vec::new(),
        }
    }

    fn list(&mut self, item: u32) {
        if !self.listed[item as usize] {
            self.listed[item as usize] = true;
            self.candidates.push(item);
        }
    }

    fn add(&mut self, s: &ConcurrenceMatrix, item: u32) {
        self.in_set[item as usize] = true;
        self.chosen.push(item);
        let before = self.acc.touched().len();
        self.acc.insert(s, item);
        for k in before..self.acc.touched().len() {
            let i = self.acc.touched()[k];
            self.list(i);
        }
    }

    fn reset(&mut self) {
        for &i in &self.candidates {
            self.listed[i as usize] = false;
            self.pref[i as usize] = 0.0;
        }
        for &i in &self.chosen {
            self.in_set[i as usize] = false;
        }
        self.candidates.clear();
        self.chosen.clear();
        self.acc.clear();
    }
}

/// Draws one user's sampled item set, returned sorted.
pub fn peco_sample_user(
    user: usize,
    g: &InteractionGraph,
    model: &PecoModel,
    cfg: &SamplerConfig,
    rng: &mut StreamRng,
) -> Result<Vec<u32>> {
    let mut set = peco_draw_order(user, g, model, cfg, rng)?;
    set.sort_unstable();
    Ok(set)
}

/// Like [`peco_sample_user`] but in the order items entered the set: the
/// retained items first, then each draw.
pub fn peco_draw_order(
    user: usize,
    g: &InteractionGraph,
    model: &PecoModel,
    cfg: &SamplerConfig,
    rng: &mut StreamRng,
) -> Result<Vec<u32>> {
    let mut scratch = Scratch::new(g.num_items());
    sample_user_into(user, g, model, cfg, rng, &mut scratch)
}

fn sample_user_into(
    user: usize,
    g: &InteractionGraph,
    model: &PecoModel,
    cfg: &SamplerConfig,
    rng: &mut StreamRng,
    scratch: &mut Scratch,
) -> Result<Vec<u32>> {
    let own = g.items_of(user);
    let target = own.len();
    let num_items = g.num_items();
    if target == 0 {
        return Ok(Vec::new());
    }
    if target >= num_items {
        return Ok((0..num_items as u32).collect());
    }

    let s = model.concurrence();
    let result = (|| {
        for &(i, w) in model.user_preference(user) {
            scratch.pref[i as usize] = w;
            scratch.list(i);
        }
        let keep = ((cfg.retain * target as f64 + 1e-9).floor() as usize).min(target);
        for idx in index::sample(rng, target, keep) {
            scratch.add(s, own[idx]);
        }

        while scratch.chosen.len() < target {
            let next = draw_weighted(scratch, cfg.alpha, rng).map_or_else(
                || {
                    if cfg.uniform_fallback {
                        Ok(draw_uniform(scratch, num_items, rng))
                    } else {
                        Err(Error::ZeroMass { user: user as u32 })
                    }
                },
                Ok,
            )?;
            scratch.add(s, next);
        }
        Ok(scratch.chosen.clone())
    })();
    scratch.reset();
    result
}

/// One draw proportional to `pref + alpha · set_score` over listed items
/// outside the set. Items that are not listed have zero weight. `None` when
/// the total mass is zero.
fn draw_weighted(scratch: &Scratch, alpha: f64, rng: &mut StreamRng) -> Option<u32> {
    let weight = |i: u32| -> f64 {
        if scratch.in_set[i as usize] {
            0.0
        } else {
            scratch.pref[i as usize] + alpha * scratch.acc.score(i as usize)
        }
    };
    let total: f64 = scratch.candidates.iter().map(|&i| weight(i)).sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for &i in &scratch.candidates {
        let w = weight(i);
        if w > 0.0 {
            cumulative += w;
            last_positive = Some(i);
            if cumulative > target {
                return Some(i);
            }
        }
    }
    // rounding left `target` just past the accumulated mass
    last_positive
}

/// Uniform draw over items outside the set.
fn draw_uniform(scratch: &Scratch, num_items: usize, rng: &mut StreamRng) -> u32 {
    let free = num_items - scratch.chosen.len();
    if scratch.chosen.len() * 2 < num_items {
        loop {
            let i = rng.random_range(0..num_items);
            if !scratch.in_set[i] {
                return i as u32;
            }
        }
    }
    let k = rng.random_range(0..free);
    (0..num_items)
        .filter(|&i| !scratch.in_set[i])
        .nth(k)
        .expect("k is below the number of free items") as u32
}

/// Samples a full graph: every user gets an item set of its original size.
pub fn peco_sample_graph(
    g: &InteractionGraph,
    model: &PecoModel,
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<SampledGraph> {
    cfg.validate()?;
    let rows = (0..g.num_users())
        .into_par_iter()
        .map_init(
            || Scratch::new(g.num_items()),
            |scratch, u| {
                let mut rng = stream_rng(seed, u as u64);
                let mut set = sample_user_into(u, g, model, cfg, &mut rng, scratch)?;
                set.sort_unstable();
                Ok(set)
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledGraph {
        graph: rebuild(g, rows)?,
        provenance: Provenance {
            method: SamplingMethod::Peco,
            alpha: Some(cfg.alpha),
            retain: Some(cfg.retain),
            epsilon: None,
            seed,
            source_hash: g.content_hash(),
        },
    })
}

fn rebuild(g: &InteractionGraph, rows: Vec<Vec<u32>>) -> Result<InteractionGraph> {
    let graph = InteractionGraph::from_rows(g.num_items(), rows)?;
    Ok(match g.labels() {
        Some(labels) => graph.with_labels(labels.clone()),
        None => graph,
    })
}

/// Node-copy baseline: with probability `epsilon` a user's items are replaced
/// by those of a donor drawn proportionally to user similarity. Users with no
/// similar user keep their own items.
pub fn node_copy_sample(
    g: &InteractionGraph,
    user_sim: &SparseSimilarity,
    epsilon: f64,
    seed: u64,
) -> Result<SampledGraph> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "copy probability must lie in [0, 1], got {epsilon}"
        )));
    }
    if user_sim.side() != Side::Users || user_sim.num_nodes() != g.num_users() {
        return Err(Error::DimensionMismatch {
            side: Side::Users,
            expected: g.num_users(),
            actual: user_sim.num_nodes(),
        });
    }
    let rows: Vec<Vec<u32>> = (0..g.num_users())
        .into_par_iter()
        .map(|u| {
            let mut rng = stream_rng(seed, u as u64);
            let donor = if rng.random_bool(epsilon) {
                pick_donor(user_sim, u, &mut rng)
            } else {
                None
            };
            g.items_of(donor.unwrap_or(u)).to_vec()
        })
        .collect();
    Ok(SampledGraph {
        graph: rebuild(g, rows)?,
        provenance: Provenance {
            method: SamplingMethod::NodeCopy,
            alpha: None,
            retain: None,
            epsilon: Some(epsilon),
            seed,
            source_hash: g.content_hash(),
        },
    })
}

fn pick_donor(sim: &SparseSimilarity, user: usize, rng: &mut StreamRng) -> Option<usize> {
    let (donors, scores) = sim.row(user);
    let total: f64 = scores.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut cumulative = 0.0;
    for (&v, &s) in donors.iter().zip(scores) {
        cumulative += s;
        if cumulative > target {
            return Some(v as usize);
        }
    }
    donors.last().map(|&v| v as usize)
}

/// `ensemble_size` sampled graphs with seeds `seed, seed + 1, …`.
pub fn generate_ensemble(
    g: &InteractionGraph,
    model: &PecoModel,
    cfg: &SamplerConfig,
) -> Result<Vec<SampledGraph>> {
    cfg.validate()?;
    (0..cfg.ensemble_size)
        .map(|k| {
            peco_sample_graph(g, model, cfg, member_seed(cfg.seed, k)).map_err(|e| Error::Sample {
                index: k,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn member_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// Written alongside an ensemble as `provenance.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleProvenance {
    pub method: SamplingMethod,
    pub config: SamplerConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub source_hash: String,
    pub samples: Vec<SampleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub file: String,
    pub seed: u64,
    pub hash: String,
}

pub fn sample_file_name(index: usize) -> String {
    format!("sample_{index}.tsv")
}

/// Samples and writes the ensemble one graph at a time as
/// `dir/sample_<k>.tsv`, then writes `dir/provenance.json`.
pub fn write_ensemble(
    g: &InteractionGraph,
    model: &PecoModel,
    cfg: &SamplerConfig,
    dir: &Path,
) -> Result<EnsembleProvenance> {
    cfg.validate()?;
    stream_ensemble(g, cfg, SamplingMethod::Peco, None, dir, |seed| {
        peco_sample_graph(g, model, cfg, seed)
    })
}

/// Node-copy counterpart of [`write_ensemble`].
pub fn write_node_copy_ensemble(
    g: &InteractionGraph,
    user_sim: &SparseSimilarity,
    epsilon: f64,
    cfg: &SamplerConfig,
    dir: &Path,
) -> Result<EnsembleProvenance> {
    cfg.validate()?;
    stream_ensemble(g, cfg, SamplingMethod::NodeCopy, Some(epsilon), dir, |seed| {
        node_copy_sample(g, user_sim, epsilon, seed)
    })
}

fn stream_ensemble(
    g: &InteractionGraph,
    cfg: &SamplerConfig,
    method: SamplingMethod,
    epsilon: Option<f64>,
    dir: &Path,
    mut sample: impl FnMut(u64) -> Result<SampledGraph>,
) -> Result<EnsembleProvenance> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut samples = Vec::with_capacity(cfg.ensemble_size);
    for k in 0..cfg.ensemble_size {
        let seed = member_seed(cfg.seed, k);
        let wrap = |e| Error::Sample {
            index: k,
            source: Box::new(e),
        };
        let sampled = sample(seed).map_err(wrap)?;
        let file = sample_file_name(k);
        let bytes = sampled.graph.to_canonical_bytes();
        let path = dir.join(&file);
        fs::write(&path, &bytes).map_err(|e| wrap(Error::io(&path, e)))?;
        samples.push(SampleRecord {
            file,
            seed,
            hash: crate::cli::manifest::sha256_hex(&bytes),
        });
    }
    let provenance = EnsembleProvenance {
        method,
        config: *cfg,
        epsilon,
        source_hash: g.content_hash(),
        samples,
    };
    let path = dir.join("provenance.json");
    let json = serde_json::to_string_pretty(&provenance)? + "\n";
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(provenance)
}

pub fn read_provenance(dir: &Path) -> Result<EnsembleProvenance> {
    let path = dir.join("provenance.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Paths of the ensemble members listed in `dir/provenance.json`.
pub fn ensemble_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(read_provenance(dir)?
        .samples
        .into_iter()
        .map(|s| dir.join(s.file))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::t1;
    use crate::similarity::pairwise_similarity;

    fn t1_model() -> PecoModel {
        let g = t1();
        PecoModel::from_parts(
            &g,
            ClusterAssignment::from_labels(Side::Users, &[0, 0, 1]),
            ClusterAssignment::from_labels(Side::Items, &[0, 0, 1, 1]),
            concurrence_matrix(&g, None),
        )
        .unwrap()
    }

    fn cfg(alpha: f64, retain: f64) -> SamplerConfig {
        SamplerConfig {
            alpha,
            retain,
            ..SamplerConfig::default()
        }
    }

    #[test]
    fn full_retain_reproduces_user() {
        let g = t1();
        let model = t1_model();
        for seed in 0..20 {
            let mut rng = stream_rng(seed, 0);
            for u in 0..3 {
                let set = peco_sample_user(u, &g, &model, &cfg(5.0, 1.0), &mut rng).unwrap();
                assert_eq!(set, g.items_of(u));
            }
        }
    }

    #[test]
    fn full_retain_graph_is_identity() {
        let g = t1();
        let s = peco_sample_graph(&g, &t1_model(), &cfg(3.0, 1.0), 11).unwrap();
        assert!(s.graph.same_edges(&g));
    }

    #[test]
    fn sampled_sets_have_original_size() {
        let g = t1();
        let model = t1_model();
        for seed in 0..50 {
            let s = peco_sample_graph(&g, &model, &cfg(10.0, 0.0), seed).unwrap();
            assert_eq!(s.graph.degrees(Side::Users), g.degrees(Side::Users));
            assert_eq!(s.graph.num_items(), g.num_items());
        }
    }

    #[test]
    fn first_draw_follows_preference() {
        // alpha = 0, retain = 0: the first item of user 0 is drawn from q.
        let g = InteractionGraph::from_rows(4, vec![vec![0], vec![1, 2], vec![2, 3]]).unwrap();
        let model = PecoModel::from_parts(
            &g,
            ClusterAssignment::from_labels(Side::Users, &[0, 0, 1]),
            ClusterAssignment::from_labels(Side::Items, &[0, 0, 1, 1]),
            concurrence_matrix(&g, None),
        )
        .unwrap();
        let q = model.preference().to_dense(0);
        let trials = 20_000;
        let mut counts = [0usize; 4];
        let mut rng = stream_rng(3, 0);
        for _ in 0..trials {
            let set = peco_sample_user(0, &g, &model, &cfg(0.0, 0.0), &mut rng).unwrap();
            counts[set[0] as usize] += 1;
        }
        for i in 0..4 {
            let p = q[i];
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let freq = counts[i] as f64 / trials as f64;
            assert!((freq - p).abs() <= 4.0 * sigma + 1e-12, "item {i}: {freq} vs {p}");
        }
    }

    #[test]
    fn large_alpha_follows_concurrence() {
        let g = t1();
        let model = t1_model();
        // user 0 (items 0, 1) with retain 0.5 starts from one of its own
        // items; the next draw goes to that item's strongest partner.
        let mut hits = 0;
        let trials = 2_000;
        let mut rng = stream_rng(5, 0);
        for _ in 0..trials {
            let set = peco_sample_user(0, &g, &model, &cfg(1e6, 0.5), &mut rng).unwrap();
            if set == [0, 1] {
                hits += 1;
            }
        }
        // from item 1 the pair (1, 0) scores 1/2 against (1, 2) at 1/3
        assert!(hits > trials / 2);
    }

    #[test]
    fn uniform_fallback_when_preference_is_exhausted() {
        // user 0 must draw two items while its cluster's preference, fitted
        // on a sparser graph, covers only item 0 and no concurrence exists
        let g = InteractionGraph::from_rows(3, vec![vec![0, 1], vec![2]]).unwrap();
        let pref_source = InteractionGraph::from_rows(3, vec![vec![0], vec![2]]).unwrap();
        let model = PecoModel::from_parts(
            &pref_source,
            ClusterAssignment::singletons(Side::Users, 2),
            ClusterAssignment::singletons(Side::Items, 3),
            concurrence_matrix(&pref_source, None),
        )
        .unwrap();
        let mut seen = [0usize; 3];
        let mut rng = stream_rng(8, 0);
        for _ in 0..400 {
            let set = peco_sample_user(0, &g, &model, &cfg(0.0, 0.0), &mut rng).unwrap();
            assert_eq!(set.len(), 2);
            assert!(set.contains(&0));
            for i in set {
                seen[i as usize] += 1;
            }
        }
        assert!(seen[1] > 100 && seen[2] > 100);

        let strict = SamplerConfig {
            uniform_fallback: false,
            ..cfg(0.0, 0.0)
        };
        assert!(matches!(
            peco_sample_user(0, &g, &model, &strict, &mut rng),
            Err(Error::ZeroMass { user: 0 })
        ));
    }

    #[test]
    fn user_with_every_item_keeps_them() {
        let g = InteractionGraph::from_rows(2, vec![vec![0, 1], vec![0]]).unwrap();
        let model = PecoModel::fit(&g, ModelOptions::default()).unwrap();
        let mut rng = stream_rng(0, 0);
        assert_eq!(peco_sample_user(0, &g, &model, &cfg(1.0, 0.0), &mut rng).unwrap(), [0, 1]);
    }

    #[test]
    fn invalid_config() {
        assert!(cfg(-1.0, 0.0).validate().is_err());
        assert!(cfg(0.0, 1.5).validate().is_err());
        assert!(SamplerConfig {
            ensemble_size: 0,
            ..SamplerConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn presets() {
        let table = [
            ("amazon-beauty", 1000.0, 0.0),
            ("movielens-1m", 0.0, 0.0),
            ("yelp2018", 100.0, 0.5),
            ("amazon-cds", 10.0, 0.0),
        ];
        for (name, alpha, retain) in table {
            let p: Preset = name.parse().unwrap();
            assert_eq!((p.alpha(), p.retain()), (alpha, retain));
            assert_eq!(p.name(), name);
        }
        assert!("netflix".parse::<Preset>().is_err());
    }

    #[test]
    fn node_copy_identity_and_forced_copy() {
        let g = t1();
        let sim = pairwise_similarity(&g, Side::Users);
        let same = node_copy_sample(&g, &sim, 0.0, 4).unwrap();
        assert!(same.graph.same_edges(&g));

        for seed in 0..20 {
            let copied = node_copy_sample(&g, &sim, 1.0, seed).unwrap();
            // user 0's only similar user is user 1
            assert_eq!(copied.graph.items_of(0), &[1, 2]);
        }
    }

    #[test]
    fn node_copy_can_change_user_degree() {
        let g = InteractionGraph::from_rows(3, vec![vec![0], vec![0, 1, 2]]).unwrap();
        let sim = pairwise_similarity(&g, Side::Users);
        let copied = node_copy_sample(&g, &sim, 1.0, 0).unwrap();
        assert_eq!(copied.graph.items_of(0).len(), 3);
        assert_eq!(copied.graph.items_of(1).len(), 1);
    }

    #[test]
    fn provenance_round_trips() {
        let g = t1();
        let s = peco_sample_graph(&g, &t1_model(), &cfg(2.5, 0.25), 77).unwrap();
        let json = serde_json::to_string(&s.provenance).unwrap();
        let back: Provenance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s.provenance);
        assert_eq!(back.source_hash, g.content_hash());
    }

    #[test]
    fn ensemble_members_use_consecutive_seeds() {
        let g = t1();
        let model = t1_model();
        let c = SamplerConfig {
            ensemble_size: 3,
            seed: 40,
            ..cfg(1.0, 0.0)
        };
        let ens = generate_ensemble(&g, &model, &c).unwrap();
        let seeds: Vec<u64> = ens.iter().map(|s| s.provenance.seed).collect();
        assert_eq!(seeds, [40, 41, 42]);
        let direct = peco_sample_graph(&g, &model, &c, 41).unwrap();
        assert_eq!(direct.graph, ens[1].graph);

        let dir = tempfile::tempdir().unwrap();
        let prov = write_ensemble(&g, &model, &c, dir.path()).unwrap();
        assert_eq!(read_provenance(dir.path()).unwrap(), prov);
        let paths = ensemble_paths(dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let back = crate::graph::read_canonical(&paths[1]).unwrap();
        assert!(back.same_edges(&ens[1].graph));
    }
}
