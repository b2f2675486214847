//! Random decision forest over channel features.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BLANK_CLASS;

/// Internal split node, serialized as `[feature, threshold, left, right]`.
/// A non-negative child is a split index, a negative child `c` refers to
/// leaf `-c - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split(pub u32, pub f32, pub i64, pub i64);

impl Split {
    pub fn feature(&self) -> usize {
        self.0 as usize
    }

    pub fn threshold(&self) -> f32 {
        self.1
    }
}

/// Sparse contour-class histogram: `(label in 1..=150, probability)`.
/// The mass missing from 1 belongs to the no-contour class.
pub type LeafHistogram = Vec<(u16, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub splits: Vec<Split>,
    pub leaves: Vec<LeafHistogram>,
}

impl Tree {
    pub fn leaf_for(&self, features: &[f32]) -> &LeafHistogram {
        if self.splits.is_empty() {
            return &self.leaves[0];
        }
        let mut node = 0usize;
        loop {
            let s = &self.splits[node];
            let child = if features[s.feature()] <= s.threshold() { s.2 } else { s.3 };
            if child < 0 {
                return &self.leaves[(-child - 1) as usize];
            }
            node = child as usize;
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, child: i64) -> usize {
            if child < 0 {
                return 0;
            }
            let s = &t.splits[child as usize];
            1 + walk(t, s.2).max(walk(t, s.3))
        }
        if self.splits.is_empty() {
            0
        } else {
            walk(self, 0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Candidate features per node; 0 selects ⌊√d⌋.
    pub feature_subsample: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 25,
            max_depth: 64,
            min_leaf: 1,
            feature_subsample: 0,
        }
    }
}

/// Row-major training matrix with labels in 1..=151.
pub(crate) struct TrainingSet<'a> {
    pub features: &'a [f32],
    pub dim: usize,
    pub labels: &'a [u8],
}

const N_LABELS: usize = BLANK_CLASS;

pub(crate) fn train_forest(data: &TrainingSet<'_>, params: &ForestParams, seed: u64) -> Vec<Tree> {
    let mtry = if params.feature_subsample == 0 {
        ((data.dim as f64).sqrt().floor() as usize).max(1)
    } else {
        params.feature_subsample.min(data.dim)
    };
    (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64 + 1);
            let n = data.labels.len();
            let mut sample: Vec<u32> = (0..n).map(|_| rng.random_range(0..n as u32)).collect();
            let mut builder = TreeBuilder {
                data,
                params,
                mtry,
                rng,
                tree: Tree {
                    splits: Vec::new(),
                    leaves: Vec::new(),
                },
                scratch: Vec::with_capacity(n),
            };
            builder.grow(&mut sample, 0);
            builder.tree
        })
        .collect()
}

struct TreeBuilder<'a, 'd> {
    data: &'a TrainingSet<'d>,
    params: &'a ForestParams,
    mtry: usize,
    rng: ChaCha8Rng,
    tree: Tree,
    scratch: Vec<(f32, u8)>,
}

struct Candidate {
    feature: usize,
    threshold: f32,
    score: f64,
}

impl TreeBuilder<'_, '_> {
    fn counts(&self, idx: &[u32]) -> [u32; N_LABELS] {
        let mut c = [0u32; N_LABELS];
        for &i in idx {
            c[self.data.labels[i as usize] as usize - 1] += 1;
        }
        c
    }

    fn leaf(&mut self, counts: &[u32; N_LABELS], n: usize) -> i64 {
        let hist: LeafHistogram = counts[..N_LABELS - 1]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| ((k + 1) as u16, f64::from(c) / n as f64))
            .collect();
        self.tree.leaves.push(hist);
        -(self.tree.leaves.len() as i64)
    }

    /// Returns the child reference of the subtree built over `idx`.
    fn grow(&mut self, idx: &mut [u32], depth: usize) -> i64 {
        let n = idx.len();
        let counts = self.counts(idx);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.params.max_depth || n < 2 * self.params.min_leaf.max(1) {
            return self.leaf(&counts, n);
        }
        let Some(best) = self.best_split(idx, &counts) else {
            return self.leaf(&counts, n);
        };
        let dim = self.data.dim;
        let feats = self.data.features;
        let mut lo = 0;
        for k in 0..n {
            if feats[idx[k] as usize * dim + best.feature] <= best.threshold {
                idx.swap(lo, k);
                lo += 1;
            }
        }
        let me = self.tree.splits.len();
        self.tree.splits.push(Split(best.feature as u32, best.threshold, 0, 0));
        let (left, right) = idx.split_at_mut(lo);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.tree.splits[me].2 = l;
        self.tree.splits[me].3 = r;
        me as i64
    }

    /// Maximizes Σ n_c²/n over both children, i.e. minimizes weighted Gini.
    fn best_split(&mut self, idx: &[u32], counts: &[u32; N_LABELS]) -> Option<Candidate> {
        let n = idx.len();
        let min_leaf = self.params.min_leaf.max(1);
        let parent_sq: f64 = counts.iter().map(|&c| f64::from(c) * f64::from(c)).sum();
        let parent_score = parent_sq / n as f64;
        let dim = self.data.dim;
        let feats = self.data.features;
        let labels = self.data.labels;
        let candidates = index::sample(&mut self.rng, dim, self.mtry);
        let mut best: Option<Candidate> = None;
        for f in candidates.iter() {
            let vals = &mut self.scratch;
            vals.clear();
            vals.extend(idx.iter().map(|&i| (feats[i as usize * dim + f], labels[i as usize])));
            vals.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            if vals[0].0 == vals[n - 1].0 {
                continue;
            }
            let mut left = [0u32; N_LABELS];
            let mut right = *counts;
            let mut sq_l = 0.0f64;
            let mut sq_r = parent_sq;
            for i in 0..n - 1 {
                let c = vals[i].1 as usize - 1;
                sq_l += 2.0 * f64::from(left[c]) + 1.0;
                left[c] += 1;
                sq_r -= 2.0 * f64::from(right[c]) - 1.0;
                right[c] -= 1;
                let n_l = i + 1;
                let n_r = n - n_l;
                if n_l < min_leaf || n_r < min_leaf || vals[i].0 == vals[i + 1].0 {
                    continue;
                }
                let score = sq_l / n_l as f64 + sq_r / n_r as f64;
                if score > parent_score + 1e-12 && best.as_ref().is_none_or(|b| score > b.score) {
                    let (a, b) = (vals[i].0, vals[i + 1].0);
                    let mut threshold = 0.5 * (a + b);
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some(Candidate {
                        feature: f,
                        threshold,
                        score,
                    });
                }
            }
        }
        best
    }
}
