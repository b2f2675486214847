use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channels::{extract_channel_features, patch_features, ChannelFeatures, FeatureConfig};
use super::corpus::LabeledPatchCorpus;
use super::forest::{train_forest, ForestParams, TrainingSet, Tree};
use super::vector::StVector;
use super::{SketchError, N_CLASSES, N_CONTOUR_CLASSES};
use crate::video::Frame;

pub const CODEBOOK_VERSION: u32 = 1;
/// Corpus size per class used by [`train_default_codebook`].
pub const DEFAULT_PATCHES_PER_CLASS: usize = 40;

/// Trained contour classifier: a forest whose leaves hold contour-class
/// frequencies; the no-contour probability is the complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StCodebook {
    pub version: u32,
    pub n_classes: usize,
    pub feature_config: FeatureConfig,
    pub train_seed: u64,
    pub trees: Vec<Tree>,
}

impl StCodebook {
    pub fn validate(&self) -> Result<(), SketchError> {
        let bad = |m: String| Err(SketchError::InvalidCodebook(m));
        if self.version != CODEBOOK_VERSION {
            return Err(SketchError::VersionMismatch {
                found: self.version,
                expected: CODEBOOK_VERSION,
            });
        }
        if self.n_classes != N_CLASSES {
            return bad(format!("n_classes {} != {N_CLASSES}", self.n_classes));
        }
        if self.feature_config != FeatureConfig::default() {
            return bad("unsupported feature configuration".into());
        }
        if self.trees.is_empty() {
            return bad("no trees".into());
        }
        let dim = self.feature_config.feature_len();
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.leaves.is_empty() {
                return bad(format!("tree {t} has no leaves"));
            }
            for (i, s) in tree.splits.iter().enumerate() {
                if s.feature() >= dim {
                    return bad(format!("tree {t} split {i}: feature {} out of range", s.0));
                }
                if !s.1.is_finite() {
                    return bad(format!("tree {t} split {i}: non-finite threshold"));
                }
                for child in [s.2, s.3] {
                    let ok = if child < 0 {
                        ((-child - 1) as usize) < tree.leaves.len()
                    } else {
                        // children strictly after parents keeps the graph acyclic
                        (child as usize) > i && (child as usize) < tree.splits.len()
                    };
                    if !ok {
                        return bad(format!("tree {t} split {i}: bad child {child}"));
                    }
                }
            }
            for (l, leaf) in tree.leaves.iter().enumerate() {
                let mut sum = 0.0;
                for &(label, p) in leaf {
                    if label == 0 || usize::from(label) > N_CONTOUR_CLASSES || !(0.0..=1.0).contains(&p) {
                        return bad(format!("tree {t} leaf {l}: entry ({label}, {p})"));
                    }
                    sum += p;
                }
                if sum > 1.0 + 1e-9 {
                    return bad(format!("tree {t} leaf {l}: mass {sum} > 1"));
                }
            }
        }
        Ok(())
    }

    /// Averages leaf histograms over trees. Per-class contributions are summed
    /// in sorted order, so the result does not depend on tree order.
    pub fn classify(&self, features: &ChannelFeatures) -> StVector<f64> {
        let mut entries: Vec<(u16, f64)> = Vec::with_capacity(self.trees.len() * 2);
        for tree in &self.trees {
            entries.extend_from_slice(tree.leaf_for(&features.values));
        }
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut contour = vec![0.0f64; N_CONTOUR_CLASSES];
        for (label, p) in entries {
            contour[usize::from(label) - 1] += p;
        }
        let n = self.trees.len() as f64;
        contour.iter_mut().for_each(|v| *v /= n);
        StVector::from_contour_probabilities(&contour)
    }

    pub fn classify_patch(&self, patch: &[u8]) -> StVector<f64> {
        self.classify(&patch_features(patch))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("codebook serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SketchError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| SketchError::Corrupt(e.to_string()))?;
        let version = value
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| SketchError::Corrupt("missing version".into()))?;
        if version != u64::from(CODEBOOK_VERSION) {
            return Err(SketchError::VersionMismatch {
                found: version as u32,
                expected: CODEBOOK_VERSION,
            });
        }
        let cb: StCodebook = serde_json::from_value(value).map_err(|e| SketchError::Corrupt(e.to_string()))?;
        cb.validate()?;
        Ok(cb)
    }
}

/// Contour vector of the 35×35 patch centred at `center`.
pub fn st_vector(codebook: &StCodebook, frame: &Frame, center: (usize, usize)) -> Result<StVector<f64>, SketchError> {
    let features = extract_channel_features(frame, center)?;
    Ok(codebook.classify(&features))
}

/// Trains a codebook on the corpus; every label 1..=151 needs two examples.
pub fn train_codebook(corpus: &LabeledPatchCorpus, params: &ForestParams, seed: u64) -> Result<StCodebook, SketchError> {
    if params.n_trees == 0 {
        return Err(SketchError::InvalidParams("n_trees must be at least 1".into()));
    }
    let counts = corpus.class_counts();
    if let Some((label, &count)) = counts.iter().enumerate().skip(1).find(|(_, &c)| c < 2) {
        return Err(SketchError::CorpusTooSmall { label, count });
    }
    if corpus.patches.iter().any(|p| p.label == 0 || p.label > N_CLASSES) {
        return Err(SketchError::InvalidParams("corpus label outside 1..=151".into()));
    }
    let config = FeatureConfig::default();
    let dim = config.feature_len();
    let rows: Vec<Vec<f32>> = corpus
        .patches
        .par_iter()
        .map(|p| patch_features(&p.pixels).values)
        .collect();
    let mut features = Vec::with_capacity(rows.len() * dim);
    for r in rows {
        features.extend_from_slice(&r);
    }
    let labels: Vec<u8> = corpus.patches.iter().map(|p| p.label as u8).collect();
    let data = TrainingSet {
        features: &features,
        dim,
        labels: &labels,
    };
    let trees = train_forest(&data, params, seed);
    Ok(StCodebook {
        version: CODEBOOK_VERSION,
        n_classes: N_CLASSES,
        feature_config: config,
        train_seed: seed,
        trees,
    })
}

/// Generates the synthetic corpus with `seed` and trains a forest with the
/// default parameters, also seeded by `seed`.
pub fn train_default_codebook(seed: u64) -> Result<StCodebook, SketchError> {
    let corpus = super::corpus::generate_synthetic_corpus(N_CLASSES, DEFAULT_PATCHES_PER_CLASS, seed)?;
    train_codebook(&corpus, &ForestParams::default(), seed)
}

pub fn save_codebook(codebook: &StCodebook, path: impl AsRef<Path>) -> Result<(), SketchError> {
    let path = path.as_ref();
    fs::write(path, codebook.to_json()).map_err(|e| SketchError::Io(format!("{}: {e}", path.display())))
}

pub fn load_codebook(path: impl AsRef<Path>) -> Result<StCodebook, SketchError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| SketchError::Io(format!("{}: {e}", path.display())))?;
    StCodebook::from_json(&text)
}
