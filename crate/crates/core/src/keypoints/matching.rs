use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::descriptor::{within_margin, Descriptor, PATCH_MARGIN};
use super::detector::InterestPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    /// Nearest / second-nearest distance ratio below which a match is kept.
    pub ratio: f64,
    /// Keep only mutual nearest neighbours.
    pub cross_check: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            ratio: 0.7,
            cross_check: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub dx_max: f64,
    pub dy_max: f64,
    pub margin: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            dx_max: 60.0,
            dy_max: 10.0,
            margin: PATCH_MARGIN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub ref_point: (f64, f64),
    pub test_point: (f64, f64),
    pub descriptor_distance: f64,
}

/// Plausible reference → test correspondences, at most one per reference
/// coordinate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchingMatrix {
    pub pairs: Vec<MatchPair>,
}

impl MatchingMatrix {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Nearest-neighbour candidate among test features of the same Laplacian sign.
fn nearest(query: &(InterestPoint, Descriptor), pool: &[(InterestPoint, Descriptor)]) -> Option<(usize, f64, f64)> {
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (j, (p, d)) in pool.iter().enumerate() {
        if p.laplacian != query.0.laplacian {
            continue;
        }
        let dist = query.1.distance(d);
        if dist < best.1 {
            second = best.1;
            best = (j, dist);
        } else if dist < second {
            second = dist;
        }
    }
    (best.0 != usize::MAX).then_some((best.0, best.1, second))
}

fn passes_ratio(best: f64, second: f64, ratio: f64) -> bool {
    if second.is_infinite() {
        return true;
    }
    if second == 0.0 {
        return false;
    }
    best / second < ratio
}

pub fn match_points(
    reference: &[(InterestPoint, Descriptor)],
    test: &[(InterestPoint, Descriptor)],
    ratio: f64,
) -> Vec<MatchPair> {
    match_points_with(
        reference,
        test,
        &MatchConfig {
            ratio,
            cross_check: false,
        },
    )
}

/// Reference → test ratio-test matching; `cross_check` additionally requires
/// the reference point to be the test point's nearest neighbour.
pub fn match_points_with(
    reference: &[(InterestPoint, Descriptor)],
    test: &[(InterestPoint, Descriptor)],
    config: &MatchConfig,
) -> Vec<MatchPair> {
    let mut out = Vec::new();
    for query in reference {
        let Some((j, best, second)) = nearest(query, test) else {
            continue;
        };
        if !passes_ratio(best, second, config.ratio) {
            continue;
        }
        if config.cross_check {
            match nearest(&test[j], reference) {
                Some((_, back, _)) if back >= best => {}
                _ => continue,
            }
        }
        let (p, q) = (&query.0, &test[j].0);
        out.push(MatchPair {
            ref_point: (p.x, p.y),
            test_point: (q.x, q.y),
            descriptor_distance: best,
        });
    }
    out
}

/// Discards implausible displacements and points whose patch would leave the
/// frame. Duplicate reference coordinates keep the closest descriptor.
pub fn filter_matches(
    matches: &[MatchPair],
    frame_dims: (usize, usize),
    limits: (f64, f64),
    margin: f64,
) -> MatchingMatrix {
    let (w, h) = frame_dims;
    let mut kept: Vec<MatchPair> = matches
        .iter()
        .filter(|m| {
            (m.ref_point.0 - m.test_point.0).abs() <= limits.0
                && (m.ref_point.1 - m.test_point.1).abs() <= limits.1
                && within_margin(m.ref_point.0, m.ref_point.1, w, h, margin)
                && within_margin(m.test_point.0, m.test_point.1, w, h, margin)
        })
        .copied()
        .collect();
    // Stable sort keeps detector order among equal distances.
    kept.sort_by(|a, b| a.descriptor_distance.total_cmp(&b.descriptor_distance));
    let mut seen = HashSet::new();
    kept.retain(|m| seen.insert((m.ref_point.0.to_bits(), m.ref_point.1.to_bits())));
    MatchingMatrix { pairs: kept }
}

pub fn filter_with(matches: &[MatchPair], frame_dims: (usize, usize), config: &FilterConfig) -> MatchingMatrix {
    filter_matches(matches, frame_dims, (config.dx_max, config.dy_max), config.margin)
}
