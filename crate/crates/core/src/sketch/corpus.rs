//! Procedural contour-patch corpus used to train codebooks.
//!
//! Labels 1..=150 are parametric contour shapes, 151 is the textureless class:
//!
//! | labels  | shape                                                        |
//! |---------|--------------------------------------------------------------|
//! | 1–24    | straight line, 12 directions (15° steps) × offsets {0, 7} px  |
//! | 25–60   | half-circle arc, radii {8, 14, 24} × 12 normals (30° steps)   |
//! | 61–96   | corner, openings {60°, 90°, 120°} × 12 directions (30° steps) |
//! | 97–108  | T-junction, 12 stem directions (30° steps)                    |
//! | 109–120 | line ending at the centre, 12 directions (30° steps)          |
//! | 121–132 | parallel pair 10 px apart, 12 directions (15° steps)          |
//! | 133–136 | Y-junction, 4 rotations (30° steps)                           |
//! | 137–142 | right-angle crossing, 6 rotations (15° steps)                 |
//! | 143–150 | small arc, radius 5, 8 normals (45° steps)                    |
//! | 151     | no contour: flat field with a faint ramp                     |
//!
//! Each sample is anti-aliased and jittered in background level, stroke
//! contrast, polarity and width, then corrupted with Gaussian noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::channels::{CHANNEL_LEN, PATCH_RADIUS, PATCH_SIZE};
use super::{SketchError, BLANK_CLASS, N_CLASSES, N_CONTOUR_CLASSES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourShape {
    Line { angle_deg: f64, offset: f64 },
    Arc { radius: f64, normal_deg: f64 },
    Corner { angle_deg: f64, opening_deg: f64 },
    TJunction { stem_deg: f64 },
    Ray { angle_deg: f64 },
    Parallel { angle_deg: f64 },
    YJunction { angle_deg: f64 },
    Cross { angle_deg: f64 },
    Blank,
}

/// The 150 contour classes in label order (label = position + 1).
pub fn contour_catalog() -> Vec<ContourShape> {
    use ContourShape::*;
    let mut c = Vec::with_capacity(N_CONTOUR_CLASSES);
    for a in 0..12 {
        for offset in [0.0, 7.0] {
            c.push(Line { angle_deg: 15.0 * f64::from(a), offset });
        }
    }
    for radius in [8.0, 14.0, 24.0] {
        for n in 0..12 {
            c.push(Arc { radius, normal_deg: 30.0 * f64::from(n) });
        }
    }
    for opening_deg in [60.0, 90.0, 120.0] {
        for a in 0..12 {
            c.push(Corner { angle_deg: 30.0 * f64::from(a), opening_deg });
        }
    }
    c.extend((0..12).map(|a| TJunction { stem_deg: 30.0 * f64::from(a) }));
    c.extend((0..12).map(|a| Ray { angle_deg: 30.0 * f64::from(a) }));
    c.extend((0..12).map(|a| Parallel { angle_deg: 15.0 * f64::from(a) }));
    c.extend((0..4).map(|a| YJunction { angle_deg: 30.0 * f64::from(a) }));
    c.extend((0..6).map(|a| Cross { angle_deg: 15.0 * f64::from(a) }));
    c.extend((0..8).map(|n| Arc { radius: 5.0, normal_deg: 45.0 * f64::from(n) }));
    debug_assert_eq!(c.len(), N_CONTOUR_CLASSES);
    c
}

/// Shape for a label in 1..=151.
pub fn shape_for_label(label: usize) -> Option<ContourShape> {
    match label {
        BLANK_CLASS => Some(ContourShape::Blank),
        1..=150 => Some(contour_catalog()[label - 1]),
        _ => None,
    }
}

/// Label of the centred vertical line.
pub fn vertical_line_label() -> usize {
    contour_catalog()
        .iter()
        .position(|s| *s == ContourShape::Line { angle_deg: 90.0, offset: 0.0 })
        .expect("catalog contains the vertical line")
        + 1
}

type V2 = (f64, f64);

fn dir(deg: f64) -> V2 {
    let r = deg.to_radians();
    (r.cos(), r.sin())
}

fn dot(a: V2, b: V2) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

fn norm(a: V2) -> f64 {
    dot(a, a).sqrt()
}

fn line_dist(p: V2, deg: f64, offset: f64) -> f64 {
    let d = dir(deg);
    (dot(p, (-d.1, d.0)) - offset).abs()
}

fn ray_dist(p: V2, deg: f64) -> f64 {
    let d = dir(deg);
    if dot(p, d) < 0.0 {
        norm(p)
    } else {
        dot(p, (-d.1, d.0)).abs()
    }
}

/// Distance to the half circle through the origin whose centre lies at
/// `radius` along `normal_deg`.
fn arc_dist(p: V2, radius: f64, normal_deg: f64) -> f64 {
    let n = dir(normal_deg);
    let o = (n.0 * radius, n.1 * radius);
    let rel = (p.0 - o.0, p.1 - o.1);
    let back = (-n.0, -n.1);
    if dot(rel, back) >= 0.0 {
        (norm(rel) - radius).abs()
    } else {
        // End points of the half circle lie perpendicular to the normal.
        let e1 = (o.0 - n.1 * radius, o.1 + n.0 * radius);
        let e2 = (o.0 + n.1 * radius, o.1 - n.0 * radius);
        norm((p.0 - e1.0, p.1 - e1.1)).min(norm((p.0 - e2.0, p.1 - e2.1)))
    }
}

impl ContourShape {
    /// Distance from `p` (relative to the patch centre) to the contour.
    pub fn distance(&self, p: (f64, f64)) -> f64 {
        use ContourShape::*;
        match *self {
            Line { angle_deg, offset } => line_dist(p, angle_deg, offset),
            Arc { radius, normal_deg } => arc_dist(p, radius, normal_deg),
            Corner { angle_deg, opening_deg } => ray_dist(p, angle_deg).min(ray_dist(p, angle_deg + opening_deg)),
            TJunction { stem_deg } => ray_dist(p, stem_deg).min(line_dist(p, stem_deg + 90.0, 0.0)),
            Ray { angle_deg } => ray_dist(p, angle_deg),
            Parallel { angle_deg } => line_dist(p, angle_deg, -5.0).min(line_dist(p, angle_deg, 5.0)),
            YJunction { angle_deg } => (0..3)
                .map(|k| ray_dist(p, angle_deg + 120.0 * f64::from(k)))
                .fold(f64::INFINITY, f64::min),
            Cross { angle_deg } => line_dist(p, angle_deg, 0.0).min(line_dist(p, angle_deg + 90.0, 0.0)),
            Blank => f64::INFINITY,
        }
    }
}

/// Per-sample rendering jitter.
#[derive(Debug, Clone, Copy)]
pub struct RenderStyle {
    pub background: f64,
    /// Signed stroke contrast in gray levels.
    pub contrast: f64,
    pub width: f64,
    pub noise_sigma: f64,
    /// Ramp for the blank class, gray levels across the patch (x, y).
    pub ramp: (f64, f64),
}

impl RenderStyle {
    pub fn random(rng: &mut impl Rng) -> Self {
        let polarity = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        Self {
            background: rng.random_range(50.0..200.0),
            contrast: polarity * rng.random_range(50.0..110.0),
            width: rng.random_range(1.5..2.5),
            noise_sigma: 3.0,
            ramp: (rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0)),
        }
    }
}

/// Renders one 35×35 patch, row-major.
pub fn render_patch(shape: ContourShape, style: &RenderStyle, rng: &mut impl Rng) -> Vec<u8> {
    let noise = Normal::new(0.0, style.noise_sigma.max(1e-12)).expect("finite sigma");
    let c = PATCH_RADIUS as f64;
    let mut out = Vec::with_capacity(CHANNEL_LEN);
    for y in 0..PATCH_SIZE {
        for x in 0..PATCH_SIZE {
            let p = (x as f64 - c, y as f64 - c);
            let mut v = style.background;
            if shape == ContourShape::Blank {
                v += style.ramp.0 * p.0 / PATCH_SIZE as f64 + style.ramp.1 * p.1 / PATCH_SIZE as f64;
            } else {
                let coverage = (style.width / 2.0 + 0.5 - shape.distance(p)).clamp(0.0, 1.0);
                v += style.contrast * coverage;
            }
            if style.noise_sigma > 0.0 {
                v += noise.sample(rng);
            }
            out.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPatch {
    /// 35×35 luma, row-major.
    pub pixels: Vec<u8>,
    /// Class label in 1..=151.
    pub label: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledPatchCorpus {
    pub patches: Vec<LabeledPatch>,
}

impl LabeledPatchCorpus {
    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    /// Examples per label, index 0 unused.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; N_CLASSES + 1];
        for p in &self.patches {
            if p.label <= N_CLASSES {
                counts[p.label] += 1;
            }
        }
        counts
    }
}

pub fn generate_synthetic_corpus(n_classes: usize, n_per_class: usize, seed: u64) -> Result<LabeledPatchCorpus, SketchError> {
    if n_classes != N_CLASSES {
        return Err(SketchError::ClassCount(n_classes));
    }
    if n_per_class == 0 {
        return Err(SketchError::CorpusTooSmall { label: 1, count: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let catalog = contour_catalog();
    let mut patches = Vec::with_capacity(N_CLASSES * n_per_class);
    for label in 1..=N_CLASSES {
        let shape = if label == BLANK_CLASS {
            ContourShape::Blank
        } else {
            catalog[label - 1]
        };
        for _ in 0..n_per_class {
            let style = RenderStyle::random(&mut rng);
            patches.push(LabeledPatch {
                pixels: render_patch(shape, &style, &mut rng),
                label,
            });
        }
    }
    Ok(LabeledPatchCorpus { patches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_150_distinct_shapes() {
        let c = contour_catalog();
        assert_eq!(c.len(), 150);
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                assert_ne!(c[i], c[j]);
            }
        }
    }

    #[test]
    fn corpus_counts_and_determinism() {
        let a = generate_synthetic_corpus(151, 10, 1).unwrap();
        assert_eq!(a.len(), 1510);
        let counts = a.class_counts();
        assert!(counts[1..].iter().all(|&n| n == 10));
        let b = generate_synthetic_corpus(151, 10, 1).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_corpus(151, 10, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_arguments() {
        assert!(generate_synthetic_corpus(150, 10, 1).is_err());
        assert!(generate_synthetic_corpus(151, 0, 1).is_err());
    }

    #[test]
    fn vertical_line_is_label_13() {
        assert_eq!(vertical_line_label(), 13);
        let style = RenderStyle {
            background: 100.0,
            contrast: 80.0,
            width: 2.0,
            noise_sigma: 0.0,
            ramp: (0.0, 0.0),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = render_patch(shape_for_label(13).unwrap(), &style, &mut rng);
        // centre column lit on every row, far column untouched
        for y in 0..PATCH_SIZE {
            assert_eq!(p[y * PATCH_SIZE + 17], 180);
            assert_eq!(p[y * PATCH_SIZE + 2], 100);
        }
    }
}
