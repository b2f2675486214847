use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::video::{Frame, Sequence};

/// Side of one checker square, in pixels.
pub const CHECKER_PERIOD: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneKind {
    /// Checkerboard panning one pixel per frame.
    Checker,
    /// Dense field of drifting anisotropic Gaussian blobs.
    BlobField,
    /// Value-noise background with textured moving objects.
    TexturedObjects,
}

struct Blob {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
    /// Inverse covariance terms of the rotated ellipse.
    a: f64,
    b: f64,
    c: f64,
    amp: f64,
    reach: f64,
}

/// Blobs per pixel of frame area.
const BLOB_DENSITY: f64 = 1.0 / 260.0;

fn blob_field(width: usize, height: usize, frames: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = ((width * height) as f64 * BLOB_DENSITY).round() as usize;
    let blobs: Vec<Blob> = (0..n)
        .map(|_| {
            let sigma = rng.random_range(2.0..6.0);
            let ratio = rng.random_range(0.55..1.0);
            let theta = rng.random_range(0.0..std::f64::consts::PI);
            let (s1, s2) = (sigma, sigma * ratio);
            let (ct, st) = (theta.cos(), theta.sin());
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            Blob {
                x: rng.random_range(-8.0..width as f64 + 8.0),
                y: rng.random_range(-8.0..height as f64 + 8.0),
                vx: rng.random_range(-0.6..0.6),
                vy: rng.random_range(-0.4..0.4),
                a: ct * ct / (s1 * s1) + st * st / (s2 * s2),
                b: ct * st * (1.0 / (s1 * s1) - 1.0 / (s2 * s2)),
                c: st * st / (s1 * s1) + ct * ct / (s2 * s2),
                amp: sign * rng.random_range(40.0..100.0),
                reach: 3.5 * s1,
            }
        })
        .collect();
    let gx = rng.random_range(-0.08..0.08);
    let gy = rng.random_range(-0.08..0.08);
    (0..frames)
        .into_par_iter()
        .map(|t| {
            let mut img: Vec<f64> = (0..width * height)
                .map(|i| {
                    let (x, y) = ((i % width) as f64, (i / width) as f64);
                    128.0 + gx * (x - width as f64 / 2.0) + gy * (y - height as f64 / 2.0)
                })
                .collect();
            for b in &blobs {
                let cx = b.x + b.vx * t as f64;
                let cy = b.y + b.vy * t as f64;
                let x0 = (cx - b.reach).floor().max(0.0) as usize;
                let x1 = ((cx + b.reach).ceil() as isize).clamp(0, width as isize - 1) as usize;
                let y0 = (cy - b.reach).floor().max(0.0) as usize;
                let y1 = ((cy + b.reach).ceil() as isize).clamp(0, height as isize - 1) as usize;
                if cx + b.reach < 0.0 || cy + b.reach < 0.0 {
                    continue;
                }
                for y in y0..=y1 {
                    let dy = y as f64 - cy;
                    for x in x0..=x1 {
                        let dx = x as f64 - cx;
                        let q = b.a * dx * dx + 2.0 * b.b * dx * dy + b.c * dy * dy;
                        img[y * width + x] += b.amp * (-0.5 * q).exp();
                    }
                }
            }
            img
        })
        .collect()
}

/// Bilinearly interpolated lattice noise with cell size `cell`.
struct ValueNoise {
    cols: usize,
    cell: f64,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(extent_x: f64, extent_y: f64, cell: f64, rng: &mut ChaCha8Rng) -> Self {
        let cols = (extent_x / cell).ceil() as usize + 2;
        let rows = (extent_y / cell).ceil() as usize + 2;
        Self {
            cols,
            cell,
            lattice: (0..cols * rows).map(|_| rng.random_range(-1.0..1.0)).collect(),
        }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let (u, v) = ((x / self.cell).max(0.0), (y / self.cell).max(0.0));
        let (i, j) = (u.floor() as usize, v.floor() as usize);
        let rows = self.lattice.len() / self.cols;
        let (i, j) = (i.min(self.cols - 2), j.min(rows - 2));
        let (fu, fv) = (u - i as f64, v - j as f64);
        // smoothstep weights keep the gradient continuous across cells
        let (su, sv) = (fu * fu * (3.0 - 2.0 * fu), fv * fv * (3.0 - 2.0 * fv));
        let g = |di: usize, dj: usize| self.lattice[(j + dj) * self.cols + i + di];
        let top = g(0, 0) * (1.0 - su) + g(1, 0) * su;
        let bottom = g(0, 1) * (1.0 - su) + g(1, 1) * su;
        top * (1.0 - sv) + bottom * sv
    }
}

struct Object {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
    rx: f64,
    ry: f64,
    elliptic: bool,
    base: f64,
    texture: ValueNoise,
}

fn textured_objects(width: usize, height: usize, frames: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let (wf, hf) = (width as f64, height as f64);
    let background = ValueNoise::new(wf + 64.0, hf + 64.0, 9.0, rng);
    let fine = ValueNoise::new(wf + 64.0, hf + 64.0, 3.0, rng);
    let n_objects = ((width * height) as f64 / 9000.0).ceil() as usize + 2;
    let objects: Vec<Object> = (0..n_objects)
        .map(|_| {
            let rx = rng.random_range(0.06..0.16) * wf.min(hf) + 6.0;
            let ry = rng.random_range(0.06..0.16) * wf.min(hf) + 6.0;
            Object {
                x: rng.random_range(0.1..0.9) * wf,
                y: rng.random_range(0.1..0.9) * hf,
                vx: rng.random_range(-1.0..1.0),
                vy: rng.random_range(-0.5..0.5),
                rx,
                ry,
                elliptic: rng.random_bool(0.5),
                base: rng.random_range(40.0..215.0),
                texture: ValueNoise::new(2.0 * rx + 8.0, 2.0 * ry + 8.0, 4.0, rng),
            }
        })
        .collect();
    (0..frames)
        .into_par_iter()
        .map(|t| {
            let pan = 0.5 * t as f64;
            let mut img = Vec::with_capacity(width * height);
            for y in 0..height {
                for x in 0..width {
                    let (xf, yf) = (x as f64 + pan, y as f64);
                    img.push(128.0 + 55.0 * background.at(xf + 16.0, yf + 16.0) + 12.0 * fine.at(xf + 16.0, yf + 16.0));
                }
            }
            for o in &objects {
                let cx = o.x + o.vx * t as f64;
                let cy = o.y + o.vy * t as f64;
                let x0 = (cx - o.rx).floor().max(0.0) as usize;
                let y0 = (cy - o.ry).floor().max(0.0) as usize;
                let x1 = ((cx + o.rx).ceil() as isize).clamp(0, width as isize - 1) as usize;
                let y1 = ((cy + o.ry).ceil() as isize).clamp(0, height as isize - 1) as usize;
                for y in y0..=y1 {
                    for x in x0..=x1 {
                        let (dx, dy) = ((x as f64 - cx) / o.rx, (y as f64 - cy) / o.ry);
                        let inside = if o.elliptic { dx * dx + dy * dy <= 1.0 } else { dx.abs() <= 1.0 && dy.abs() <= 1.0 };
                        if inside {
                            let tx = x as f64 - cx + o.rx + 2.0;
                            let ty = y as f64 - cy + o.ry + 2.0;
                            img[y * width + x] = o.base + 45.0 * o.texture.at(tx, ty);
                        }
                    }
                }
            }
            img
        })
        .collect()
}

fn checker(width: usize, height: usize, frames: usize) -> Vec<Vec<f64>> {
    (0..frames)
        .map(|t| {
            (0..width * height)
                .map(|i| {
                    let (x, y) = (i % width + t, i / width);
                    if (x / CHECKER_PERIOD + y / CHECKER_PERIOD) % 2 == 0 {
                        64.0
                    } else {
                        192.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Procedural test sequence, identical for identical arguments.
///
/// # Panics
/// If either side is below the minimum frame dimension or `frames < 2`.
pub fn synth_test_scene(kind: SceneKind, width: usize, height: usize, frames: usize, seed: u64) -> Sequence {
    assert!(frames >= 2, "a test scene needs at least 2 frames");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planes = match kind {
        SceneKind::Checker => checker(width, height, frames),
        SceneKind::BlobField => blob_field(width, height, frames, &mut rng),
        SceneKind::TexturedObjects => textured_objects(width, height, frames, &mut rng),
    };
    let frames: Vec<Frame> = planes
        .into_iter()
        .enumerate()
        .map(|(t, p)| {
            let luma = p.into_iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect();
            Frame::new(luma, width, height, t).expect("scene dimensions must be at least 64x64")
        })
        .collect();
    let label = match kind {
        SceneKind::Checker => "checker",
        SceneKind::BlobField => "blob-field",
        SceneKind::TexturedObjects => "textured-objects",
    };
    Sequence::new(frames, 25.0, format!("{label}-{seed}")).expect("frames share one size")
}
