//! Controlled synthetic degradations and procedural test scenes.

mod scene;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::video::{Frame, Sequence};

pub use scene::{synth_test_scene, SceneKind, CHECKER_PERIOD};

/// Wavelength of the local warp displacement field, in pixels.
pub const WARP_WAVELENGTH: f64 = 24.0;
/// Width of the cosine taper at the edge of a warped region.
pub const WARP_TAPER: f64 = 16.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistortionError {
    #[error("region {x},{y} {w}x{h} lies outside the {width}x{height} frame")]
    RegionOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid distortion parameters: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistortionKind {
    /// Horizontal translation by `magnitude` px, edges clamped.
    GlobalShift,
    /// Smooth sinusoidal displacement field of peak `magnitude` px.
    LocalWarp,
    /// ±`magnitude` gray levels on alternating blocks of `period` frames.
    Flicker,
    /// Gaussian blur with σ = `magnitude` px.
    Blur,
    /// Additive Gaussian noise with σ = `magnitude` gray levels.
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Region {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    /// Middle half of a frame in each direction.
    pub fn central(width: usize, height: usize) -> Self {
        Self {
            x: width / 4,
            y: height / 4,
            w: width / 2,
            h: height / 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionSpec {
    pub kind: DistortionKind,
    pub magnitude: f64,
    /// Affected rectangle; the whole frame when absent, except for flicker,
    /// which defaults to [`Region::central`].
    #[serde(default)]
    pub region: Option<Region>,
    /// Flicker block length in frames.
    #[serde(default = "default_period")]
    pub period: usize,
    /// Affected frame range `[start, end)`; every frame when absent.
    #[serde(default)]
    pub frames: Option<(usize, usize)>,
    #[serde(default)]
    pub seed: u64,
}

fn default_period() -> usize {
    1
}

impl DistortionSpec {
    pub fn new(kind: DistortionKind, magnitude: f64) -> Self {
        Self {
            kind,
            magnitude,
            region: None,
            period: 1,
            frames: None,
            seed: 0,
        }
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = Some(region);
        self
    }

    pub fn with_frames(mut self, start: usize, end: usize) -> Self {
        self.frames = Some((start, end));
        self
    }

    pub fn with_period(mut self, period: usize) -> Self {
        self.period = period;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn region_for(&self, width: usize, height: usize) -> Result<Region, DistortionError> {
        let r = match (self.region, self.kind) {
            (Some(r), _) => r,
            (None, DistortionKind::Flicker) => Region::central(width, height),
            (None, _) => Region {
                x: 0,
                y: 0,
                w: width,
                h: height,
            },
        };
        if r.w == 0 || r.h == 0 || r.x + r.w > width || r.y + r.h > height {
            return Err(DistortionError::RegionOutOfBounds {
                x: r.x,
                y: r.y,
                w: r.w,
                h: r.h,
                width,
                height,
            });
        }
        Ok(r)
    }

    fn applies_to(&self, frame: usize) -> bool {
        self.frames.is_none_or(|(s, e)| frame >= s && frame < e)
    }
}

fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Bilinear sample with clamped coordinates.
fn sample(frame: &Frame, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let (fx, fy) = (x - x0, y - y0);
    let (xi, yi) = (x0 as isize, y0 as isize);
    let p = |dx: isize, dy: isize| f64::from(frame.get_clamped(xi + dx, yi + dy));
    let top = p(0, 0) * (1.0 - fx) + p(1, 0) * fx;
    let bottom = p(0, 1) * (1.0 - fx) + p(1, 1) * fx;
    top * (1.0 - fy) + bottom * fy
}

fn remap(frame: &Frame, region: &Region, mut src: impl FnMut(usize, usize) -> (f64, f64)) -> Frame {
    let (w, h) = frame.dims();
    Frame::from_fn(w, h, frame.index(), |x, y| {
        if region.contains(x, y) {
            let (sx, sy) = src(x, y);
            quantize(sample(frame, sx, sy))
        } else {
            frame.get(x, y)
        }
    })
    .expect("dimensions unchanged")
}

/// 1 in the interior of the region, falling to 0 over [`WARP_TAPER`] px at
/// its edges along a raised cosine.
fn taper(pos: f64, lo: f64, len: f64) -> f64 {
    let d = (pos - lo + 0.5).min(lo + len - pos - 0.5).max(0.0);
    if d >= WARP_TAPER {
        1.0
    } else {
        0.5 * (1.0 - (std::f64::consts::PI * d / WARP_TAPER).cos())
    }
}

fn local_warp(frame: &Frame, region: &Region, m: f64, phase: (f64, f64)) -> Frame {
    let k = 2.0 * std::f64::consts::PI / WARP_WAVELENGTH;
    remap(frame, region, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let win = taper(xf, region.x as f64, region.w as f64) * taper(yf, region.y as f64, region.h as f64);
        let dx = m * win * (k * yf + phase.0).sin();
        let dy = m * win * (k * xf + phase.1).sin();
        (xf - dx, yf - dy)
    })
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil().max(1.0) as isize;
    let k: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = k.iter().sum();
    k.into_iter().map(|v| v / s).collect()
}

fn blur(frame: &Frame, region: &Region, sigma: f64) -> Frame {
    let (w, h) = frame.dims();
    let k = gaussian_kernel(sigma);
    let r = (k.len() / 2) as isize;
    let mut horiz = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            horiz[y * w + x] = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * f64::from(frame.get_clamped(x as isize + i as isize - r, y as isize)))
                .sum();
        }
    }
    Frame::from_fn(w, h, frame.index(), |x, y| {
        if !region.contains(x, y) {
            return frame.get(x, y);
        }
        let v: f64 = k
            .iter()
            .enumerate()
            .map(|(i, kv)| {
                let yy = (y as isize + i as isize - r).clamp(0, h as isize - 1) as usize;
                kv * horiz[yy * w + x]
            })
            .sum();
        quantize(v)
    })
    .expect("dimensions unchanged")
}

fn per_pixel(frame: &Frame, region: &Region, mut f: impl FnMut(u8) -> u8) -> Frame {
    let mut out = frame.clone();
    let w = frame.width();
    let luma = out.luma_mut();
    for y in region.y..region.y + region.h {
        for v in &mut luma[y * w + region.x..y * w + region.x + region.w] {
            *v = f(*v);
        }
    }
    out
}

/// Applies `spec` to every selected frame of `seq`. A zero magnitude
/// returns the input unchanged.
pub fn inject_distortion(seq: &Sequence, spec: &DistortionSpec) -> Result<Sequence, DistortionError> {
    if !(spec.magnitude >= 0.0 && spec.magnitude.is_finite()) {
        return Err(DistortionError::InvalidSpec(format!("magnitude {}", spec.magnitude)));
    }
    if spec.period == 0 {
        return Err(DistortionError::InvalidSpec("period must be at least 1".into()));
    }
    let (w, h) = seq.dims();
    let region = spec.region_for(w, h)?;
    if spec.magnitude == 0.0 {
        return Ok(seq.clone());
    }
    let m = spec.magnitude;
    let phase = {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        use rand::Rng;
        let tau = 2.0 * std::f64::consts::PI;
        (rng.random::<f64>() * tau, rng.random::<f64>() * tau)
    };
    let start = spec.frames.map_or(0, |(s, _)| s);
    let frames: Vec<Frame> = seq
        .frames()
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            if !spec.applies_to(i) {
                return f.clone();
            }
            match spec.kind {
                DistortionKind::GlobalShift => remap(f, &region, |x, y| (x as f64 - m, y as f64)),
                DistortionKind::LocalWarp => local_warp(f, &region, m, phase),
                DistortionKind::Flicker => {
                    let block = (i - start) / spec.period;
                    let delta = if block % 2 == 0 { m } else { -m };
                    per_pixel(f, &region, |v| quantize(f64::from(v) + delta))
                }
                DistortionKind::Blur => blur(f, &region, m),
                DistortionKind::Noise => {
                    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                    rng.set_stream(i as u64 + 1);
                    let normal = Normal::new(0.0, m).expect("finite sigma");
                    per_pixel(f, &region, |v| quantize(f64::from(v) + normal.sample(&mut rng)))
                }
            }
        })
        .collect();
    Ok(Sequence::new(frames, seq.fps(), seq.label()).expect("frames keep their size"))
}

/// Mean absolute luma difference between two sequences of equal shape.
pub fn mean_abs_difference(a: &Sequence, b: &Sequence) -> f64 {
    let mut sum = 0u64;
    let mut n = 0usize;
    for (fa, fb) in a.frames().iter().zip(b.frames()) {
        for (&x, &y) in fa.luma().iter().zip(fb.luma()) {
            sum += u64::from(x.abs_diff(y));
        }
        n += fa.luma().len();
    }
    sum as f64 / n as f64
}
