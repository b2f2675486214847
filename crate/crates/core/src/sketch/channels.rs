//! Low-level channel features over a 35×35 patch.
//!
//! Eleven channels: normalized luma, gradient magnitude at two blur scales,
//! and four orientation channels per scale (gradient direction 0°, 45°, 90°,
//! 135°, magnitude split linearly between the two nearest bins).

use serde::{Deserialize, Serialize};

use super::SketchError;
use crate::video::Frame;

pub const PATCH_SIZE: usize = 35;
pub const PATCH_RADIUS: usize = PATCH_SIZE / 2;
pub const N_CHANNELS: usize = 11;
pub const CHANNEL_LEN: usize = PATCH_SIZE * PATCH_SIZE;
pub const FEATURE_LEN: usize = CHANNEL_LEN * N_CHANNELS;

const BLUR_SIGMA: f32 = 1.5;
const BLUR_RADIUS: usize = 5;
const PAD: usize = BLUR_RADIUS + 1;
const WINDOW: usize = PATCH_SIZE + 2 * PAD;

/// Channel recipe recorded alongside a codebook.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub patch_size: usize,
    pub blur_sigmas: Vec<f64>,
    pub orientations_deg: Vec<f64>,
    pub channels: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            patch_size: PATCH_SIZE,
            blur_sigmas: vec![0.0, f64::from(BLUR_SIGMA)],
            orientations_deg: vec![0.0, 45.0, 90.0, 135.0],
            channels: N_CHANNELS,
        }
    }
}

impl FeatureConfig {
    pub fn feature_len(&self) -> usize {
        self.patch_size * self.patch_size * self.channels
    }
}

/// Channel-major feature vector: `values[c * 1225 + row * 35 + col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFeatures {
    pub values: Vec<f32>,
}

impl ChannelFeatures {
    pub fn channel(&self, c: usize) -> &[f32] {
        &self.values[c * CHANNEL_LEN..(c + 1) * CHANNEL_LEN]
    }
}

/// Channel indices.
pub mod channel {
    pub const LUMA: usize = 0;
    pub const MAGNITUDE_FINE: usize = 1;
    pub const MAGNITUDE_COARSE: usize = 2;
    /// First of four orientation channels (0°, 45°, 90°, 135°) at σ = 0.
    pub const ORIENT_FINE: usize = 3;
    /// First of four orientation channels at σ = 1.5.
    pub const ORIENT_COARSE: usize = 7;
}

pub(crate) fn patch_center_ok(frame: &Frame, cx: usize, cy: usize) -> bool {
    cx >= PATCH_RADIUS && cy >= PATCH_RADIUS && cx + PATCH_RADIUS < frame.width() && cy + PATCH_RADIUS < frame.height()
}

pub fn extract_channel_features(frame: &Frame, center: (usize, usize)) -> Result<ChannelFeatures, SketchError> {
    let (cx, cy) = center;
    if !patch_center_ok(frame, cx, cy) {
        return Err(SketchError::BorderProximity { x: cx, y: cy });
    }
    let ox = cx as isize - (PATCH_RADIUS + PAD) as isize;
    let oy = cy as isize - (PATCH_RADIUS + PAD) as isize;
    Ok(compute(|x, y| f32::from(frame.get_clamped(ox + x as isize, oy + y as isize))))
}

/// Features of a stand-alone 35×35 patch; context outside it is edge-clamped.
pub fn patch_features(patch: &[u8]) -> ChannelFeatures {
    assert_eq!(patch.len(), CHANNEL_LEN, "patch must be {PATCH_SIZE}x{PATCH_SIZE}");
    compute(|x, y| {
        let px = (x as isize - PAD as isize).clamp(0, PATCH_SIZE as isize - 1) as usize;
        let py = (y as isize - PAD as isize).clamp(0, PATCH_SIZE as isize - 1) as usize;
        f32::from(patch[py * PATCH_SIZE + px])
    })
}

fn blur_kernel() -> [f32; 2 * BLUR_RADIUS + 1] {
    let mut k = [0.0f32; 2 * BLUR_RADIUS + 1];
    let mut sum = 0.0;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f32 - BLUR_RADIUS as f32;
        *v = (-(d * d) / (2.0 * BLUR_SIGMA * BLUR_SIGMA)).exp();
        sum += *v;
    }
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

fn blur(src: &[f32]) -> Vec<f32> {
    let k = blur_kernel();
    let r = BLUR_RADIUS as isize;
    let n = WINDOW as isize;
    let idx = |x: isize, y: isize| (y.clamp(0, n - 1) * n + x.clamp(0, n - 1)) as usize;
    let mut tmp = vec![0.0f32; WINDOW * WINDOW];
    for y in 0..n {
        for x in 0..n {
            let mut acc = 0.0;
            for (i, w) in k.iter().enumerate() {
                acc += w * src[idx(x + i as isize - r, y)];
            }
            tmp[(y * n + x) as usize] = acc;
        }
    }
    let mut out = vec![0.0f32; WINDOW * WINDOW];
    for y in 0..n {
        for x in 0..n {
            let mut acc = 0.0;
            for (i, w) in k.iter().enumerate() {
                acc += w * tmp[idx(x, y + i as isize - r)];
            }
            out[(y * n + x) as usize] = acc;
        }
    }
    out
}

/// Writes magnitude and orientation channels for one scale.
fn gradient_channels(src: &[f32], mag_channel: usize, orient_channel: usize, values: &mut [f32]) {
    let bin_width = std::f32::consts::FRAC_PI_4;
    for row in 0..PATCH_SIZE {
        for col in 0..PATCH_SIZE {
            let x = col + PAD;
            let y = row + PAD;
            let gx = (src[y * WINDOW + x + 1] - src[y * WINDOW + x - 1]) * 0.5;
            let gy = (src[(y + 1) * WINDOW + x] - src[(y - 1) * WINDOW + x]) * 0.5;
            let mag = (gx * gx + gy * gy).sqrt();
            let i = row * PATCH_SIZE + col;
            values[mag_channel * CHANNEL_LEN + i] = mag;
            if mag == 0.0 {
                continue;
            }
            let mut theta = gy.atan2(gx);
            if theta < 0.0 {
                theta += std::f32::consts::PI;
            }
            let pos = (theta / bin_width).min(3.999_999);
            let b0 = pos.floor() as usize;
            let frac = pos - b0 as f32;
            let b1 = (b0 + 1) % 4;
            values[(orient_channel + b0) * CHANNEL_LEN + i] += mag * (1.0 - frac);
            values[(orient_channel + b1) * CHANNEL_LEN + i] += mag * frac;
        }
    }
}

fn compute(sample: impl Fn(usize, usize) -> f32) -> ChannelFeatures {
    let mut window = vec![0.0f32; WINDOW * WINDOW];
    for y in 0..WINDOW {
        for x in 0..WINDOW {
            window[y * WINDOW + x] = sample(x, y) / 255.0;
        }
    }
    let mut values = vec![0.0f32; FEATURE_LEN];
    for row in 0..PATCH_SIZE {
        for col in 0..PATCH_SIZE {
            values[channel::LUMA * CHANNEL_LEN + row * PATCH_SIZE + col] = window[(row + PAD) * WINDOW + col + PAD];
        }
    }
    gradient_channels(&window, channel::MAGNITUDE_FINE, channel::ORIENT_FINE, &mut values);
    let smooth = blur(&window);
    gradient_channels(&smooth, channel::MAGNITUDE_COARSE, channel::ORIENT_COARSE, &mut values);
    ChannelFeatures { values }
}
