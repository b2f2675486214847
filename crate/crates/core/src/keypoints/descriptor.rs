//! Upright 64-dimensional Haar-wavelet descriptor.

use super::detector::InterestPoint;
use super::integral::IntegralImage;
use super::KeypointError;
use crate::video::Frame;

pub const DESCRIPTOR_LEN: usize = 64;

/// Half-size of a sketch-token patch; points closer than this to a border
/// cannot be described or scored.
pub const PATCH_MARGIN: f64 = 17.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub values: [f64; DESCRIPTOR_LEN],
}

impl Descriptor {
    pub fn distance(&self, other: &Descriptor) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn within_margin(x: f64, y: f64, width: usize, height: usize, margin: f64) -> bool {
    x >= margin && y >= margin && x <= (width as f64 - 1.0) - margin && y <= (height as f64 - 1.0) - margin
}

pub fn compute_descriptor(frame: &Frame, point: &InterestPoint) -> Result<Descriptor, KeypointError> {
    let ii = IntegralImage::new(frame);
    describe_on_integral(&ii, point)
}

fn gaussian(x: f64, y: f64, sigma: f64) -> f64 {
    (-(x * x + y * y) / (2.0 * sigma * sigma)).exp() / (2.0 * std::f64::consts::PI * sigma * sigma)
}

/// 4×4 grid of sub-regions over a 24s window (overlapping 9×9 samples per
/// sub-region), each contributing (Σdx, Σdy, Σ|dx|, Σ|dy|).
pub(crate) fn describe_on_integral(ii: &IntegralImage, point: &InterestPoint) -> Result<Descriptor, KeypointError> {
    if !within_margin(point.x, point.y, ii.width(), ii.height(), PATCH_MARGIN) {
        return Err(KeypointError::BorderProximity {
            x: point.x,
            y: point.y,
            margin: PATCH_MARGIN,
        });
    }
    let scale = point.scale;
    let x = point.x.round();
    let y = point.y.round();
    let haar = (2.0 * scale.round()).max(2.0) as isize;

    let mut values = [0.0; DESCRIPTOR_LEN];
    let mut count = 0;
    let mut norm = 0.0;

    let mut i: i32 = -8;
    let mut cx = -0.5;
    while i < 12 {
        let mut j: i32 = -8;
        i -= 4;
        cx += 1.0;
        let mut cy = -0.5;
        while j < 12 {
            cy += 1.0;
            j -= 4;
            let ix = f64::from(i + 5);
            let jx = f64::from(j + 5);
            let xs = (x + ix * scale).round();
            let ys = (y + jx * scale).round();
            let (mut dx, mut dy, mut mdx, mut mdy) = (0.0, 0.0, 0.0, 0.0);
            for k in i..i + 9 {
                for l in j..j + 9 {
                    let sx = (x + f64::from(k) * scale).round();
                    let sy = (y + f64::from(l) * scale).round();
                    let g = gaussian(xs - sx, ys - sy, 2.5 * scale);
                    let rx = g * ii.haar_x(sy as isize, sx as isize, haar);
                    let ry = g * ii.haar_y(sy as isize, sx as isize, haar);
                    dx += rx;
                    dy += ry;
                    mdx += rx.abs();
                    mdy += ry.abs();
                }
            }
            let g2 = gaussian(cx - 2.0, cy - 2.0, 1.5);
            for v in [dx, dy, mdx, mdy] {
                values[count] = v * g2;
                norm += (v * g2) * (v * g2);
                count += 1;
            }
            j += 9;
        }
        i += 9;
    }
    let norm = norm.sqrt();
    if norm > 0.0 {
        values.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(Descriptor { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize, shift: usize) -> Frame {
        Frame::from_fn(w, h, 0, |x, y| {
            let xs = x as f64 - shift as f64;
            let v = 128.0 + 50.0 * (xs * 0.31).sin() * (y as f64 * 0.17).cos() + 30.0 * ((xs + y as f64) * 0.11).sin();
            v.clamp(0.0, 255.0) as u8
        })
        .unwrap()
    }

    fn pt(x: f64, y: f64) -> InterestPoint {
        InterestPoint {
            x,
            y,
            scale: 2.0,
            response: 1.0,
            laplacian: 1,
        }
    }

    #[test]
    fn deterministic_and_normalized() {
        let f = textured(128, 128, 0);
        let a = compute_descriptor(&f, &pt(60.3, 64.8)).unwrap();
        let b = compute_descriptor(&f, &pt(60.3, 64.8)).unwrap();
        assert_eq!(a, b);
        let n: f64 = a.values.iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_covariant() {
        let f = textured(128, 128, 0);
        let g = textured(128, 128, 5);
        let a = compute_descriptor(&f, &pt(60.0, 64.0)).unwrap();
        let b = compute_descriptor(&g, &pt(65.0, 64.0)).unwrap();
        assert!(a.distance(&b) < 0.1, "{}", a.distance(&b));
    }

    #[test]
    fn border_point_rejected() {
        let f = textured(128, 128, 0);
        assert!(matches!(
            compute_descriptor(&f, &pt(5.0, 64.0)),
            Err(KeypointError::BorderProximity { .. })
        ));
        assert!(compute_descriptor(&f, &pt(110.0, 64.0)).is_ok());
        assert!(compute_descriptor(&f, &pt(111.0, 64.0)).is_err());
    }
}
