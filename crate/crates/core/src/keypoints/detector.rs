//! Fast-Hessian interest point detector on box-filter approximations.

use serde::{Deserialize, Serialize};

use super::integral::IntegralImage;
use crate::video::Frame;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    pub octaves: usize,
    pub intervals: usize,
    /// Sampling step of the first octave; doubled for every following octave.
    pub sample_step: usize,
    /// Minimum approximated Hessian determinant, luma in [0, 1].
    pub threshold: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            octaves: 3,
            intervals: 4,
            sample_step: 1,
            threshold: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterestPoint {
    pub x: f64,
    pub y: f64,
    pub scale: f64,
    pub response: f64,
    /// Sign of the Hessian trace; +1 for dark blobs on bright background.
    pub laplacian: i8,
}

/// Side of the box filter for `interval` in `octave`: 9, 15, 21, 27 / 15, 27, 39, 51 / ...
pub fn filter_size(octave: usize, interval: usize) -> usize {
    3 * ((1 << (octave + 1)) * (interval + 1) + 1)
}

struct ResponseLayer {
    width: usize,
    height: usize,
    step: usize,
    filter: usize,
    responses: Vec<f64>,
    laplacian: Vec<i8>,
}

impl ResponseLayer {
    fn build(ii: &IntegralImage, step: usize, filter: usize) -> Self {
        let width = ii.width() / step;
        let height = ii.height() / step;
        let mut responses = vec![0.0; width * height];
        let mut laplacian = vec![0i8; width * height];
        let lobe = (filter / 3) as isize;
        let border = ((filter - 1) / 2) as isize;
        let w = filter as isize;
        let inv_area = 1.0 / (filter * filter) as f64;
        for ar in 0..height {
            for ac in 0..width {
                let r = (ar * step) as isize;
                let c = (ac * step) as isize;
                let dxx = ii.box_sum(r - lobe + 1, c - border, 2 * lobe - 1, w)
                    - 3.0 * ii.box_sum(r - lobe + 1, c - lobe / 2, 2 * lobe - 1, lobe);
                let dyy = ii.box_sum(r - border, c - lobe + 1, w, 2 * lobe - 1)
                    - 3.0 * ii.box_sum(r - lobe / 2, c - lobe + 1, lobe, 2 * lobe - 1);
                let dxy = ii.box_sum(r - lobe, c + 1, lobe, lobe)
                    + ii.box_sum(r + 1, c - lobe, lobe, lobe)
                    - ii.box_sum(r - lobe, c - lobe, lobe, lobe)
                    - ii.box_sum(r + 1, c + 1, lobe, lobe);
                let (dxx, dyy, dxy) = (dxx * inv_area, dyy * inv_area, dxy * inv_area);
                let i = ar * width + ac;
                responses[i] = dxx * dyy - 0.81 * dxy * dxy;
                laplacian[i] = if dxx + dyy >= 0.0 { 1 } else { -1 };
            }
        }
        Self {
            width,
            height,
            step,
            filter,
            responses,
            laplacian,
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.responses[r * self.width + c]
    }
}

/// Detects scale-space maxima of the approximated Hessian determinant,
/// sorted by descending response.
pub fn detect_interest_points(frame: &Frame, config: &DetectorConfig) -> Vec<InterestPoint> {
    let ii = IntegralImage::new(frame);
    detect_on_integral(&ii, config)
}

pub(crate) fn detect_on_integral(ii: &IntegralImage, config: &DetectorConfig) -> Vec<InterestPoint> {
    let mut points = Vec::new();
    let step0 = config.sample_step.max(1);
    for octave in 0..config.octaves {
        let step = step0 << octave;
        if ii.width() / step < 3 || ii.height() / step < 3 {
            break;
        }
        let layers: Vec<ResponseLayer> = (0..config.intervals)
            .map(|i| ResponseLayer::build(ii, step, filter_size(octave, i)))
            .collect();
        for win in layers.windows(3) {
            find_extrema(&win[0], &win[1], &win[2], config.threshold, &mut points);
        }
    }
    points.sort_by(|a, b| {
        b.response
            .total_cmp(&a.response)
            .then(a.y.total_cmp(&b.y))
            .then(a.x.total_cmp(&b.x))
            .then(a.scale.total_cmp(&b.scale))
    });
    points
}

fn find_extrema(
    b: &ResponseLayer,
    m: &ResponseLayer,
    t: &ResponseLayer,
    threshold: f64,
    out: &mut Vec<InterestPoint>,
) {
    let border = (t.filter + 1) / (2 * t.step);
    if m.height <= 2 * border + 2 || m.width <= 2 * border + 2 {
        return;
    }
    for r in (border + 1)..(m.height - border - 1) {
        for c in (border + 1)..(m.width - border - 1) {
            let v = m.at(r, c);
            if v <= threshold || !is_local_max(b, m, t, r, c, v) {
                continue;
            }
            if let Some(p) = interpolate(b, m, t, r, c) {
                out.push(p);
            }
        }
    }
}

fn is_local_max(b: &ResponseLayer, m: &ResponseLayer, t: &ResponseLayer, r: usize, c: usize, v: f64) -> bool {
    for layer in [b, m, t] {
        for rr in r - 1..=r + 1 {
            for cc in c - 1..=c + 1 {
                if std::ptr::eq(layer, m) && rr == r && cc == c {
                    continue;
                }
                if layer.at(rr, cc) >= v {
                    return false;
                }
            }
        }
    }
    true
}

/// Quadratic refinement of an extremum in (x, y, scale); `None` when the
/// offset leaves the sample cell.
fn interpolate(b: &ResponseLayer, m: &ResponseLayer, t: &ResponseLayer, r: usize, c: usize) -> Option<InterestPoint> {
    let v = m.at(r, c);
    let dx = (m.at(r, c + 1) - m.at(r, c - 1)) / 2.0;
    let dy = (m.at(r + 1, c) - m.at(r - 1, c)) / 2.0;
    let ds = (t.at(r, c) - b.at(r, c)) / 2.0;

    let dxx = m.at(r, c + 1) + m.at(r, c - 1) - 2.0 * v;
    let dyy = m.at(r + 1, c) + m.at(r - 1, c) - 2.0 * v;
    let dss = t.at(r, c) + b.at(r, c) - 2.0 * v;
    let dxy = (m.at(r + 1, c + 1) - m.at(r + 1, c - 1) - m.at(r - 1, c + 1) + m.at(r - 1, c - 1)) / 4.0;
    let dxs = (t.at(r, c + 1) - t.at(r, c - 1) - b.at(r, c + 1) + b.at(r, c - 1)) / 4.0;
    let dys = (t.at(r + 1, c) - t.at(r - 1, c) - b.at(r + 1, c) + b.at(r - 1, c)) / 4.0;

    let h = [[dxx, dxy, dxs], [dxy, dyy, dys], [dxs, dys, dss]];
    let off = solve3(h, [-dx, -dy, -ds])?;
    if off.iter().any(|o| !o.is_finite() || o.abs() >= 0.5) {
        return None;
    }
    let filter_step = (m.filter - b.filter) as f64;
    let step = m.step as f64;
    Some(InterestPoint {
        x: (c as f64 + off[0]) * step,
        y: (r as f64 + off[1]) * step,
        scale: 0.1333 * (m.filter as f64 + off[2] * filter_step),
        response: v,
        laplacian: m.laplacian[r * m.width + c],
    })
}

fn solve3(a: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][k] = rhs[row];
        }
        let dk = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        *o = dk / det;
    }
    Some(out)
}
