use crate::video::Frame;

/// Summed-area table over luma normalized to [0, 1].
#[derive(Debug, Clone)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    // (width + 1) × (height + 1), first row and column zero.
    sums: Vec<f64>,
}

impl IntegralImage {
    pub fn new(frame: &Frame) -> Self {
        let (w, h) = frame.dims();
        let stride = w + 1;
        let mut sums = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0.0;
            for x in 0..w {
                row += f64::from(frame.get(x, y)) / 255.0;
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Self {
            width: w,
            height: h,
            sums,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Sum over rows `[row, row + rows)` and columns `[col, col + cols)`,
    /// with the rectangle clipped to the image.
    pub fn box_sum(&self, row: isize, col: isize, rows: isize, cols: isize) -> f64 {
        let r0 = row.clamp(0, self.height as isize) as usize;
        let c0 = col.clamp(0, self.width as isize) as usize;
        let r1 = (row + rows).clamp(0, self.height as isize) as usize;
        let c1 = (col + cols).clamp(0, self.width as isize) as usize;
        if r1 <= r0 || c1 <= c0 {
            return 0.0;
        }
        let s = self.width + 1;
        let a = self.sums[r0 * s + c0];
        let b = self.sums[r0 * s + c1];
        let c = self.sums[r1 * s + c0];
        let d = self.sums[r1 * s + c1];
        (d - b - c + a).max(0.0)
    }

    /// Horizontal Haar response of side `size` centered at (row, col).
    pub fn haar_x(&self, row: isize, col: isize, size: isize) -> f64 {
        let h = size / 2;
        self.box_sum(row - h, col, size, h) - self.box_sum(row - h, col - h, size, h)
    }

    pub fn haar_y(&self, row: isize, col: isize, size: isize) -> f64 {
        let h = size / 2;
        self.box_sum(row, col - h, h, size) - self.box_sum(row - h, col - h, h, size)
    }
}
