//! Raw planar YUV 4:2:0 ingestion and luma sequence types.
//!
//! Only the Y plane is kept; chroma planes are skipped on read and written
//! as mid-gray on output.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

/// Smallest accepted frame side: one interior 35×35 patch plus margins.
pub const MIN_DIMENSION: usize = 64;

#[derive(Debug, Error)]
pub enum VideoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("file size {len} bytes is not a whole number of {frame_bytes}-byte frames")]
    SizeMismatch { len: usize, frame_bytes: usize },
    #[error("frame dimensions {width}x{height} below minimum {MIN_DIMENSION}x{MIN_DIMENSION}")]
    DimensionTooSmall { width: usize, height: usize },
    #[error("unsupported bit depth {0}; only 8-bit samples are accepted")]
    UnsupportedBitDepth(u8),
    #[error("luma buffer holds {len} samples, expected {expected}")]
    LumaLength { len: usize, expected: usize },
    #[error("sequence has no frames")]
    Empty,
    #[error("frame {index} is {width}x{height}, sequence is {expected_width}x{expected_height}")]
    InconsistentFrame {
        index: usize,
        width: usize,
        height: usize,
        expected_width: usize,
        expected_height: usize,
    },
    #[error("frame counts differ: reference {reference}, test {test}")]
    LengthMismatch { reference: usize, test: usize },
    #[error("dimensions differ: reference {0}x{1}, test {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

/// One 8-bit luma frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    luma: Vec<u8>,
    width: usize,
    height: usize,
    index: usize,
}

impl Frame {
    pub fn new(luma: Vec<u8>, width: usize, height: usize, index: usize) -> Result<Self, VideoError> {
        check_dimensions(width, height)?;
        if luma.len() != width * height {
            return Err(VideoError::LumaLength {
                len: luma.len(),
                expected: width * height,
            });
        }
        Ok(Self {
            luma,
            width,
            height,
            index,
        })
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        index: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, VideoError> {
        let mut luma = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                luma.push(f(x, y));
            }
        }
        Self::new(luma, width, height, index)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.index
    }

    #[inline]
    pub fn luma(&self) -> &[u8] {
        &self.luma
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.luma[y * self.width + x]
    }

    /// Sample with coordinates clamped to the frame.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.luma[cy * self.width + cx]
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub(crate) fn luma_mut(&mut self) -> &mut [u8] {
        &mut self.luma
    }
}

fn check_dimensions(width: usize, height: usize) -> Result<(), VideoError> {
    if width < MIN_DIMENSION || height < MIN_DIMENSION {
        return Err(VideoError::DimensionTooSmall { width, height });
    }
    Ok(())
}

/// Ordered frames of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    frames: Vec<Frame>,
    fps: f64,
    label: String,
}

impl Sequence {
    /// Frame indices are rewritten to their position in `frames`.
    pub fn new(frames: Vec<Frame>, fps: f64, label: impl Into<String>) -> Result<Self, VideoError> {
        let first = frames.first().ok_or(VideoError::Empty)?;
        let (w, h) = first.dims();
        for (i, f) in frames.iter().enumerate() {
            if f.dims() != (w, h) {
                return Err(VideoError::InconsistentFrame {
                    index: i,
                    width: f.width,
                    height: f.height,
                    expected_width: w,
                    expected_height: h,
                });
            }
        }
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, f)| f.with_index(i))
            .collect();
        Ok(Self {
            frames,
            fps,
            label: label.into(),
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn width(&self) -> usize {
        self.frames[0].width
    }

    pub fn height(&self) -> usize {
        self.frames[0].height
    }

    pub fn dims(&self) -> (usize, usize) {
        self.frames[0].dims()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Applies `f` to every frame, keeping fps and label.
    pub fn map_frames(&self, mut f: impl FnMut(&Frame) -> Frame) -> Self {
        let frames = self.frames.iter().map(&mut f).collect();
        Self {
            frames,
            fps: self.fps,
            label: self.label.clone(),
        }
    }
}

/// Reference and test sequences with matching length and dimensions.
#[derive(Debug, Clone)]
pub struct PairedSequences {
    pub reference: Sequence,
    pub test: Sequence,
}

pub fn validate_pair(reference: Sequence, test: Sequence) -> Result<PairedSequences, VideoError> {
    if reference.len() != test.len() {
        return Err(VideoError::LengthMismatch {
            reference: reference.len(),
            test: test.len(),
        });
    }
    if reference.dims() != test.dims() {
        let (rw, rh) = reference.dims();
        let (tw, th) = test.dims();
        return Err(VideoError::DimensionMismatch(rw, rh, tw, th));
    }
    Ok(PairedSequences { reference, test })
}

/// Bytes occupied by one 8-bit 4:2:0 frame.
pub fn yuv420_frame_bytes(width: usize, height: usize) -> usize {
    let cw = width.div_ceil(2);
    let ch = height.div_ceil(2);
    width * height + 2 * cw * ch
}

pub fn check_bit_depth(bits: u8) -> Result<(), VideoError> {
    if bits != 8 {
        return Err(VideoError::UnsupportedBitDepth(bits));
    }
    Ok(())
}

/// Decodes an in-memory 8-bit 4:2:0 planar buffer.
pub fn decode_yuv420(
    bytes: &[u8],
    width: usize,
    height: usize,
    fps: f64,
    label: impl Into<String>,
) -> Result<Sequence, VideoError> {
    check_dimensions(width, height)?;
    let frame_bytes = yuv420_frame_bytes(width, height);
    if bytes.is_empty() || bytes.len() % frame_bytes != 0 {
        return Err(VideoError::SizeMismatch {
            len: bytes.len(),
            frame_bytes,
        });
    }
    let luma_len = width * height;
    let frames = bytes
        .chunks_exact(frame_bytes)
        .enumerate()
        .map(|(i, chunk)| Frame {
            luma: chunk[..luma_len].to_vec(),
            width,
            height,
            index: i,
        })
        .collect();
    Sequence::new(frames, fps, label)
}

pub fn load_yuv_sequence(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    fps: f64,
) -> Result<Sequence, VideoError> {
    let path = path.as_ref();
    check_dimensions(width, height)?;
    let bytes = fs::read(path).map_err(|source| VideoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_yuv420(&bytes, width, height, fps, path.display().to_string())
}

/// Writes luma planes followed by neutral (128) chroma planes.
pub fn write_yuv_sequence(seq: &Sequence, path: impl AsRef<Path>) -> Result<(), VideoError> {
    let path = path.as_ref();
    let io_err = |source| VideoError::Io {
        path: path.display().to_string(),
        source,
    };
    let (w, h) = seq.dims();
    let chroma = vec![128u8; yuv420_frame_bytes(w, h) - w * h];
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = io::BufWriter::new(file);
    for frame in seq.frames() {
        out.write_all(frame.luma()).map_err(io_err)?;
        out.write_all(&chroma).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
