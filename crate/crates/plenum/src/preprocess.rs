//! Page preparation ahead of an external OCR engine.
//!
//! Scanned protocol pages arrive as 8-bit grayscale bitmaps. Before handing
//! them to the recognizer we binarize them with Otsu's threshold and undo
//! page skew. The skew estimate maximizes the variance of the horizontal
//! projection profile over a +/-5 degree sweep in 0.1 degree steps: text
//! lines produce the spikiest profile when they run exactly horizontal.
//!
//! All functions here are pure; pages can be processed in parallel without
//! shared state.

use std::path::Path;

use crate::error::{Error, Result};

/// 8-bit grayscale image, row-major, `0` = black and `255` = white.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayBitmap {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayBitmap {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Bitmap(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::Bitmap(format!("dimensions {width}x{height} overflow")))?;
        if pixels.len() != expected {
            return Err(Error::Bitmap(format!(
                "{width}x{height} needs {expected} pixels, got {}",
                pixels.len()
            )));
        }
        Ok(GrayBitmap {
            width,
            height,
            pixels,
        })
    }

    /// Uniform image of the given intensity.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }

    /// Count of pixels darker than mid-gray.
    pub fn dark_pixel_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p < 128).count()
    }
}

/// Per-intensity pixel counts; bin `b` counts pixels of value `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntensityHistogram {
    counts: [u64; 256],
}

impl IntensityHistogram {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        IntensityHistogram { counts }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn histogram(bitmap: &GrayBitmap) -> IntensityHistogram {
    let mut counts = [0u64; 256];
    for &p in bitmap.pixels() {
        counts[p as usize] += 1;
    }
    IntensityHistogram { counts }
}

/// Threshold level maximizing the between-class variance of the two-class
/// split `{<= t, > t}`. Ties resolve to the smallest level so that results
/// are reproducible across runs and implementations.
pub fn otsu_threshold(hist: &IntensityHistogram) -> Result<u8> {
    let total = hist.total();
    if total == 0 {
        return Err(Error::EmptyImage);
    }
    let weighted_total: u64 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u64 * c)
        .sum();

    let mut best_level = 0u8;
    let mut best_var = f64::NEG_INFINITY;
    let mut w0: u64 = 0;
    let mut sum0: u64 = 0;
    for t in 0..256usize {
        w0 += hist.counts[t];
        sum0 += t as u64 * hist.counts[t];
        let w1 = total - w0;
        let var = if w0 == 0 || w1 == 0 {
            0.0
        } else {
            let mu0 = sum0 as f64 / w0 as f64;
            let mu1 = (weighted_total - sum0) as f64 / w1 as f64;
            let d = mu0 - mu1;
            w0 as f64 * w1 as f64 * d * d
        };
        if var > best_var {
            best_var = var;
            best_level = t as u8;
        }
    }
    Ok(best_level)
}

/// Two-level quantization: pixels `<= t` become 0, the rest 255.
pub fn binarize(bitmap: &GrayBitmap, t: u8) -> GrayBitmap {
    let pixels = bitmap
        .pixels()
        .iter()
        .map(|&p| if p <= t { 0 } else { 255 })
        .collect();
    GrayBitmap {
        width: bitmap.width,
        height: bitmap.height,
        pixels,
    }
}

/// Sweep half-range in degrees for skew estimation.
pub const SKEW_RANGE_DEG: f64 = 5.0;
/// Sweep step in degrees.
pub const SKEW_STEP_DEG: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewEstimate {
    /// Rotation (degrees) that best aligns text rows; apply it with
    /// [`rotate`] to deskew. Always within `+/-SKEW_RANGE_DEG`.
    pub angle: f64,
    /// `(max variance - mean variance) / mean variance` over the sweep.
    /// Zero for blank pages; higher means a more pronounced optimum.
    pub confidence: f64,
}

/// Estimates page skew on a binarized bitmap.
///
/// For every candidate angle the dark pixels are projected onto image rows
/// and the variance of the row sums is taken; the candidate with the largest
/// variance wins. Sub-pixel rotations of short lines can leave a plateau of
/// equal variances, so ties resolve to the smallest |angle|. A page without
/// dark pixels yields angle 0, confidence 0.
pub fn estimate_skew(bitmap: &GrayBitmap) -> SkewEstimate {
    let cx = (bitmap.width as f64 - 1.0) / 2.0;
    let cy = (bitmap.height as f64 - 1.0) / 2.0;
    let mut dark = Vec::new();
    for y in 0..bitmap.height {
        for x in 0..bitmap.width {
            if bitmap.get(x, y) < 128 {
                dark.push((x as f64 - cx, y as f64 - cy));
            }
        }
    }
    if dark.is_empty() {
        return SkewEstimate {
            angle: 0.0,
            confidence: 0.0,
        };
    }

    let steps = (SKEW_RANGE_DEG / SKEW_STEP_DEG).round() as i32;
    let mut variances = Vec::with_capacity(2 * steps as usize + 1);
    let mut best_angle = 0.0f64;
    let mut best_var = f64::NEG_INFINITY;
    let mut rows = vec![0u32; bitmap.height];
    for i in -steps..=steps {
        let angle = i as f64 / 10.0;
        let (sin, cos) = angle.to_radians().sin_cos();
        rows.iter_mut().for_each(|r| *r = 0);
        for &(dx, dy) in &dark {
            let y = cy + sin * dx + cos * dy;
            let yi = y.round() as i64;
            if yi >= 0 && (yi as usize) < bitmap.height {
                rows[yi as usize] += 1;
            }
        }
        let var = row_variance(&rows);
        variances.push(var);
        if var > best_var || (var == best_var && angle.abs() < best_angle.abs()) {
            best_var = var;
            best_angle = angle;
        }
    }

    let mean = variances.iter().sum::<f64>() / variances.len() as f64;
    let confidence = if mean > 0.0 {
        (best_var - mean) / mean
    } else {
        0.0
    };
    SkewEstimate {
        angle: best_angle,
        confidence,
    }
}

fn row_variance(rows: &[u32]) -> f64 {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&r| r as f64).sum::<f64>() / n;
    rows.iter()
        .map(|&r| {
            let d = r as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n
}

/// Nearest-neighbor rotation about the image center. Pixels that fall
/// outside the source frame are filled white; dimensions are unchanged.
/// Intended for `|angle| <= 45` degrees.
pub fn rotate(bitmap: &GrayBitmap, angle_deg: f64) -> GrayBitmap {
    debug_assert!(angle_deg.abs() <= 45.0, "rotation angle out of range");
    if angle_deg == 0.0 {
        return bitmap.clone();
    }
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let cx = (bitmap.width as f64 - 1.0) / 2.0;
    let cy = (bitmap.height as f64 - 1.0) / 2.0;
    let mut pixels = vec![255u8; bitmap.width * bitmap.height];
    for y in 0..bitmap.height {
        let dy = y as f64 - cy;
        for x in 0..bitmap.width {
            let dx = x as f64 - cx;
            // Inverse mapping: sample the source at the back-rotated spot.
            let sx = (cx + cos * dx + sin * dy).round();
            let sy = (cy - sin * dx + cos * dy).round();
            if sx >= 0.0 && sy >= 0.0 && (sx as usize) < bitmap.width && (sy as usize) < bitmap.height
            {
                pixels[y * bitmap.width + x] = bitmap.get(sx as usize, sy as usize);
            }
        }
    }
    GrayBitmap {
        width: bitmap.width,
        height: bitmap.height,
        pixels,
    }
}

/// Binarize with Otsu's threshold, then undo the estimated skew.
pub fn prepare_page(bitmap: &GrayBitmap) -> Result<(GrayBitmap, SkewEstimate)> {
    let t = otsu_threshold(&histogram(bitmap))?;
    let binary = binarize(bitmap, t);
    let estimate = estimate_skew(&binary);
    let page = if estimate.angle == 0.0 {
        binary
    } else {
        rotate(&binary, estimate.angle)
    };
    Ok((page, estimate))
}

/// Contract for the external text recognizer: one prepared page bitmap in,
/// one list of page text lines out.
pub trait OcrAdapter {
    fn recognize(&self, page: &GrayBitmap, source: &Path) -> Result<Vec<String>>;
}

/// Reference adapter that reads pre-extracted text from a sibling file with
/// the same basename and a `.txt` extension. It lets the rest of the
/// pipeline run and be tested without any recognizer installed.
pub struct FileTextAdapter;

impl OcrAdapter for FileTextAdapter {
    fn recognize(&self, _page: &GrayBitmap, source: &Path) -> Result<Vec<String>> {
        let path = source.with_extension("txt");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(text.lines().map(str::to_owned).collect())
    }
}
