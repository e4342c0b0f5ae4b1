//! Averaged-gradient raindrop detector.
//!
//! For a sequence of `N` frames the per-frame Sobel magnitudes are averaged
//! pixel-wise. Drops stay put and blur what is behind them, so their footprint
//! stays dark in the averaged map while moving scene content keeps it bright.
//! The averaged map is smoothed with a `d x d` Gaussian, inversely binarized
//! at `t_b` times its maximum, and the result is dilated with an `m x m`
//! square. The sequence is flagged when the artifact fraction exceeds `t_d`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::imgcore::{
    dilate, gaussian_blur, sobel_magnitude, threshold_inverse, BinaryMask, GrayImage, KernelSize,
    ScalarMap,
};
use crate::{Error, Result};

/// Frame size the default kernel extents were tuned for.
pub const REFERENCE_RESOLUTION: (usize, usize) = (1920, 1080);

/// Ordered, equally sized grayscale frames from one camera.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSequence {
    frames: Vec<GrayImage>,
    source_id: String,
}

impl FrameSequence {
    pub fn new(frames: Vec<GrayImage>, source_id: impl Into<String>) -> Result<Self> {
        let source_id = source_id.into();
        let Some(first) = frames.first() else {
            return Err(Error::Input(format!(
                "sequence '{source_id}' has no frames"
            )));
        };
        let dims = first.dims();
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.dims() != dims) {
            return Err(Error::Dimension(format!(
                "sequence '{source_id}': frame 0 is {}x{} but frame {i} is {}x{}",
                dims.0,
                dims.1,
                f.width(),
                f.height()
            )));
        }
        Ok(Self { frames, source_id })
    }

    pub fn frames(&self) -> &[GrayImage] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<GrayImage> {
        self.frames
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.frames[0].dims()
    }

    /// Resamples every frame to `width x height` with nearest-neighbour.
    pub fn resized(&self, width: usize, height: usize) -> Result<Self> {
        let frames = self
            .frames
            .iter()
            .map(|f| crate::imgcore::resize_nearest(f, width, height))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames, self.source_id.clone())
    }
}

/// Tunable parameters of the gradient detector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorParams {
    pub sobel_aperture: KernelSize,
    /// Gaussian kernel size `d`.
    pub gauss_d: KernelSize,
    /// Binarization fraction `t_b` of the blurred map maximum.
    pub t_b: f64,
    /// Dilation square size `m`.
    pub dilate_m: KernelSize,
    /// Detection threshold `t_d` on the artifact fraction.
    pub t_d: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            sobel_aperture: KernelSize::new(5).unwrap(),
            gauss_d: KernelSize::new(271).unwrap(),
            t_b: 0.18,
            dilate_m: KernelSize::new(91).unwrap(),
            t_d: 0.1,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.sobel_aperture.get(), 3 | 5) {
            return Err(Error::Parameter(format!(
                "Sobel aperture must be 3 or 5, got {}",
                self.sobel_aperture
            )));
        }
        for (name, v) in [("t_b", self.t_b), ("t_d", self.t_d)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Parameter(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_t_b(mut self, t_b: f64) -> Self {
        self.t_b = t_b;
        self
    }

    /// Scales `d` and `m` by `factor`, rounding each to the nearest odd size.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.gauss_d = self.gauss_d.scaled(factor);
        self.dilate_m = self.dilate_m.scaled(factor);
        self
    }

    /// Scales `d` and `m` by `width / REFERENCE_RESOLUTION.0`.
    pub fn scaled_for_width(self, width: usize) -> Self {
        self.scaled(width as f64 / REFERENCE_RESOLUTION.0 as f64)
    }
}

/// Outcome of running a detector over one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    /// `artifact_fraction > t_d`.
    pub detected: bool,
    pub artifact_fraction: f64,
    pub mask: BinaryMask,
    /// Averaged map the mask was derived from: mean gradient magnitude for the
    /// gradient detector, mean correlation for the NCC baseline.
    pub response: ScalarMap,
}

impl DetectionResult {
    /// Wraps a mask, deciding `detected` as `fraction > t_d`.
    pub fn from_mask(mask: BinaryMask, response: ScalarMap, t_d: f64) -> Self {
        let artifact_fraction = mask.fraction();
        Self {
            detected: artifact_fraction > t_d,
            artifact_fraction,
            mask,
            response,
        }
    }
}

/// Sobel magnitude of a single frame.
pub fn frame_gradient(frame: &GrayImage, aperture: KernelSize) -> Result<ScalarMap> {
    sobel_magnitude(frame, aperture)
}

/// Pixel-wise mean of the per-frame gradient magnitudes.
///
/// Frames are processed in parallel and summed in frame order, so the result
/// does not depend on the thread count.
pub fn averaged_gradient(seq: &FrameSequence, aperture: KernelSize) -> Result<ScalarMap> {
    let (w, h) = seq.dims();
    let magnitudes = seq
        .frames()
        .par_iter()
        .map(|f| frame_gradient(f, aperture))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = vec![0.0f64; w * h];
    for m in &magnitudes {
        for (s, &v) in sum.iter_mut().zip(m.as_slice()) {
            *s += v;
        }
    }
    let n = seq.len() as f64;
    for s in &mut sum {
        *s /= n;
    }
    ScalarMap::new(w, h, sum)
}

/// Blur, inverse threshold and dilation applied to an averaged gradient map.
pub fn segment_averaged(averaged: &ScalarMap, params: &DetectorParams) -> Result<BinaryMask> {
    params.validate()?;
    let blurred = gaussian_blur(averaged, params.gauss_d)?;
    segment_blurred(&blurred, params)
}

/// Inverse threshold and dilation applied to an already blurred map. The
/// blur does not depend on `t_b`, so threshold sweeps can reuse it.
pub fn segment_blurred(blurred: &ScalarMap, params: &DetectorParams) -> Result<BinaryMask> {
    params.validate()?;
    let binary = threshold_inverse(blurred, params.t_b)?;
    dilate(&binary, params.dilate_m)
}

/// Raindrop segmentation mask for a sequence.
pub fn segment(seq: &FrameSequence, params: &DetectorParams) -> Result<BinaryMask> {
    params.validate()?;
    let averaged = averaged_gradient(seq, params.sobel_aperture)?;
    segment_averaged(&averaged, params)
}

/// Full detection: segmentation plus the `t_d` decision.
pub fn detect(seq: &FrameSequence, params: &DetectorParams) -> Result<DetectionResult> {
    params.validate()?;
    let averaged = averaged_gradient(seq, params.sobel_aperture)?;
    let mask = segment_averaged(&averaged, params)?;
    Ok(DetectionResult::from_mask(mask, averaged, params.t_d))
}
