//! Normalized cross-correlation baseline.
//!
//! Static content correlates strongly between consecutive frames, so pixels
//! whose mean windowed correlation stays high are flagged as artifacts. The
//! windowed moments come from [`box_filter`], making the per-pair cost linear
//! in the image size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{DetectionResult, FrameSequence};
use crate::imgcore::{box_filter, ensure_same_dims, BinaryMask, GrayImage, KernelSize, ScalarMap};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NccParams {
    pub window: KernelSize,
    /// Added to both windowed variances of `[0, 1]`-scaled intensities.
    pub eps: f64,
    /// Correlation at or above which a pixel is static.
    pub t_c: f64,
    pub t_d: f64,
}

impl Default for NccParams {
    fn default() -> Self {
        Self {
            window: KernelSize::new(11).unwrap(),
            eps: 1e-4,
            t_c: 0.8,
            t_d: 0.1,
        }
    }
}

impl NccParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Parameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if !(-1.0..=1.0).contains(&self.t_c) {
            return Err(Error::Parameter(format!(
                "t_c must lie in [-1, 1], got {}",
                self.t_c
            )));
        }
        if !(0.0..=1.0).contains(&self.t_d) {
            return Err(Error::Parameter(format!(
                "t_d must lie in [0, 1], got {}",
                self.t_d
            )));
        }
        Ok(())
    }

    pub fn with_t_c(mut self, t_c: f64) -> Self {
        self.t_c = t_c;
        self
    }
}

fn unit_scaled(img: &GrayImage) -> ScalarMap {
    img.to_scalar_map().map(|v| v / 255.0)
}

fn product(a: &ScalarMap, b: &ScalarMap) -> ScalarMap {
    let data = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x * y)
        .collect();
    ScalarMap::new(a.width(), a.height(), data).expect("same dimensions")
}

/// Windowed Pearson correlation between two frames, clamped to `[-1, 1]`.
///
/// `(E[ab] - E[a]E[b]) / sqrt((Var[a] + eps) (Var[b] + eps))` over `[0, 1]`
/// intensities. The expression is symmetric in its arguments bit for bit.
pub fn ncc_map(a: &GrayImage, b: &GrayImage, window: KernelSize, eps: f64) -> Result<ScalarMap> {
    ensure_same_dims("NCC frame pair", a.dims(), b.dims())?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    let (fa, fb) = (unit_scaled(a), unit_scaled(b));
    let mean_a = box_filter(&fa, window)?;
    let mean_b = box_filter(&fb, window)?;
    let mean_aa = box_filter(&product(&fa, &fa), window)?;
    let mean_bb = box_filter(&product(&fb, &fb), window)?;
    let mean_ab = box_filter(&product(&fa, &fb), window)?;

    let data = (0..fa.as_slice().len())
        .map(|i| {
            let (ma, mb) = (mean_a.as_slice()[i], mean_b.as_slice()[i]);
            let var_a = (mean_aa.as_slice()[i] - ma * ma).max(0.0);
            let var_b = (mean_bb.as_slice()[i] - mb * mb).max(0.0);
            let cov = mean_ab.as_slice()[i] - ma * mb;
            (cov / ((var_a + eps) * (var_b + eps)).sqrt()).clamp(-1.0, 1.0)
        })
        .collect();
    ScalarMap::new(a.width(), a.height(), data)
}

/// Mean correlation over all consecutive frame pairs.
pub fn mean_ncc(seq: &FrameSequence, window: KernelSize, eps: f64) -> Result<ScalarMap> {
    if seq.len() < 2 {
        return Err(Error::Input(format!(
            "NCC needs at least two frames, sequence '{}' has {}",
            seq.source_id(),
            seq.len()
        )));
    }
    let frames = seq.frames();
    let maps = frames
        .par_windows(2)
        .map(|pair| ncc_map(&pair[0], &pair[1], window, eps))
        .collect::<Result<Vec<_>>>()?;
    let (w, h) = seq.dims();
    let mut sum = vec![0.0f64; w * h];
    for m in &maps {
        for (s, &v) in sum.iter_mut().zip(m.as_slice()) {
            *s += v;
        }
    }
    let pairs = maps.len() as f64;
    ScalarMap::new(w, h, sum.into_iter().map(|s| s / pairs).collect())
}

/// Static-region detection: pixels with mean correlation `>= t_c`.
pub fn ncc_detect(seq: &FrameSequence, params: &NccParams) -> Result<DetectionResult> {
    params.validate()?;
    let corr = mean_ncc(seq, params.window, params.eps)?;
    let (w, h) = corr.dims();
    let mask = BinaryMask::new(
        w,
        h,
        corr.as_slice().iter().map(|&c| c >= params.t_c).collect(),
    )?;
    Ok(DetectionResult::from_mask(mask, corr, params.t_d))
}
