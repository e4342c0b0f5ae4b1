use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::detector::{averaged_gradient, detect, DetectorParams, FrameSequence};
use crate::imgcore::{dilate, gaussian_blur, threshold_inverse};
use crate::ncc::{ncc_detect, NccParams};
use crate::{Error, Result};

/// Median time of each gradient-pipeline stage, milliseconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub averaged_gradient_ms: f64,
    pub blur_ms: f64,
    pub threshold_ms: f64,
    pub dilate_ms: f64,
}

impl StageTimings {
    pub fn sum_ms(&self) -> f64 {
        self.averaged_gradient_ms + self.blur_ms + self.threshold_ms + self.dilate_ms
    }
}

/// Median wall-clock timings of both detectors on one sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Rayon worker count the timed sections ran with.
    pub threads: usize,
    pub repeats: usize,
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    pub gradient_ms: f64,
    pub gradient_stages: StageTimings,
    pub ncc_ms: f64,
    /// `ncc_ms / gradient_ms`.
    pub ncc_over_gradient: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Median of a nonempty sample; even lengths average the middle pair.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, ms(start.elapsed())))
}

/// Times the gradient detector, its stages, and the NCC baseline `repeats`
/// times each on the same input and reports medians.
///
/// Parallelism follows the calling rayon pool; run inside a one-thread pool
/// for single-threaded numbers.
pub fn bench_pipeline(
    seq: &FrameSequence,
    gradient: &DetectorParams,
    ncc: &NccParams,
    repeats: usize,
) -> Result<BenchReport> {
    if repeats == 0 {
        return Err(Error::Parameter("repeats must be at least 1".into()));
    }
    gradient.validate()?;
    ncc.validate()?;
    let mut total = Vec::with_capacity(repeats);
    let mut stages = [const { Vec::new() }; 4];
    let mut ncc_times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let (_, t) = timed(|| detect(seq, gradient))?;
        total.push(t);

        let (avg, t0) = timed(|| averaged_gradient(seq, gradient.sobel_aperture))?;
        let (blurred, t1) = timed(|| gaussian_blur(&avg, gradient.gauss_d))?;
        let (binary, t2) = timed(|| threshold_inverse(&blurred, gradient.t_b))?;
        let (_, t3) = timed(|| dilate(&binary, gradient.dilate_m))?;
        for (s, t) in stages.iter_mut().zip([t0, t1, t2, t3]) {
            s.push(t);
        }

        let (_, t) = timed(|| ncc_detect(seq, ncc))?;
        ncc_times.push(t);
    }
    let gradient_ms = median(&total);
    let ncc_ms = median(&ncc_times);
    let (w, h) = seq.dims();
    Ok(BenchReport {
        threads: rayon::current_num_threads(),
        repeats,
        frames: seq.len(),
        width: w,
        height: h,
        gradient_ms,
        gradient_stages: StageTimings {
            averaged_gradient_ms: median(&stages[0]),
            blur_ms: median(&stages[1]),
            threshold_ms: median(&stages[2]),
            dilate_ms: median(&stages[3]),
        },
        ncc_ms,
        ncc_over_gradient: ncc_ms / gradient_ms,
    })
}
