use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataio::{load_sequence, SequenceManifest};
use crate::detector::{
    averaged_gradient, segment_blurred, DetectionResult, DetectorParams, FrameSequence,
};
use crate::imgcore::{gaussian_blur, ScalarMap};
use crate::ncc::{mean_ncc, NccParams};
use crate::{Error, Result};

/// One operating point. Virtual endpoints carry no threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: Option<f64>,
    pub fpr: f64,
    pub tpr: f64,
}

impl RocPoint {
    pub fn new(threshold: Option<f64>, fpr: f64, tpr: f64) -> Self {
        Self {
            threshold,
            fpr,
            tpr,
        }
    }
}

/// Operating points bracketed by the virtual endpoints `(0, 0)` and `(1, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    points: Vec<RocPoint>,
}

impl RocCurve {
    /// Builds a curve from measured points, adding the endpoints.
    pub fn new(measured: Vec<RocPoint>) -> Result<Self> {
        if let Some(p) = measured
            .iter()
            .find(|p| !(0.0..=1.0).contains(&p.fpr) || !(0.0..=1.0).contains(&p.tpr))
        {
            return Err(Error::Validation(format!(
                "ROC rates must lie in [0, 1], got fpr={} tpr={}",
                p.fpr, p.tpr
            )));
        }
        let mut points = Vec::with_capacity(measured.len() + 2);
        points.push(RocPoint::new(None, 0.0, 0.0));
        points.extend(measured);
        points.push(RocPoint::new(None, 1.0, 1.0));
        Ok(Self { points })
    }

    /// Curve from bare `(fpr, tpr)` pairs.
    pub fn from_rates(rates: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            rates
                .iter()
                .map(|&(f, t)| RocPoint::new(None, f, t))
                .collect(),
        )
    }

    /// All points, endpoints included, in construction order.
    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    /// Measured points only.
    pub fn measured(&self) -> &[RocPoint] {
        &self.points[1..self.points.len() - 1]
    }
}

/// Trapezoidal area under the curve, points sorted by FPR then TPR.
pub fn auc(curve: &RocCurve) -> f64 {
    let mut pts: Vec<(f64, f64)> = curve.points().iter().map(|p| (p.fpr, p.tpr)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// `0.10, 0.15, ..., 0.90`.
pub fn default_t_b_sweep() -> Vec<f64> {
    (0..17).map(|i| f64::from(10 + 5 * i) / 100.0).collect()
}

/// A sequence with its ground-truth class.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSequence {
    pub sequence: FrameSequence,
    pub has_drops: bool,
}

impl LabeledSequence {
    pub fn new(sequence: FrameSequence, has_drops: bool) -> Self {
        Self {
            sequence,
            has_drops,
        }
    }

    pub fn load(manifest: &SequenceManifest) -> Result<Self> {
        Ok(Self::new(load_sequence(manifest)?, manifest.has_drops))
    }

    pub fn id(&self) -> &str {
        self.sequence.source_id()
    }
}

/// A classifier with one swept threshold. `prepare` holds the work that does
/// not depend on the threshold and runs once per sequence.
pub trait SweepDetector: Sync {
    type Prepared: Send + Sync;

    fn prepare(&self, seq: &FrameSequence) -> Result<Self::Prepared>;

    fn classify(&self, prepared: &Self::Prepared, threshold: f64) -> Result<DetectionResult>;
}

/// The gradient detector swept over `t_b`; the blurred map is computed once.
#[derive(Clone, Copy, Debug)]
pub struct GradientSweep {
    pub base: DetectorParams,
}

impl SweepDetector for GradientSweep {
    type Prepared = (ScalarMap, ScalarMap);

    fn prepare(&self, seq: &FrameSequence) -> Result<Self::Prepared> {
        self.base.validate()?;
        let averaged = averaged_gradient(seq, self.base.sobel_aperture)?;
        let blurred = gaussian_blur(&averaged, self.base.gauss_d)?;
        Ok((averaged, blurred))
    }

    fn classify(&self, (averaged, blurred): &Self::Prepared, t_b: f64) -> Result<DetectionResult> {
        let params = self.base.with_t_b(t_b);
        let mask = segment_blurred(blurred, &params)?;
        Ok(DetectionResult::from_mask(
            mask,
            averaged.clone(),
            params.t_d,
        ))
    }
}

/// The NCC baseline swept over `t_c`; the mean correlation is computed once.
#[derive(Clone, Copy, Debug)]
pub struct NccSweep {
    pub base: NccParams,
}

impl SweepDetector for NccSweep {
    type Prepared = ScalarMap;

    fn prepare(&self, seq: &FrameSequence) -> Result<Self::Prepared> {
        self.base.validate()?;
        mean_ncc(seq, self.base.window, self.base.eps)
    }

    fn classify(&self, corr: &Self::Prepared, t_c: f64) -> Result<DetectionResult> {
        let params = self.base.with_t_c(t_c);
        params.validate()?;
        let (w, h) = corr.dims();
        let mask = crate::imgcore::BinaryMask::new(
            w,
            h,
            corr.as_slice().iter().map(|&c| c >= t_c).collect(),
        )?;
        Ok(DetectionResult::from_mask(mask, corr.clone(), params.t_d))
    }
}

/// Adapts a plain `(sequence, threshold) -> result` function.
pub struct FnSweep<F>(pub F);

impl<F> SweepDetector for FnSweep<F>
where
    F: Fn(&FrameSequence, f64) -> Result<DetectionResult> + Sync,
{
    type Prepared = FrameSequence;

    fn prepare(&self, seq: &FrameSequence) -> Result<Self::Prepared> {
        Ok(seq.clone())
    }

    fn classify(&self, seq: &Self::Prepared, threshold: f64) -> Result<DetectionResult> {
        (self.0)(seq, threshold)
    }
}

/// One detector decision in a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub sequence_id: String,
    pub has_drops: bool,
    pub threshold: f64,
    pub detected: bool,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocSweep {
    pub curve: RocCurve,
    /// Threshold-major, sequences in input order.
    pub records: Vec<SweepRecord>,
}

impl RocSweep {
    pub fn auc(&self) -> f64 {
        auc(&self.curve)
    }
}

/// Classifies every sequence at every threshold and turns the decisions into
/// a ROC curve. Work runs in parallel; counts are aggregated in input order.
pub fn roc_sweep<D: SweepDetector>(
    sequences: &[LabeledSequence],
    detector: &D,
    thresholds: &[f64],
) -> Result<RocSweep> {
    let positives = sequences.iter().filter(|s| s.has_drops).count();
    let negatives = sequences.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Protocol(format!(
            "ROC needs sequences of both classes, got {positives} with drops and {negatives} without"
        )));
    }
    if thresholds.is_empty() {
        return Err(Error::Parameter("threshold sweep is empty".into()));
    }
    if let Some(t) = thresholds.iter().find(|t| !t.is_finite()) {
        return Err(Error::Parameter(format!("threshold {t} is not finite")));
    }
    let prepared = sequences
        .par_iter()
        .map(|s| detector.prepare(&s.sequence))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(thresholds.len() * sequences.len());
    let mut measured = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let decisions = prepared
            .par_iter()
            .map(|p| {
                detector
                    .classify(p, t)
                    .map(|r| (r.detected, r.artifact_fraction))
            })
            .collect::<Result<Vec<_>>>()?;
        let (mut tp, mut fp) = (0usize, 0usize);
        for (s, &(detected, fraction)) in sequences.iter().zip(&decisions) {
            if detected {
                if s.has_drops {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
            records.push(SweepRecord {
                sequence_id: s.id().to_string(),
                has_drops: s.has_drops,
                threshold: t,
                detected,
                fraction,
            });
        }
        measured.push(RocPoint::new(
            Some(t),
            fp as f64 / negatives as f64,
            tp as f64 / positives as f64,
        ));
    }
    Ok(RocSweep {
        curve: RocCurve::new(measured)?,
        records,
    })
}
