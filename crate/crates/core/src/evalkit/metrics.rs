use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::imgcore::{ensure_same_dims, BinaryMask};
use crate::{Error, Result};

/// Pixel counts of a predicted mask against ground truth, artifact = positive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn from_masks(pred: &BinaryMask, gt: &BinaryMask) -> Result<Self> {
        ensure_same_dims("prediction vs ground truth", pred.dims(), gt.dims())?;
        let mut c = Confusion::default();
        for (&p, &g) in pred.as_slice().iter().zip(gt.as_slice()) {
            match (p, g) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegScores {
    pub iou: f64,
    pub dice: f64,
    pub accuracy: f64,
}

impl SegScores {
    /// Scores from counts; an empty prediction of an empty truth scores 1.
    pub fn from_confusion(c: &Confusion) -> Self {
        let (tp, fp, fn_) = (c.tp as f64, c.fp as f64, c.fn_ as f64);
        let (iou, dice) = if c.tp + c.fp + c.fn_ == 0 {
            (1.0, 1.0)
        } else {
            (tp / (tp + fp + fn_), 2.0 * tp / (2.0 * tp + fp + fn_))
        };
        let accuracy = if c.total() == 0 {
            1.0
        } else {
            (c.tp + c.tn) as f64 / c.total() as f64
        };
        Self {
            iou,
            dice,
            accuracy,
        }
    }

    /// Component-wise mean; `None` for an empty slice.
    pub fn mean(scores: &[SegScores]) -> Option<SegScores> {
        if scores.is_empty() {
            return None;
        }
        let n = scores.len() as f64;
        Some(SegScores {
            iou: scores.iter().map(|s| s.iou).sum::<f64>() / n,
            dice: scores.iter().map(|s| s.dice).sum::<f64>() / n,
            accuracy: scores.iter().map(|s| s.accuracy).sum::<f64>() / n,
        })
    }
}

/// IoU, Dice and pixel accuracy of `pred` against `gt`.
pub fn seg_scores(pred: &BinaryMask, gt: &BinaryMask) -> Result<SegScores> {
    Ok(SegScores::from_confusion(&Confusion::from_masks(pred, gt)?))
}

/// Normalization of accumulated Dice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiceStyle {
    /// `2 ΣI / ΣU`: a perfect prediction scores 1.
    #[default]
    Doubled,
    /// `ΣI / ΣU`: a perfect prediction scores 0.5 when `U = |A| + |B|`.
    Literal,
}

impl FromStr for DiceStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "doubled" => Ok(DiceStyle::Doubled),
            "literal" => Ok(DiceStyle::Literal),
            other => Err(Error::Parameter(format!(
                "dice style must be 'doubled' or 'literal', got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for DiceStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiceStyle::Doubled => "doubled",
            DiceStyle::Literal => "literal",
        })
    }
}

/// Per-sequence counts feeding accumulated Dice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DicePair {
    /// `|pred ∩ gt|`.
    pub intersection: i64,
    /// `|pred| + |gt|`, or `|pred ∪ gt|` for the union reading.
    pub area: i64,
}

impl DicePair {
    pub fn new(intersection: i64, area: i64) -> Self {
        Self { intersection, area }
    }

    /// `I = |pred ∩ gt|`, `U = |pred| + |gt|`.
    pub fn from_masks(pred: &BinaryMask, gt: &BinaryMask) -> Result<Self> {
        let c = Confusion::from_masks(pred, gt)?;
        Ok(Self::new(c.tp as i64, (2 * c.tp + c.fp + c.fn_) as i64))
    }

    /// `I = |pred ∩ gt|`, `U = |pred ∪ gt|`.
    pub fn from_masks_union(pred: &BinaryMask, gt: &BinaryMask) -> Result<Self> {
        let c = Confusion::from_masks(pred, gt)?;
        Ok(Self::new(c.tp as i64, (c.tp + c.fp + c.fn_) as i64))
    }
}

/// Dataset-level Dice from summed counts, clamped to `[0, 1]`.
///
/// An all-empty dataset (`ΣU = 0`) scores 1.
pub fn accumulated_dice(pairs: &[DicePair], style: DiceStyle) -> Result<f64> {
    let (mut si, mut su) = (0i64, 0i64);
    for (i, p) in pairs.iter().enumerate() {
        if p.intersection < 0 || p.area < 0 {
            return Err(Error::Validation(format!(
                "pair #{i} has a negative count ({}, {})",
                p.intersection, p.area
            )));
        }
        if p.area < p.intersection {
            return Err(Error::Validation(format!(
                "pair #{i}: area {} is smaller than intersection {}",
                p.area, p.intersection
            )));
        }
        si += p.intersection;
        su += p.area;
    }
    if su == 0 {
        return Ok(1.0);
    }
    let k = match style {
        DiceStyle::Doubled => 2.0,
        DiceStyle::Literal => 1.0,
    };
    Ok((k * si as f64 / su as f64).clamp(0.0, 1.0))
}
