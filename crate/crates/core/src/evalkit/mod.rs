//! Evaluation: segmentation scores, accumulated Dice, ROC sweeps, AUC and
//! detector timing, plus CSV/JSON writers with six-decimal numbers.

mod bench;
mod metrics;
pub mod report;
mod roc;

pub use bench::{bench_pipeline, median, BenchReport, StageTimings};
pub use metrics::{accumulated_dice, seg_scores, Confusion, DicePair, DiceStyle, SegScores};
pub use roc::{
    auc, default_t_b_sweep, roc_sweep, FnSweep, GradientSweep, LabeledSequence, NccSweep, RocCurve,
    RocPoint, RocSweep, SweepDetector, SweepRecord,
};
