//! ROC sweep of the binarization threshold over labeled synthetic sequences,
//! for the gradient detector and the NCC baseline.
//!
//! cargo run --release --example roc_sweep

use raindrop::detector::{DetectorParams, FrameSequence};
use raindrop::evalkit::{default_t_b_sweep, roc_sweep, GradientSweep, LabeledSequence, NccSweep};
use raindrop::imgcore::GrayImage;
use raindrop::ncc::NccParams;
use raindrop::rainsynth::scene::{clean_fixture, drop_fixture, SceneParams};

fn main() -> raindrop::Result<()> {
    let scene = SceneParams::default();
    let mut set = Vec::new();
    for seed in 0..8 {
        set.push(LabeledSequence::new(
            drop_fixture(&scene, seed)?.sequence,
            true,
        ));
        set.push(LabeledSequence::new(
            clean_fixture(&scene, 100 + seed)?.sequence,
            false,
        ));
    }
    // A lens fully covered by a drop: featureless frames.
    let covered = vec![GrayImage::filled(scene.width, scene.height, 90)?; scene.frames];
    set.push(LabeledSequence::new(
        FrameSequence::new(covered, "covered")?,
        true,
    ));

    let thresholds = default_t_b_sweep();
    let base = DetectorParams::default().scaled_for_width(scene.width);
    let gradient = roc_sweep(&set, &GradientSweep { base }, &thresholds)?;
    let ncc = roc_sweep(
        &set,
        &NccSweep {
            base: NccParams::default(),
        },
        &thresholds,
    )?;

    println!("threshold  gradient(fpr,tpr)  ncc(fpr,tpr)");
    for (g, n) in gradient.curve.measured().iter().zip(ncc.curve.measured()) {
        println!(
            "{:>9.2}  ({:.3}, {:.3})     ({:.3}, {:.3})",
            g.threshold.unwrap_or(f64::NAN),
            g.fpr,
            g.tpr,
            n.fpr,
            n.tpr
        );
    }
    println!("AUC gradient {:.4}  ncc {:.4}", gradient.auc(), ncc.auc());
    Ok(())
}
