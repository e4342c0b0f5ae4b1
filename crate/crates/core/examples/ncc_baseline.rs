//! NCC baseline next to the gradient detector on the same sequence.
//!
//! cargo run --release --example ncc_baseline

use std::time::Instant;

use raindrop::detector::{detect, DetectorParams};
use raindrop::evalkit::seg_scores;
use raindrop::ncc::{ncc_detect, NccParams};
use raindrop::rainsynth::scene::{drop_fixture, SceneParams};

fn main() -> raindrop::Result<()> {
    let scene = SceneParams {
        width: 256,
        height: 192,
        r_min: 45,
        r_max: 55,
        ..SceneParams::default()
    };
    let fx = drop_fixture(&scene, 3)?;

    let start = Instant::now();
    let g = detect(
        &fx.sequence,
        &DetectorParams::default().scaled_for_width(scene.width),
    )?;
    let g_ms = start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let n = ncc_detect(&fx.sequence, &NccParams::default())?;
    let n_ms = start.elapsed().as_secs_f64() * 1e3;

    for (name, r, ms) in [("gradient", &g, g_ms), ("ncc", &n, n_ms)] {
        println!(
            "{name:<9} detected={} fraction={:.4} IoU={:.3} time={ms:.1} ms",
            r.detected,
            r.artifact_fraction,
            seg_scores(&r.mask, &fx.mask)?.iou
        );
    }
    Ok(())
}
