//! Segmentation metrics: per-mask IoU, Dice and accuracy, and dataset-level
//! accumulated Dice in both normalizations.
//!
//! cargo run --example segmentation_scores

use raindrop::evalkit::{accumulated_dice, seg_scores, DicePair, DiceStyle};
use raindrop::imgcore::BinaryMask;

fn disk(cx: f64, cy: f64, r: f64) -> BinaryMask {
    BinaryMask::from_fn(64, 64, |x, y| {
        let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
        dx * dx + dy * dy <= r * r
    })
    .expect("nonzero size")
}

fn main() -> raindrop::Result<()> {
    let cases = [
        ("exact", disk(32.0, 32.0, 10.0), disk(32.0, 32.0, 10.0)),
        ("shifted", disk(35.0, 32.0, 10.0), disk(32.0, 32.0, 10.0)),
        ("too large", disk(32.0, 32.0, 14.0), disk(32.0, 32.0, 10.0)),
        ("missed", BinaryMask::empty(64, 64)?, disk(20.0, 20.0, 6.0)),
        (
            "clean",
            BinaryMask::empty(64, 64)?,
            BinaryMask::empty(64, 64)?,
        ),
    ];
    let mut pairs = Vec::new();
    for (name, pred, gt) in &cases {
        let s = seg_scores(pred, gt)?;
        println!(
            "{name:<10} IoU={:.4} Dice={:.4} accuracy={:.4}",
            s.iou, s.dice, s.accuracy
        );
        pairs.push(DicePair::from_masks(pred, gt)?);
    }
    println!(
        "accumulated Dice: doubled={:.4} literal={:.4}",
        accumulated_dice(&pairs, DiceStyle::Doubled)?,
        accumulated_dice(&pairs, DiceStyle::Literal)?
    );
    Ok(())
}
