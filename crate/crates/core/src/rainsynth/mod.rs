//! Synthetic raindrop rendering for data augmentation.
//!
//! A drop is drawn as a blurred alpha map (circle, egg or Bezier lens). The
//! image patch under it is blurred and barrel-distorted, pasted darkened to
//! form a rim, then pasted again on top through the same alpha map.

mod composite;
mod fisheye;
mod generate;
pub mod scene;
mod shape;

pub use composite::{composite_drop, DropSpec, MASK_ALPHA_THRESHOLD};
pub use fisheye::fisheye;
pub use generate::{generate_drops, SynthConfig, SynthOutput};
pub use shape::{make_alpha_map, DropShape, BEZIER_PULL, EGG_TOP_RATIO};
