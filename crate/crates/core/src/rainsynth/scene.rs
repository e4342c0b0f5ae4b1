//! Synthetic sequences with a known answer: a textured background sliding
//! past the camera, optionally with one drop stuck at a fixed position.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::composite::{composite_drop, DropSpec};
use super::shape::DropShape;
use crate::detector::FrameSequence;
use crate::imgcore::{BinaryMask, GrayImage, KernelSize};
use crate::Result;

/// Uniform noise that shifts left by `step` pixels per frame.
pub fn translating_noise(
    width: usize,
    height: usize,
    frames: usize,
    step: usize,
    seed: u64,
) -> Result<Vec<GrayImage>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let canvas_w = width + step * frames.saturating_sub(1);
    let canvas = GrayImage::from_fn(canvas_w, height, |_, _| rng.gen())?;
    (0..frames)
        .map(|n| GrayImage::from_fn(width, height, |x, y| canvas.get(x + n * step, y)))
        .collect()
}

/// Composites the same drop into every frame and returns the drop's mask.
pub fn with_static_drop(
    frames: &[GrayImage],
    spec: &DropSpec,
) -> Result<(Vec<GrayImage>, BinaryMask)> {
    let mut mask = None;
    let mut out = Vec::with_capacity(frames.len());
    for f in frames {
        let (img, m) = composite_drop(f, spec)?;
        out.push(img);
        mask.get_or_insert(m);
    }
    let mask = match mask {
        Some(m) => m,
        None => return Err(crate::Error::Input("no frames to composite into".into())),
    };
    Ok((out, mask))
}

/// Labeled synthetic sequence.
#[derive(Clone, Debug)]
pub struct SceneFixture {
    pub sequence: FrameSequence,
    /// Ground-truth drop mask; empty for clean fixtures.
    pub mask: BinaryMask,
    pub drop: Option<DropSpec>,
}

/// Knobs for [`drop_fixture`] and [`clean_fixture`].
#[derive(Clone, Debug, PartialEq)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    /// Background shift per frame, pixels.
    pub step: usize,
    pub r_min: usize,
    pub r_max: usize,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 128,
            height: 128,
            frames: 10,
            step: 2,
            r_min: 15,
            r_max: 30,
        }
    }
}

/// Translating noise with one opaque, strongly blurred drop placed so the
/// whole outline lies inside the frame.
pub fn drop_fixture(params: &SceneParams, seed: u64) -> Result<SceneFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d40b);
    let r = rng.gen_range(params.r_min..=params.r_max);
    let top = (r as f64 * super::shape::EGG_TOP_RATIO).ceil() as usize + 1;
    if params.width < 2 * r + 3 || params.height < top + r + 2 {
        return Err(crate::Error::Parameter(format!(
            "a drop of radius {r} does not fit inside {}x{}",
            params.width, params.height
        )));
    }
    let cx = rng.gen_range(r + 1..params.width - r - 1);
    let cy = rng.gen_range(top..params.height - r - 1);
    let spec = DropSpec {
        shape: DropShape::ALL[rng.gen_range(0..3)],
        radius: r,
        center: (cx, cy),
        alpha_brightness: 255,
        alpha_blur: KernelSize::nearest_odd(r as f64 * 0.2),
        patch_blur: KernelSize::nearest_odd(r as f64),
        fisheye_strength: rng.gen_range(0.2..0.6),
        darken_factor: 0.3,
    };
    let background = translating_noise(
        params.width,
        params.height,
        params.frames,
        params.step,
        seed,
    )?;
    let (frames, mask) = with_static_drop(&background, &spec)?;
    Ok(SceneFixture {
        sequence: FrameSequence::new(frames, format!("drop-{seed}"))?,
        mask,
        drop: Some(spec),
    })
}

/// Translating noise without any drop.
pub fn clean_fixture(params: &SceneParams, seed: u64) -> Result<SceneFixture> {
    let frames = translating_noise(
        params.width,
        params.height,
        params.frames,
        params.step,
        seed,
    )?;
    Ok(SceneFixture {
        sequence: FrameSequence::new(frames, format!("clean-{seed}"))?,
        mask: BinaryMask::empty(params.width, params.height)?,
        drop: None,
    })
}
