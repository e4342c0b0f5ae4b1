use serde::{Deserialize, Serialize};

use super::fisheye::fisheye;
use super::shape::{make_alpha_map, DropShape};
use crate::imgcore::{gaussian_blur, BinaryMask, GrayImage, KernelSize};
use crate::{Error, Result};

/// Alpha above which a pixel belongs to the drop's ground-truth mask.
pub const MASK_ALPHA_THRESHOLD: f64 = 127.0;

/// Full parameterization of one synthetic drop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropSpec {
    pub shape: DropShape,
    pub radius: usize,
    /// Pixel coordinates `(x, y)` of the drop centre.
    pub center: (usize, usize),
    /// Peak alpha: 255 is fully opaque, 0 fully transparent.
    pub alpha_brightness: u8,
    pub alpha_blur: KernelSize,
    pub patch_blur: KernelSize,
    pub fisheye_strength: f64,
    /// Brightness factor of the darkened rim pass (1 keeps, 0 blackens).
    pub darken_factor: f64,
}

impl DropSpec {
    /// Opaque circle of radius `r` at `center` with mild blur and no distortion.
    pub fn circle(center: (usize, usize), r: usize) -> Self {
        Self {
            shape: DropShape::Circle,
            radius: r,
            center,
            alpha_brightness: 255,
            alpha_blur: KernelSize::ONE,
            patch_blur: KernelSize::ONE,
            fisheye_strength: 0.0,
            darken_factor: 0.3,
        }
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::Parameter("drop radius must be at least 1".into()));
        }
        let (x, y) = self.center;
        if x >= width || y >= height {
            return Err(Error::Parameter(format!(
                "drop centre ({x}, {y}) lies outside the {width}x{height} image"
            )));
        }
        if !(0.0..=1.0).contains(&self.darken_factor) {
            return Err(Error::Parameter(format!(
                "darken factor must lie in [0, 1], got {}",
                self.darken_factor
            )));
        }
        if !(self.fisheye_strength >= 0.0 && self.fisheye_strength.is_finite()) {
            return Err(Error::Parameter(format!(
                "fisheye strength must be non-negative, got {}",
                self.fisheye_strength
            )));
        }
        Ok(())
    }

    /// Top-left corner of the `5r x 4r` patch in image coordinates.
    pub fn patch_origin(&self) -> (isize, isize) {
        let r = self.radius as isize;
        (
            self.center.0 as isize - 5 * r / 2,
            self.center.1 as isize - 2 * r,
        )
    }

    /// Patch rectangle clipped to the image as `(x0, y0, x1, y1)`, exclusive
    /// upper bounds, or `None` when nothing is visible.
    pub fn clipped_rect(
        &self,
        width: usize,
        height: usize,
    ) -> Option<(usize, usize, usize, usize)> {
        let (ox, oy) = self.patch_origin();
        let r = self.radius as isize;
        let x0 = ox.max(0);
        let y0 = oy.max(0);
        let x1 = (ox + 5 * r).min(width as isize);
        let y1 = (oy + 4 * r).min(height as isize);
        (x0 < x1 && y0 < y1).then_some((x0 as usize, y0 as usize, x1 as usize, y1 as usize))
    }
}

#[inline]
fn blend(alpha: f64, fg: u8, bg: u8) -> u8 {
    let a = alpha / 255.0;
    (a * f64::from(fg) + (1.0 - a) * f64::from(bg))
        .round()
        .clamp(0.0, 255.0) as u8
}

/// Renders one drop into `img` and returns the new image with the drop's
/// ground-truth mask.
///
/// The patch under the drop is blurred and barrel-distorted, pasted darkened
/// through the alpha map, then pasted again undarkened on top. Only pixels in
/// the clipped patch rectangle change.
pub fn composite_drop(img: &GrayImage, spec: &DropSpec) -> Result<(GrayImage, BinaryMask)> {
    let (w, h) = img.dims();
    spec.validate(w, h)?;
    let Some((x0, y0, x1, y1)) = spec.clipped_rect(w, h) else {
        return Err(Error::Parameter(format!(
            "drop patch at {:?} is entirely outside the image",
            spec.center
        )));
    };

    let r = spec.radius;
    let alpha = make_alpha_map(spec.shape, r, spec.alpha_brightness, spec.alpha_blur)?;
    let (ox, oy) = spec.patch_origin();

    // Out-of-image parts of the patch replicate the border so the alpha map
    // and the patch stay aligned after clipping.
    let patch = GrayImage::from_fn(5 * r, 4 * r, |px, py| {
        img.get_clamped(ox + px as isize, oy + py as isize)
    })?;
    let patch = gaussian_blur(&patch.to_scalar_map(), spec.patch_blur)?.to_gray_rounded();
    let patch = fisheye(&patch, spec.fisheye_strength)?;
    let darkened = patch
        .to_scalar_map()
        .map(|v| v * spec.darken_factor)
        .to_gray_rounded();

    let mut out = img.clone();
    let mut mask = BinaryMask::empty(w, h)?;
    for y in y0..y1 {
        let py = (y as isize - oy) as usize;
        for x in x0..x1 {
            let px = (x as isize - ox) as usize;
            let a = alpha.get(px, py);
            if a <= 0.0 {
                continue;
            }
            let rim = blend(a, darkened.get(px, py), out.get(x, y));
            out.set(x, y, blend(a, patch.get(px, py), rim));
            if a > MASK_ALPHA_THRESHOLD {
                mask.set(x, y, true);
            }
        }
    }
    Ok((out, mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transparent_drop_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = GrayImage::from_fn(40, 30, |_, _| rng.gen()).unwrap();
        let mut spec = DropSpec::circle((20, 15), 6);
        spec.alpha_brightness = 0;
        let (out, mask) = composite_drop(&img, &spec).unwrap();
        assert_eq!(out, img);
        assert!(mask.is_empty());
    }

    #[test]
    fn two_pass_blend_on_flat_image() {
        let img = GrayImage::filled(100, 80, 128).unwrap();
        let mut spec = DropSpec::circle((50, 40), 10);
        spec.alpha_blur = KernelSize::new(7).unwrap();
        let (out, mask) = composite_drop(&img, &spec).unwrap();
        // Opaque core: rim pass writes round(0.3 * 128) = 38, the second
        // pass restores 128.
        assert_eq!(out.get(50, 40), 128);
        // Partially transparent rim lies between the darkened and plain patch.
        let mut saw_rim = false;
        for y in 0..80 {
            for x in 0..100 {
                let v = out.get(x, y);
                assert!((38..=128).contains(&v));
                saw_rim |= v < 128;
            }
        }
        assert!(saw_rim);
        assert!(mask.get(50, 40));
        assert!(!mask.get(0, 0));
    }

    #[test]
    fn pixels_outside_patch_untouched() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let img = GrayImage::from_fn(64, 64, |_, _| rng.gen()).unwrap();
        let mut spec = DropSpec::circle((30, 25), 8);
        spec.patch_blur = KernelSize::new(9).unwrap();
        spec.fisheye_strength = 0.4;
        let (out, mask) = composite_drop(&img, &spec).unwrap();
        let (x0, y0, x1, y1) = spec.clipped_rect(64, 64).unwrap();
        assert_eq!((x0, y0, x1, y1), (10, 9, 50, 41));
        for y in 0..64 {
            for x in 0..64 {
                if !(x0..x1).contains(&x) || !(y0..y1).contains(&y) {
                    assert_eq!(out.get(x, y), img.get(x, y));
                    assert!(!mask.get(x, y));
                }
            }
        }
    }

    #[test]
    fn border_drop_is_clipped() {
        let img = GrayImage::filled(32, 32, 200).unwrap();
        let spec = DropSpec::circle((1, 30), 6);
        let (_, mask) = composite_drop(&img, &spec).unwrap();
        assert!(mask.get(1, 30));
        let (bx0, by0, bx1, by1) = mask.bounding_box().unwrap();
        assert!(bx0 == 0 && by1 == 31 && bx1 <= 7 && by0 >= 24);
    }

    #[test]
    fn centre_outside_rejected() {
        let img = GrayImage::filled(10, 10, 0).unwrap();
        let spec = DropSpec::circle((10, 3), 2);
        assert!(matches!(
            composite_drop(&img, &spec),
            Err(Error::Parameter(_))
        ));
    }
}
