use crate::imgcore::GrayImage;
use crate::{Error, Result};

/// Barrel distortion about the patch centre.
///
/// Each destination pixel at radius `r` samples the source at radius
/// `r * (1 + strength * (r / r_max)^2)`, where `r_max` is the centre-to-corner
/// distance. Sampling is bilinear with coordinates clamped to the patch.
pub fn fisheye(patch: &GrayImage, strength: f64) -> Result<GrayImage> {
    if !(strength >= 0.0 && strength.is_finite()) {
        return Err(Error::Parameter(format!(
            "fisheye strength must be non-negative, got {strength}"
        )));
    }
    if strength == 0.0 {
        return Ok(patch.clone());
    }
    let (w, h) = patch.dims();
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let r_max = (cx * cx + cy * cy).sqrt();
    if r_max == 0.0 {
        return Ok(patch.clone());
    }
    GrayImage::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let r2 = (dx * dx + dy * dy) / (r_max * r_max);
        let scale = 1.0 + strength * r2;
        bilinear(patch, cx + dx * scale, cy + dy * scale)
    })
}

fn bilinear(img: &GrayImage, x: f64, y: f64) -> u8 {
    let x = x.clamp(0.0, img.width() as f64 - 1.0);
    let y = y.clamp(0.0, img.height() as f64 - 1.0);
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let (x0, y0) = (x0 as isize, y0 as isize);
    let p = |dx: isize, dy: isize| f64::from(img.get_clamped(x0 + dx, y0 + dy));
    let top = p(0, 0) * (1.0 - fx) + p(1, 0) * fx;
    let bottom = p(0, 1) * (1.0 - fx) + p(1, 1) * fx;
    (top * (1.0 - fy) + bottom * fy).round().clamp(0.0, 255.0) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_strength_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = GrayImage::from_fn(15, 11, |_, _| rng.gen()).unwrap();
        let out = fisheye(&img, 0.0).unwrap();
        for (a, b) in out.as_slice().iter().zip(img.as_slice()) {
            assert!((i16::from(*a) - i16::from(*b)).abs() <= 1);
        }
    }

    #[test]
    fn constant_patch_stays_constant() {
        let img = GrayImage::filled(20, 16, 93).unwrap();
        for s in [0.3, 1.0, 4.0] {
            assert!(fisheye(&img, s)
                .unwrap()
                .as_slice()
                .iter()
                .all(|&v| v == 93));
        }
    }

    #[test]
    fn bright_pixel_moves_towards_centre() {
        let mut img = GrayImage::filled(21, 21, 0).unwrap();
        img.set(18, 10, 255);
        let out = fisheye(&img, 0.5).unwrap();
        // Centre (10, 10), r_max^2 = 200. Destination x = 17 (r = 7) samples
        // x = 10 + 7 * (1 + 0.5 * 49 / 200) = 17.8575, i.e. 0.8575 of the
        // bright pixel. Destination x = 18 (r = 8) samples 19.28: dark.
        assert_eq!(out.get(17, 10), (0.8575f64 * 255.0).round() as u8);
        assert_eq!(out.get(18, 10), 0);
        let (bx, _) = (0..21)
            .map(|x| (x, out.get(x, 10)))
            .max_by_key(|&(_, v)| v)
            .unwrap();
        assert_eq!(bx, 17);
    }

    #[test]
    fn negative_strength_rejected() {
        let img = GrayImage::filled(3, 3, 0).unwrap();
        assert!(matches!(fisheye(&img, -0.1), Err(Error::Parameter(_))));
    }
}
