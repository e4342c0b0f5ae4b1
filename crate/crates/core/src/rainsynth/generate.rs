use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::composite::{composite_drop, DropSpec};
use super::shape::DropShape;
use crate::imgcore::{BinaryMask, GrayImage, KernelSize};
use crate::{Error, Result};

/// Rejected samples tolerated per drop before giving up.
const MAX_ATTEMPTS: usize = 64;

/// Sampling envelope for batches of synthetic drops.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Inclusive range of drops per image.
    pub drops_per_image: (usize, usize),
    pub r_min: usize,
    pub r_max: usize,
    /// Inclusive range of peak alpha.
    pub brightness: (u8, u8),
    /// Range of barrel distortion strengths.
    pub fisheye_strength: (f64, f64),
    /// Alpha-map blur kernel as a fraction of the radius.
    pub alpha_blur_ratio: f64,
    /// Patch blur kernel as a fraction of the radius.
    pub patch_blur_ratio: f64,
    pub darken_factor: f64,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            drops_per_image: (1, 5),
            r_min: 8,
            r_max: 32,
            brightness: (192, 255),
            fisheye_strength: (0.2, 0.6),
            alpha_blur_ratio: 0.3,
            patch_blur_ratio: 0.5,
            darken_factor: 0.3,
            rng_seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.drops_per_image;
        if lo < 1 || lo > hi {
            return Err(Error::Parameter(format!(
                "drops_per_image must satisfy 1 <= min <= max, got ({lo}, {hi})"
            )));
        }
        if self.r_min < 1 || self.r_min > self.r_max {
            return Err(Error::Parameter(format!(
                "radius range must satisfy 1 <= r_min <= r_max, got ({}, {})",
                self.r_min, self.r_max
            )));
        }
        if self.brightness.0 > self.brightness.1 {
            return Err(Error::Parameter("brightness range is inverted".into()));
        }
        let (f0, f1) = self.fisheye_strength;
        if !(f0 >= 0.0 && f0 <= f1 && f1.is_finite()) {
            return Err(Error::Parameter(format!(
                "fisheye range must satisfy 0 <= min <= max, got ({f0}, {f1})"
            )));
        }
        for (name, v) in [
            ("alpha_blur_ratio", self.alpha_blur_ratio),
            ("patch_blur_ratio", self.patch_blur_ratio),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.darken_factor) {
            return Err(Error::Parameter(format!(
                "darken factor must lie in [0, 1], got {}",
                self.darken_factor
            )));
        }
        Ok(())
    }

    /// Draws one drop specification for an image of the given size.
    pub fn sample_spec(&self, rng: &mut impl Rng, width: usize, height: usize) -> DropSpec {
        let shape = DropShape::ALL[rng.gen_range(0..DropShape::ALL.len())];
        let radius = rng.gen_range(self.r_min..=self.r_max);
        let center = (rng.gen_range(0..width), rng.gen_range(0..height));
        let alpha_brightness = rng.gen_range(self.brightness.0..=self.brightness.1);
        let (f0, f1) = self.fisheye_strength;
        let fisheye_strength = if f1 > f0 { rng.gen_range(f0..f1) } else { f0 };
        DropSpec {
            shape,
            radius,
            center,
            alpha_brightness,
            alpha_blur: KernelSize::nearest_odd(radius as f64 * self.alpha_blur_ratio),
            patch_blur: KernelSize::nearest_odd(radius as f64 * self.patch_blur_ratio),
            fisheye_strength,
            darken_factor: self.darken_factor,
        }
    }
}

/// Result of rendering a batch of drops into one image.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthOutput {
    pub image: GrayImage,
    /// Union of the per-drop ground-truth masks.
    pub mask: BinaryMask,
    /// Drops in the order they were composited.
    pub drops: Vec<DropSpec>,
}

/// Samples and composites drops into `img`. Identical inputs and seed give
/// bit-identical outputs.
pub fn generate_drops(img: &GrayImage, config: &SynthConfig) -> Result<SynthOutput> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let (w, h) = img.dims();
    let count = rng.gen_range(config.drops_per_image.0..=config.drops_per_image.1);

    let mut image = img.clone();
    let mut mask = BinaryMask::empty(w, h)?;
    let mut drops = Vec::with_capacity(count);
    for i in 0..count {
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS {
            let spec = config.sample_spec(&mut rng, w, h);
            let (next, drop_mask) = composite_drop(&image, &spec)?;
            if drop_mask.is_empty() {
                continue;
            }
            image = next;
            mask.union_with(&drop_mask)?;
            drops.push(spec);
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::Input(format!(
                "could not place drop {i} with a visible mask after {MAX_ATTEMPTS} attempts"
            )));
        }
    }
    Ok(SynthOutput { image, mask, drops })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GrayImage::from_fn(w, h, |_, _| rng.gen()).unwrap()
    }

    #[test]
    fn same_seed_same_output() {
        let img = noise(96, 72, 1);
        let cfg = SynthConfig {
            rng_seed: 42,
            ..SynthConfig::default()
        };
        let a = generate_drops(&img, &cfg).unwrap();
        let b = generate_drops(&img, &cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_drops(
            &img,
            &SynthConfig {
                rng_seed: 43,
                ..cfg
            },
        )
        .unwrap();
        assert_ne!(a.drops, c.drops);
    }

    #[test]
    fn single_interior_drop_is_one_component() {
        let img = noise(200, 200, 2);
        for seed in 0..8 {
            let cfg = SynthConfig {
                drops_per_image: (1, 1),
                r_min: 12,
                r_max: 12,
                rng_seed: seed,
                ..SynthConfig::default()
            };
            let out = generate_drops(&img, &cfg).unwrap();
            assert_eq!(out.drops.len(), 1);
            assert_eq!(out.mask.count_components(), 1, "seed {seed}");
        }
    }

    #[test]
    fn union_covers_every_drop() {
        let img = noise(128, 96, 3);
        let cfg = SynthConfig {
            drops_per_image: (3, 4),
            rng_seed: 9,
            ..SynthConfig::default()
        };
        let out = generate_drops(&img, &cfg).unwrap();
        let largest = out
            .drops
            .iter()
            .map(|d| composite_drop(&img, d).unwrap().1.count())
            .max()
            .unwrap();
        assert!(out.mask.count() >= largest);
    }

    #[test]
    fn invalid_config_rejected() {
        let img = noise(8, 8, 0);
        let bad = SynthConfig {
            r_min: 10,
            r_max: 5,
            ..SynthConfig::default()
        };
        assert!(generate_drops(&img, &bad).is_err());
        let bad = SynthConfig {
            drops_per_image: (0, 2),
            ..SynthConfig::default()
        };
        assert!(generate_drops(&img, &bad).is_err());
    }

    #[test]
    fn config_json_uses_defaults_for_missing_fields() {
        let cfg: SynthConfig = serde_json::from_str(r#"{"r_min": 4, "r_max": 6}"#).unwrap();
        assert_eq!((cfg.r_min, cfg.r_max), (4, 6));
        assert_eq!(cfg.darken_factor, 0.3);
    }
}
