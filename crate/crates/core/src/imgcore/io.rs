use std::path::Path;

use image::{DynamicImage, ImageFormat};

use super::color::rgb_interleaved_to_grayscale;
use super::{BinaryMask, GrayImage};
use crate::{Error, Result};

fn image_err(path: &Path, e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(source) => Error::io(path, source),
        other => Error::Image {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    }
}

/// Converts a decoded image to luma; single-channel inputs pass through.
pub fn dynamic_to_gray(img: &DynamicImage) -> Result<GrayImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(g) => GrayImage::new(w, h, g.as_raw().clone()),
        other => rgb_interleaved_to_grayscale(w, h, other.to_rgb8().as_raw()),
    }
}

/// Decodes a PNG or JPEG file into a luma image.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| image_err(path, e))?;
    dynamic_to_gray(&img)
}

/// Writes a single-channel 8-bit PNG.
pub fn save_gray_png(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let buf = image::GrayImage::from_raw(
        img.width() as u32,
        img.height() as u32,
        img.as_slice().to_vec(),
    )
    .expect("buffer length matches dimensions");
    buf.save_with_format(path, ImageFormat::Png)
        .map_err(|e| image_err(path, e))
}

/// Writes a mask as a single-channel PNG, 0 = background, 255 = artifact.
pub fn save_mask_png(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    save_gray_png(&mask.to_gray(), path)
}

/// Reads a mask PNG; any nonzero pixel counts as artifact.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    Ok(BinaryMask::from_gray(&load_gray(path)?))
}
