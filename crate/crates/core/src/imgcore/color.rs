use super::types::ensure_same_dims;
use super::GrayImage;
use crate::Result;

const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// BT.601 luma of a single RGB triple, rounded to the nearest integer.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let y = LUMA_R * f64::from(r) + LUMA_G * f64::from(g) + LUMA_B * f64::from(b);
    y.round().clamp(0.0, 255.0) as u8
}

/// Combines three equally sized channel planes into a luma image.
pub fn to_grayscale(red: &GrayImage, green: &GrayImage, blue: &GrayImage) -> Result<GrayImage> {
    ensure_same_dims("red vs green channel", red.dims(), green.dims())?;
    ensure_same_dims("red vs blue channel", red.dims(), blue.dims())?;
    let data = red
        .as_slice()
        .iter()
        .zip(green.as_slice())
        .zip(blue.as_slice())
        .map(|((&r, &g), &b)| luma(r, g, b))
        .collect();
    GrayImage::new(red.width(), red.height(), data)
}

/// Luma image from an interleaved `RGBRGB...` buffer.
pub fn rgb_interleaved_to_grayscale(width: usize, height: usize, rgb: &[u8]) -> Result<GrayImage> {
    if rgb.len() != width.saturating_mul(height).saturating_mul(3) {
        return Err(crate::Error::Dimension(format!(
            "interleaved RGB buffer of {} bytes does not match {width}x{height}x3",
            rgb.len()
        )));
    }
    let data = rgb
        .chunks_exact(3)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect();
    GrayImage::new(width, height, data)
}
