//! Pixel kernels on a synthetic image: Sobel magnitude, Gaussian blur,
//! inverse threshold and dilation, written out as PNGs.
//!
//! cargo run --example kernels -- [output-dir]

use std::path::PathBuf;

use raindrop::imgcore::io::{save_gray_png, save_mask_png};
use raindrop::imgcore::{
    dilate, gaussian_blur, sobel_magnitude, threshold_inverse, GrayImage, KernelSize,
};

fn main() -> raindrop::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("raindrop-kernels"));
    std::fs::create_dir_all(&out).expect("create output directory");

    // Stripes on the left half, flat on the right.
    let img = GrayImage::from_fn(160, 120, |x, y| {
        if x < 80 {
            if (x / 6 + y / 6) % 2 == 0 {
                40
            } else {
                210
            }
        } else {
            128
        }
    })?;
    let gradient = sobel_magnitude(&img, KernelSize::new(5)?)?;
    let blurred = gaussian_blur(&gradient, KernelSize::new(21)?)?;
    let low = threshold_inverse(&blurred, 0.18)?;
    let grown = dilate(&low, KernelSize::new(9)?)?;

    println!(
        "gradient range  {:.1} .. {:.1}",
        gradient.min(),
        gradient.max()
    );
    println!(
        "blurred range   {:.1} .. {:.1}",
        blurred.min(),
        blurred.max()
    );
    println!("low-gradient    {:.3} of pixels", low.fraction());
    println!("after dilation  {:.3} of pixels", grown.fraction());

    save_gray_png(&img, out.join("input.png"))?;
    save_gray_png(&gradient.to_gray_normalized(), out.join("gradient.png"))?;
    save_gray_png(&blurred.to_gray_normalized(), out.join("blurred.png"))?;
    save_mask_png(&grown, out.join("mask.png"))?;
    println!("wrote {}", out.display());
    Ok(())
}
