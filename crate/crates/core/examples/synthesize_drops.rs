//! Renders random synthetic drops into an image and saves the image, its
//! ground-truth mask and the drop parameters.
//!
//! cargo run --example synthesize_drops -- [input.png] [output-dir]

use std::path::PathBuf;

use raindrop::imgcore::io::{load_gray, save_gray_png, save_mask_png};
use raindrop::imgcore::GrayImage;
use raindrop::rainsynth::{generate_drops, SynthConfig};

fn main() -> raindrop::Result<()> {
    let mut args = std::env::args().skip(1);
    let img = match args.next() {
        Some(p) => load_gray(p)?,
        // Diagonal ramp with a grid, so refraction is visible.
        None => GrayImage::from_fn(320, 240, |x, y| {
            if x % 20 == 0 || y % 20 == 0 {
                30
            } else {
                ((x + y) / 3) as u8
            }
        })?,
    };
    let out: PathBuf = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("raindrop-synth"));
    std::fs::create_dir_all(&out).expect("create output directory");

    let config = SynthConfig {
        drops_per_image: (3, 6),
        rng_seed: 7,
        ..SynthConfig::default()
    };
    let result = generate_drops(&img, &config)?;
    for d in &result.drops {
        println!(
            "{:?} R={} at {:?} alpha={} fisheye={:.2}",
            d.shape, d.radius, d.center, d.alpha_brightness, d.fisheye_strength
        );
    }
    println!("mask covers {:.3} of the image", result.mask.fraction());

    save_gray_png(&result.image, out.join("image.png"))?;
    save_mask_png(&result.mask, out.join("mask.png"))?;
    let spec = serde_json::to_string_pretty(&result.drops).expect("drop specs serialize");
    std::fs::write(out.join("drops.json"), spec).expect("write drops.json");
    println!("wrote {}", out.display());
    Ok(())
}
