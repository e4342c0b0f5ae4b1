//! Single-threaded timing of the gradient detector (per stage) against the
//! NCC baseline on ten 640x480 frames at default parameters.
//!
//! cargo run --release --example benchmark

use raindrop::detector::{DetectorParams, FrameSequence};
use raindrop::evalkit::bench_pipeline;
use raindrop::ncc::NccParams;
use raindrop::rainsynth::scene::translating_noise;

fn main() -> raindrop::Result<()> {
    let seq = FrameSequence::new(translating_noise(640, 480, 10, 4, 1)?, "bench")?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("one-thread pool");
    let r = pool
        .install(|| bench_pipeline(&seq, &DetectorParams::default(), &NccParams::default(), 5))?;
    let s = r.gradient_stages;
    println!(
        "threads {}  repeats {}  {}x{}x{}",
        r.threads, r.repeats, r.width, r.height, r.frames
    );
    println!("gradient  {:>8.1} ms", r.gradient_ms);
    println!("  sobel+mean {:>6.1} ms", s.averaged_gradient_ms);
    println!("  gaussian   {:>6.1} ms", s.blur_ms);
    println!("  threshold  {:>6.1} ms", s.threshold_ms);
    println!("  dilate     {:>6.1} ms", s.dilate_ms);
    println!("ncc       {:>8.1} ms", r.ncc_ms);
    println!("ncc / gradient = {:.2}", r.ncc_over_gradient);
    Ok(())
}
