//! Builds a small on-disk dataset (frames, keyframe polygons, manifest),
//! then loads it back and propagates the keyframe labels to every frame.
//!
//! cargo run --example ingest_dataset -- [output-dir]

use std::fs;
use std::path::PathBuf;

use raindrop::dataio::{
    load_manifest, load_sequence, propagate_labels, write_annotations, ManifestFile,
    PolygonAnnotation,
};
use raindrop::imgcore::io::save_gray_png;
use raindrop::rainsynth::scene::translating_noise;

fn main() -> raindrop::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("raindrop-dataset"));
    fs::create_dir_all(&dir).expect("create dataset directory");

    let frames = translating_noise(64, 48, 12, 2, 1)?;
    let mut names = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        let name = format!("frame_{i:03}.png");
        save_gray_png(f, dir.join(&name))?;
        names.push(name);
    }

    // The drop appears at frame 4 and is redrawn larger at frame 9.
    let small = PolygonAnnotation::new("raindrop", vec![(20.0, 10.0), (30.0, 12.0), (26.0, 22.0)])?;
    let large = PolygonAnnotation::new(
        "raindrop",
        vec![(16.0, 8.0), (34.0, 8.0), (36.0, 26.0), (18.0, 28.0)],
    )?;
    fs::write(
        dir.join("kf4.json"),
        write_annotations("frame_004.png", &[small]),
    )
    .expect("write");
    fs::write(
        dir.join("kf9.json"),
        write_annotations("frame_009.png", &[large]),
    )
    .expect("write");

    let manifest = ManifestFile {
        sequence_id: "demo".into(),
        has_drops: true,
        frames: names,
        keyframes: [("4", "kf4.json"), ("9", "kf9.json")]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    };
    let path = dir.join("manifest.json");
    fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("serialize"),
    )
    .expect("write");

    let loaded = load_manifest(&path)?;
    let seq = load_sequence(&loaded)?;
    let (w, h) = seq.dims();
    let masks = propagate_labels(&loaded, w, h)?;
    println!(
        "sequence '{}': {} frames of {w}x{h}",
        loaded.sequence_id,
        seq.len()
    );
    for (i, m) in masks.iter().enumerate() {
        println!("frame {i:>2}: {:>3} labeled pixels", m.count());
    }
    Ok(())
}
