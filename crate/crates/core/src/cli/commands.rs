use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{expand_inputs, Command, RunConfig};
use crate::dataio::{
    load_manifest, load_sequence, propagate_labels, ManifestFile, SequenceManifest,
};
use crate::detector::{detect, segment, FrameSequence};
use crate::evalkit::report::{json6, write_json, write_metrics_csv, write_roc_csv, write_seg_csv};
use crate::evalkit::{
    accumulated_dice, bench_pipeline, default_t_b_sweep, roc_sweep, seg_scores, DicePair,
    GradientSweep, LabeledSequence, NccSweep, SegScores,
};
use crate::imgcore::io::{load_gray, load_mask, save_gray_png, save_mask_png};
use crate::imgcore::resize_nearest;
use crate::rainsynth::scene::{
    clean_fixture, drop_fixture, translating_noise, SceneFixture, SceneParams,
};
use crate::rainsynth::{generate_drops, DropSpec, SynthConfig};
use crate::{Error, Result};

pub(super) fn dispatch(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    match cfg.command {
        Command::Detect => cmd_detect(cfg, stdout),
        Command::Segment => cmd_segment(cfg),
        Command::Synth => cmd_synth(cfg),
        Command::Ingest => cmd_ingest(cfg),
        Command::EvalRoc => cmd_eval_roc(cfg),
        Command::EvalSeg => cmd_eval_seg(cfg),
        Command::Bench => cmd_bench(cfg, stdout),
    }
}

fn print(stdout: &mut dyn Write, line: &str) -> Result<()> {
    writeln!(stdout, "{line}").map_err(|e| Error::io("<stdout>", e))
}

fn single_input<'a>(cfg: &'a RunConfig, what: &str) -> Result<&'a Path> {
    match cfg.inputs.as_slice() {
        [one] => Ok(one),
        other => Err(Error::Parameter(format!(
            "expected exactly one --input {what}, got {}",
            other.len()
        ))),
    }
}

fn has_ext(p: &Path, exts: &[&str]) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

fn is_image(p: &Path) -> bool {
    has_ext(p, &["png", "jpg", "jpeg"])
}

fn is_manifest(p: &Path) -> bool {
    p.file_name().is_some_and(|n| n == "manifest.json")
}

fn maybe_resize(seq: FrameSequence, resize: Option<(usize, usize)>) -> Result<FrameSequence> {
    match resize {
        Some((w, h)) => seq.resized(w, h),
        None => Ok(seq),
    }
}

fn load_input_sequence(cfg: &RunConfig) -> Result<FrameSequence> {
    let manifest = load_manifest(single_input(cfg, "manifest")?)?;
    maybe_resize(load_sequence(&manifest)?, cfg.resize)
}

fn cmd_detect(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let seq = load_input_sequence(cfg)?;
    let result = detect(&seq, &cfg.detector)?;
    let mask = cfg.output.join("mask.png");
    let gradient = cfg.output.join("gradient.png");
    save_mask_png(&result.mask, &mask)?;
    save_gray_png(&result.response.to_gray_normalized(), &gradient)?;
    print(
        stdout,
        &format!(
            "detected={} fraction={:.6}",
            result.detected, result.artifact_fraction
        ),
    )?;
    Ok(vec![mask, gradient])
}

fn cmd_segment(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let seq = load_input_sequence(cfg)?;
    let mask = segment(&seq, &cfg.detector)?;
    let path = cfg.output.join("mask.png");
    save_mask_png(&mask, &path)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct SynthRecord<'a> {
    source: &'a Path,
    seed: u64,
    drops: &'a [DropSpec],
}

fn cmd_synth(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if cfg.fixtures > 0 {
        return write_fixtures(cfg);
    }
    let images = expand_inputs(&cfg.inputs, &is_image)?;
    if images.is_empty() {
        return Err(Error::Parameter(
            "synth needs --input images or --fixtures N".into(),
        ));
    }
    let mut stems = BTreeSet::new();
    for p in &images {
        let stem = p
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        if !stems.insert(stem.clone()) {
            return Err(Error::Input(format!(
                "two inputs share the output name '{stem}' ({})",
                p.display()
            )));
        }
    }
    let rendered = images
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let img = load_gray(p)?;
            let config = SynthConfig {
                rng_seed: cfg.seed.wrapping_add(i as u64),
                ..cfg.synth.clone()
            };
            Ok((config.rng_seed, generate_drops(&img, &config)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut written = Vec::new();
    for (p, (seed, out)) in images.iter().zip(&rendered) {
        let stem = p.file_stem().unwrap_or_default().to_string_lossy();
        let image = cfg.output.join(format!("{stem}.png"));
        let mask = cfg.output.join(format!("{stem}_mask.png"));
        let spec = cfg.output.join(format!("{stem}.json"));
        save_gray_png(&out.image, &image)?;
        save_mask_png(&out.mask, &mask)?;
        let record = SynthRecord {
            source: p,
            seed: *seed,
            drops: &out.drops,
        };
        write_json(&spec, &record)?;
        written.extend([image, mask, spec]);
    }
    Ok(written)
}

fn write_fixture(dir: &Path, fixture: &SceneFixture, has_drops: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut frames = Vec::new();
    for (i, f) in fixture.sequence.frames().iter().enumerate() {
        let name = format!("frame_{i:03}.png");
        let p = dir.join(&name);
        save_gray_png(f, &p)?;
        frames.push(name);
        written.push(p);
    }
    let mask = dir.join("mask.png");
    save_mask_png(&fixture.mask, &mask)?;
    let spec = dir.join("drop.json");
    write_json(&spec, &fixture.drop)?;
    let manifest = ManifestFile {
        sequence_id: fixture.sequence.source_id().to_string(),
        has_drops,
        frames,
        keyframes: Default::default(),
    };
    let mpath = dir.join("manifest.json");
    write_json(&mpath, &manifest)?;
    written.extend([mask, spec, mpath]);
    Ok(written)
}

fn write_fixtures(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut params = SceneParams::default();
    if let Some((w, h)) = cfg.resize {
        params.width = w;
        params.height = h;
    }
    let n = cfg.fixtures as u64;
    let jobs: Vec<(u64, bool)> = (0..n)
        .map(|i| (cfg.seed.wrapping_add(i), true))
        .chain((0..n).map(|i| (cfg.seed.wrapping_add(n + i), false)))
        .collect();
    let fixtures = jobs
        .par_iter()
        .map(|&(seed, with_drop)| {
            if with_drop {
                drop_fixture(&params, seed)
            } else {
                clean_fixture(&params, seed)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut written = Vec::new();
    for (f, &(_, with_drop)) in fixtures.iter().zip(&jobs) {
        let dir = cfg.output.join(f.sequence.source_id());
        written.extend(write_fixture(&dir, f, with_drop)?);
    }
    Ok(written)
}

fn load_manifests(cfg: &RunConfig) -> Result<Vec<SequenceManifest>> {
    let paths = expand_inputs(&cfg.inputs, &is_manifest)?;
    if paths.is_empty() {
        return Err(Error::Parameter(
            "expected --input manifest files or directories containing manifest.json".into(),
        ));
    }
    let manifests = paths
        .iter()
        .map(load_manifest)
        .collect::<Result<Vec<_>>>()?;
    let mut seen = BTreeSet::new();
    for (m, p) in manifests.iter().zip(&paths) {
        if !seen.insert(m.sequence_id.as_str()) {
            return Err(Error::Validation(format!(
                "{}: sequence id '{}' appears more than once",
                p.display(),
                m.sequence_id
            )));
        }
    }
    Ok(manifests)
}

fn cmd_ingest(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let manifests = load_manifests(cfg)?;
    let mut written = Vec::new();
    let mut summary = Vec::new();
    for m in &manifests {
        let seq = load_sequence(m)?;
        let (w, h) = seq.dims();
        let masks = propagate_labels(m, w, h)?;
        let dir = cfg.output.join(&m.sequence_id);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (i, mask) in masks.iter().enumerate() {
            let p = dir.join(format!("mask_{i:04}.png"));
            save_mask_png(mask, &p)?;
            written.push(p);
        }
        summary.push(json!({
            "sequence_id": m.sequence_id,
            "has_drops": m.has_drops,
            "frames": m.len(),
            "width": w,
            "height": h,
            "keyframes": m.keyframe_annotations.keys().collect::<Vec<_>>(),
            "labeled_frames": masks.iter().filter(|k| !k.is_empty()).count(),
        }));
    }
    let p = cfg.output.join("ingest.json");
    write_json(&p, &json!({ "sequences": summary }))?;
    written.push(p);
    Ok(written)
}

fn cmd_eval_roc(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let manifests = load_manifests(cfg)?;
    let sequences = manifests
        .par_iter()
        .map(|m| {
            let s = LabeledSequence::load(m)?;
            Ok(LabeledSequence::new(
                maybe_resize(s.sequence, cfg.resize)?,
                s.has_drops,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let thresholds = default_t_b_sweep();
    let gradient = roc_sweep(
        &sequences,
        &GradientSweep { base: cfg.detector },
        &thresholds,
    )?;

    let mut written = Vec::new();
    let roc = cfg.output.join("roc_gradient.csv");
    let metrics = cfg.output.join("metrics_gradient.csv");
    write_roc_csv(&roc, "t_b", &gradient.curve)?;
    write_metrics_csv(&metrics, "t_b", &gradient.records)?;
    written.extend([roc, metrics]);

    let positives = sequences.iter().filter(|s| s.has_drops).count();
    let mut summary = json!({
        "auc": json6(gradient.auc()),
        "positives": positives,
        "negatives": sequences.len() - positives,
        "thresholds": thresholds.iter().map(|&t| json6(t)).collect::<Vec<_>>(),
    });
    if cfg.with_ncc {
        let ncc = roc_sweep(&sequences, &NccSweep { base: cfg.ncc }, &thresholds)?;
        let roc = cfg.output.join("roc_ncc.csv");
        let metrics = cfg.output.join("metrics_ncc.csv");
        write_roc_csv(&roc, "t_c", &ncc.curve)?;
        write_metrics_csv(&metrics, "t_c", &ncc.records)?;
        written.extend([roc, metrics]);
        summary["auc_ncc"] = json6(ncc.auc());
    }
    let p = cfg.output.join("summary.json");
    write_json(&p, &summary)?;
    written.push(p);
    Ok(written)
}

fn load_mask_sized(p: &Path, resize: Option<(usize, usize)>) -> Result<crate::imgcore::BinaryMask> {
    let m = load_mask(p)?;
    Ok(match resize {
        Some((w, h)) => crate::imgcore::BinaryMask::from_gray(&resize_nearest(&m.to_gray(), w, h)?),
        None => m,
    })
}

fn cmd_eval_seg(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let [pred_dir, gt_dir] = cfg.inputs.as_slice() else {
        return Err(Error::Parameter(format!(
            "eval-seg expects --input PRED_DIR --input GT_DIR, got {} inputs",
            cfg.inputs.len()
        )));
    };
    let preds = expand_inputs(std::slice::from_ref(pred_dir), &is_image)?;
    if preds.is_empty() {
        return Err(Error::Input(format!(
            "{}: no prediction masks found",
            pred_dir.display()
        )));
    }
    let scored = preds
        .par_iter()
        .map(|p| {
            let name = p.file_name().expect("listed files have names");
            let gt_path = gt_dir.join(name);
            if !gt_path.is_file() {
                return Err(Error::Input(format!(
                    "{}: no ground truth for prediction {}",
                    gt_path.display(),
                    p.display()
                )));
            }
            let pred = load_mask_sized(p, cfg.resize)?;
            let gt = load_mask_sized(&gt_path, cfg.resize)?;
            let pair = DicePair::from_masks(&pred, &gt)?;
            Ok((
                name.to_string_lossy().into_owned(),
                seg_scores(&pred, &gt)?,
                pair,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<(String, SegScores)> = scored.iter().map(|(n, s, _)| (n.clone(), *s)).collect();
    let pairs: Vec<DicePair> = scored.iter().map(|(_, _, p)| *p).collect();
    let mean =
        SegScores::mean(&rows.iter().map(|r| r.1).collect::<Vec<_>>()).expect("at least one pair");
    let csv = cfg.output.join("seg.csv");
    write_seg_csv(&csv, &rows)?;
    let summary = json!({
        "count": rows.len(),
        "mean_iou": json6(mean.iou),
        "mean_dice": json6(mean.dice),
        "mean_accuracy": json6(mean.accuracy),
        "accumulated_dice": json6(accumulated_dice(&pairs, cfg.dice_style)?),
        "dice_style": cfg.dice_style,
    });
    let p = cfg.output.join("summary.json");
    write_json(&p, &summary)?;
    Ok(vec![csv, p])
}

fn cmd_bench(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let seq = if cfg.inputs.is_empty() {
        let (w, h) = cfg.resize.unwrap_or((640, 480));
        FrameSequence::new(translating_noise(w, h, 10, 4, cfg.seed)?, "generated")?
    } else {
        load_input_sequence(cfg)?
    };
    let report = bench_pipeline(&seq, &cfg.detector, &cfg.ncc, cfg.repeats)?;
    print(
        stdout,
        &format!(
            "gradient_ms={:.6} ncc_ms={:.6} ratio={:.6} threads={}",
            report.gradient_ms, report.ncc_ms, report.ncc_over_gradient, report.threads
        ),
    )?;
    let p = cfg.output.join("bench.json");
    write_json(&p, &report)?;
    Ok(vec![p])
}
