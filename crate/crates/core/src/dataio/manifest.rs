use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{rasterize, AnnotationFormat, LabelMe, PolygonAnnotation};
use crate::detector::FrameSequence;
use crate::imgcore::io::load_gray;
use crate::imgcore::{BinaryMask, GrayImage};
use crate::{Error, Result};

/// On-disk manifest: frame paths and keyframe annotation files, both
/// relative to the manifest's directory unless absolute.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFile {
    pub sequence_id: String,
    pub has_drops: bool,
    pub frames: Vec<String>,
    #[serde(default)]
    pub keyframes: BTreeMap<String, String>,
}

/// A sequence with resolved frame paths and parsed keyframe polygons.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceManifest {
    pub sequence_id: String,
    pub frame_paths: Vec<PathBuf>,
    pub has_drops: bool,
    pub keyframe_annotations: BTreeMap<usize, Vec<PolygonAnnotation>>,
}

impl SequenceManifest {
    pub fn new(
        sequence_id: impl Into<String>,
        frame_paths: Vec<PathBuf>,
        has_drops: bool,
        keyframe_annotations: BTreeMap<usize, Vec<PolygonAnnotation>>,
    ) -> Result<Self> {
        let m = Self {
            sequence_id: sequence_id.into(),
            frame_paths,
            has_drops,
            keyframe_annotations,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_paths.is_empty() {
            return Err(Error::Validation(format!(
                "sequence '{}' lists no frames",
                self.sequence_id
            )));
        }
        if let Some(&k) = self
            .keyframe_annotations
            .keys()
            .find(|&&k| k >= self.frame_paths.len())
        {
            return Err(Error::Validation(format!(
                "sequence '{}': keyframe index {k} is out of range for {} frames",
                self.sequence_id,
                self.frame_paths.len()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frame_paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame_paths.is_empty()
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Reads a manifest and its LabelMe-style keyframe files.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<SequenceManifest> {
    load_manifest_with(path, &LabelMe)
}

/// Reads a manifest, parsing keyframe files with `format`.
pub fn load_manifest_with(
    path: impl AsRef<Path>,
    format: &dyn AnnotationFormat,
) -> Result<SequenceManifest> {
    let path = path.as_ref();
    let context = path.display().to_string();
    let file: ManifestFile = serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse {
        context: context.clone(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut keyframes = BTreeMap::new();
    for (key, ann) in &file.keyframes {
        let index: usize = key.parse().map_err(|_| {
            Error::Validation(format!(
                "{context}: keyframe key '{key}' is not a frame index"
            ))
        })?;
        let ann_path = resolve(base, ann);
        let polys = format
            .parse(&read_text(&ann_path)?, &ann_path.display().to_string())
            .map_err(|e| match e {
                Error::Validation(m) => Error::Validation(format!("{}: {m}", ann_path.display())),
                other => other,
            })?;
        keyframes.insert(index, polys);
    }
    SequenceManifest::new(
        file.sequence_id,
        file.frames.iter().map(|f| resolve(base, f)).collect(),
        file.has_drops,
        keyframes,
    )
}

/// One mask per frame, copied from the nearest keyframe at or before it.
pub fn propagate_labels(
    manifest: &SequenceManifest,
    width: usize,
    height: usize,
) -> Result<Vec<BinaryMask>> {
    manifest.validate()?;
    let empty = BinaryMask::empty(width, height)?;
    let mut current = empty;
    let mut out = Vec::with_capacity(manifest.len());
    for i in 0..manifest.len() {
        if let Some(polys) = manifest.keyframe_annotations.get(&i) {
            current = rasterize(polys, width, height)?;
        }
        out.push(current.clone());
    }
    Ok(out)
}

/// Decodes every frame to grayscale, in manifest order.
pub fn load_sequence(manifest: &SequenceManifest) -> Result<FrameSequence> {
    manifest.validate()?;
    let mut frames = Vec::with_capacity(manifest.len());
    for p in &manifest.frame_paths {
        let f = load_gray(p)?;
        if let Some(first) = frames.first().map(GrayImage::dims) {
            if first != f.dims() {
                return Err(Error::Dimension(format!(
                    "sequence '{}': {} is {}x{} but {} is {}x{}",
                    manifest.sequence_id,
                    manifest.frame_paths[0].display(),
                    first.0,
                    first.1,
                    p.display(),
                    f.width(),
                    f.height()
                )));
            }
        }
        frames.push(f);
    }
    FrameSequence::new(frames, manifest.sequence_id.clone())
}
