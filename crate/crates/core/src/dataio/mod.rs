//! Dataset ingestion: polygon annotations, mask rasterization, sequence
//! manifests and keyframe label propagation.
//!
//! A manifest is a JSON file
//! `{"sequence_id", "has_drops", "frames": [...], "keyframes": {"<index>": "<file>"}}`
//! whose paths are relative to the manifest. Each keyframe file holds the
//! polygons drawn on that frame; every later frame inherits the most recent
//! keyframe's mask.

mod annotation;
mod manifest;
mod raster;

pub use annotation::{
    parse_annotations, write_annotations, AnnotationDocument, AnnotationFormat, LabelMe,
    PolygonAnnotation, ShapeRecord,
};
pub use manifest::{
    load_manifest, load_manifest_with, load_sequence, propagate_labels, ManifestFile,
    SequenceManifest,
};
pub use raster::rasterize;
