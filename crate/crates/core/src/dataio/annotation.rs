use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One outlined artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonAnnotation {
    pub label: String,
    /// Vertices `(x, y)` in pixel coordinates, in drawing order.
    pub points: Vec<(f64, f64)>,
}

impl PolygonAnnotation {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        let a = Self {
            label: label.into(),
            points,
        };
        a.validate(0)?;
        Ok(a)
    }

    fn validate(&self, index: usize) -> Result<()> {
        if self.points.len() < 3 {
            return Err(Error::Validation(format!(
                "shape #{index} ('{}') has {} points, a polygon needs at least 3",
                self.label,
                self.points.len()
            )));
        }
        if let Some(p) = self
            .points
            .iter()
            .find(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::Validation(format!(
                "shape #{index} ('{}') has a non-finite vertex {p:?}",
                self.label
            )));
        }
        Ok(())
    }
}

/// On-disk form of one keyframe's labels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotationDocument {
    #[serde(default)]
    pub image: String,
    #[serde(default)]
    pub shapes: Vec<ShapeRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub label: String,
    pub points: Vec<[f64; 2]>,
}

/// Converts an annotation file's text into polygons. Implement this to read
/// a labeling tool's native layout.
pub trait AnnotationFormat {
    fn parse(&self, text: &str, context: &str) -> Result<Vec<PolygonAnnotation>>;
}

/// `{"image": ..., "shapes": [{"label": ..., "points": [[x, y], ...]}]}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LabelMe;

impl AnnotationFormat for LabelMe {
    fn parse(&self, text: &str, context: &str) -> Result<Vec<PolygonAnnotation>> {
        let doc: AnnotationDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            context: context.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.shapes
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let a = PolygonAnnotation {
                    label: s.label,
                    points: s.points.into_iter().map(|[x, y]| (x, y)).collect(),
                };
                a.validate(i)?;
                Ok(a)
            })
            .collect()
    }
}

/// Parses a LabelMe-style annotation document.
pub fn parse_annotations(document: &str) -> Result<Vec<PolygonAnnotation>> {
    LabelMe.parse(document, "annotation document")
}

/// Serializes polygons into a LabelMe-style document.
pub fn write_annotations(image: &str, polygons: &[PolygonAnnotation]) -> String {
    let doc = AnnotationDocument {
        image: image.to_string(),
        shapes: polygons
            .iter()
            .map(|p| ShapeRecord {
                label: p.label.clone(),
                points: p.points.iter().map(|&(x, y)| [x, y]).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("annotation documents always serialize")
}
