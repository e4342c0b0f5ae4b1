use super::PolygonAnnotation;
use crate::imgcore::BinaryMask;
use crate::{Error, Result};

/// Even-odd fill of polygons sampled at pixel centres, unioned.
///
/// A scanline at `y + 0.5` collects the crossing abscissas of every edge that
/// straddles it; a pixel is inside when an odd number of crossings lie
/// strictly to the right of its centre. Vertices outside the image are fine.
pub fn rasterize(
    polygons: &[PolygonAnnotation],
    width: usize,
    height: usize,
) -> Result<BinaryMask> {
    if width == 0 || height == 0 {
        return Err(Error::Parameter(format!(
            "mask dimensions must be positive, got {width}x{height}"
        )));
    }
    let mut mask = BinaryMask::empty(width, height)?;
    let mut crossings = Vec::new();
    for poly in polygons {
        let pts = &poly.points;
        for y in 0..height {
            let py = y as f64 + 0.5;
            crossings.clear();
            let mut j = pts.len() - 1;
            for i in 0..pts.len() {
                let (xi, yi) = pts[i];
                let (xj, yj) = pts[j];
                if (yi > py) != (yj > py) {
                    crossings.push((xj - xi) * (py - yi) / (yj - yi) + xi);
                }
                j = i;
            }
            if crossings.is_empty() {
                continue;
            }
            crossings.sort_by(f64::total_cmp);
            // `right` counts crossings strictly greater than the pixel centre.
            let mut right = crossings.len();
            let mut next = 0;
            for x in 0..width {
                let px = x as f64 + 0.5;
                while next < crossings.len() && crossings[next] <= px {
                    next += 1;
                    right -= 1;
                }
                if right == 0 {
                    break;
                }
                if right % 2 == 1 {
                    mask.set(x, y, true);
                }
            }
        }
    }
    Ok(mask)
}
