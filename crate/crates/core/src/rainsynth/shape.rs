use serde::{Deserialize, Serialize};

use crate::imgcore::{gaussian_blur, KernelSize, ScalarMap};
use crate::{Error, Result};

/// Vertical semi-axis of the egg's upper half, in units of the radius.
pub const EGG_TOP_RATIO: f64 = 1.4;
/// Vertical pull of the Bezier control points, in units of the radius.
pub const BEZIER_PULL: f64 = 1.2;

/// Outline of a synthetic drop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DropShape {
    Circle = 0,
    /// Lower half disc joined to an upper half ellipse.
    Egg = 1,
    /// Lens bounded by two cubic Bezier arcs.
    Bezier = 2,
}

impl DropShape {
    pub const ALL: [DropShape; 3] = [DropShape::Circle, DropShape::Egg, DropShape::Bezier];

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .get(code as usize)
            .copied()
            .ok_or_else(|| Error::Parameter(format!("unknown drop shape code {code}")))
    }

    /// Area of the unblurred outline for radius `r`.
    pub fn area(self, r: f64) -> f64 {
        match self {
            DropShape::Circle => std::f64::consts::PI * r * r,
            DropShape::Egg => std::f64::consts::PI * r * r * (1.0 + EGG_TOP_RATIO) / 2.0,
            // Each arc encloses 3 * pull * 12 / 30 * r^2 with the chord.
            DropShape::Bezier => 2.0 * BEZIER_PULL * 1.2 * r * r,
        }
    }

    /// Whether the offset `(dx, dy)` from the drop centre (y pointing down)
    /// falls inside the outline of radius `r`.
    pub fn contains(self, dx: f64, dy: f64, r: f64) -> bool {
        match self {
            DropShape::Circle => dx * dx + dy * dy <= r * r,
            DropShape::Egg => {
                if dy >= 0.0 {
                    dx * dx + dy * dy <= r * r
                } else {
                    let (u, v) = (dx / r, dy / (EGG_TOP_RATIO * r));
                    u * u + v * v <= 1.0
                }
            }
            DropShape::Bezier => {
                // Arcs run from (-r, 0) to (r, 0) with controls at (-r, +-pull r)
                // and (r, +-pull r); x(t) is r (2 smoothstep(t) - 1), so the arc
                // parameter of a column follows from the inverse smoothstep.
                let s = (dx / r + 1.0) / 2.0;
                if !(0.0..=1.0).contains(&s) {
                    return false;
                }
                let t = 0.5 - ((1.0 - 2.0 * s).asin() / 3.0).sin();
                let half_height = 3.0 * BEZIER_PULL * r * t * (1.0 - t);
                dy.abs() <= half_height
            }
        }
    }
}

/// Transparency map of a drop: `5r` wide, `4r` tall, zero except the outline
/// filled with `brightness`, then Gaussian blurred with kernel `blur`.
pub fn make_alpha_map(
    shape: DropShape,
    r: usize,
    brightness: u8,
    blur: KernelSize,
) -> Result<ScalarMap> {
    if r < 1 {
        return Err(Error::Parameter("drop radius must be at least 1".into()));
    }
    let (w, h) = (5 * r, 4 * r);
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    let rf = r as f64;
    let value = f64::from(brightness);
    let map = ScalarMap::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
        if shape.contains(dx, dy, rf) {
            value
        } else {
            0.0
        }
    })?;
    gaussian_blur(&map, blur)
}
