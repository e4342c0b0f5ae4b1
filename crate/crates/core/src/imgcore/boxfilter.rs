use rayon::prelude::*;

use super::{KernelSize, ScalarMap};
use crate::Result;

/// Windowed mean over a `w x w` replicate-padded neighbourhood.
///
/// Uses a summed-area table over the padded map, so each output pixel costs
/// four lookups regardless of the window size.
pub fn box_filter(map: &ScalarMap, window: KernelSize) -> Result<ScalarMap> {
    let r = window.radius();
    if r == 0 {
        return Ok(map.clone());
    }
    let (w, h) = map.dims();
    let (pw, ph) = (w + 2 * r, h + 2 * r);
    let stride = pw + 1;

    // sat[(y + 1) * stride + (x + 1)] = sum of padded[0..=y][0..=x]
    let mut sat = vec![0.0f64; stride * (ph + 1)];
    for py in 0..ph {
        let sy = (py as isize - r as isize).clamp(0, h as isize - 1) as usize;
        let row = &map.as_slice()[sy * w..(sy + 1) * w];
        let (prev, cur) = sat.split_at_mut((py + 1) * stride);
        let prev = &prev[py * stride..];
        let cur = &mut cur[..stride];
        let mut run = 0.0;
        for px in 0..pw {
            let sx = (px as isize - r as isize).clamp(0, w as isize - 1) as usize;
            run += row[sx];
            cur[px + 1] = prev[px + 1] + run;
        }
    }

    let n = window.get();
    let area = (n * n) as f64;
    let mut out = vec![0.0f64; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, dst)| {
        let top = &sat[y * stride..];
        let bottom = &sat[(y + n) * stride..];
        for (x, o) in dst.iter_mut().enumerate() {
            let s = bottom[x + n] - top[x + n] - bottom[x] + top[x];
            *o = s / area;
        }
    });
    ScalarMap::new(w, h, out)
}
