use rayon::prelude::*;

use super::types::ensure_same_dims;
use super::{GrayImage, KernelSize, ScalarMap};
use crate::{Error, Result};

const SMOOTH_3: [i32; 3] = [1, 2, 1];
const DERIV_3: [i32; 3] = [-1, 0, 1];
const SMOOTH_5: [i32; 5] = [1, 4, 6, 4, 1];
const DERIV_5: [i32; 5] = [-1, -2, 0, 2, 1];

/// Separable Sobel factors `(smoothing, derivative)` for a 3 or 5 aperture.
///
/// The 2D horizontal kernel is `smoothing[j] * derivative[i]` at row `j`,
/// column `i`; the vertical kernel is its transpose. Weights are the raw
/// integer ones, without normalization.
pub fn sobel_kernels(aperture: KernelSize) -> Result<(&'static [i32], &'static [i32])> {
    match aperture.get() {
        3 => Ok((&SMOOTH_3, &DERIV_3)),
        5 => Ok((&SMOOTH_5, &DERIV_5)),
        other => Err(Error::Parameter(format!(
            "Sobel aperture must be 3 or 5, got {other}"
        ))),
    }
}

// Runs the separable Sobel passes for every row and hands each output row's
// integer responses `(gx, gy)` to `emit`. For apertures up to 5 every partial
// sum of 8-bit input stays within 16 bits (at most 6 * 16 * 255), so the
// scratch rows are `i16`, which vectorizes twice as wide as `i32`. The
// bound makes the wrapping arithmetic exact.
fn sobel_rows<F>(
    img: &GrayImage,
    aperture: KernelSize,
    out: &mut [f64],
    per_row: usize,
    emit: F,
) -> Result<()>
where
    F: Fn(&[i16], &[i16], &mut [f64]) + Sync,
{
    let (smooth, deriv) = sobel_kernels(aperture)?;
    let smooth: Vec<i16> = smooth.iter().map(|&c| c as i16).collect();
    let deriv: Vec<i16> = deriv.iter().map(|&c| c as i16).collect();
    let (w, h) = img.dims();
    let r = aperture.radius();
    let padded = w + 2 * r;

    out.par_chunks_mut(per_row).enumerate().for_each_init(
        || {
            (
                vec![0i16; padded],
                vec![0i16; padded],
                vec![0i16; w],
                vec![0i16; w],
            )
        },
        |(vs, vd, sx, sy), (y, dst)| {
            // Vertical pass over whole source rows, accumulated into the
            // interior of horizontally padded scratch rows.
            vs.fill(0);
            vd.fill(0);
            for k in 0..smooth.len() {
                let sy_idx =
                    (y as isize + k as isize - r as isize).clamp(0, h as isize - 1) as usize;
                let row = img.row(sy_idx);
                let (cs, cd) = (smooth[k], deriv[k]);
                for ((s, d), &v) in vs[r..r + w]
                    .iter_mut()
                    .zip(vd[r..r + w].iter_mut())
                    .zip(row)
                {
                    let v = i16::from(v);
                    *s = s.wrapping_add(cs.wrapping_mul(v));
                    *d = d.wrapping_add(cd.wrapping_mul(v));
                }
            }
            for i in 0..r {
                vs[i] = vs[r];
                vd[i] = vd[r];
                vs[r + w + i] = vs[r + w - 1];
                vd[r + w + i] = vd[r + w - 1];
            }
            sx.fill(0);
            sy.fill(0);
            for k in 0..smooth.len() {
                let (cs, cd) = (smooth[k], deriv[k]);
                for (((gx, gy), &s), &d) in sx
                    .iter_mut()
                    .zip(sy.iter_mut())
                    .zip(&vs[k..k + w])
                    .zip(&vd[k..k + w])
                {
                    *gx = gx.wrapping_add(cd.wrapping_mul(s));
                    *gy = gy.wrapping_add(cs.wrapping_mul(d));
                }
            }
            emit(sx, sy, dst);
        },
    );
    Ok(())
}

/// Signed horizontal and vertical Sobel responses with edge replication.
///
/// Accumulation is exact integer arithmetic, so results do not depend on the
/// evaluation order or thread count.
pub fn sobel_gradients(img: &GrayImage, aperture: KernelSize) -> Result<(ScalarMap, ScalarMap)> {
    let (w, h) = img.dims();
    // Interleaved [gx row | gy row] per image row.
    let mut both = vec![0.0f64; 2 * w * h];
    sobel_rows(img, aperture, &mut both, 2 * w, |sx, sy, dst| {
        let (gx, gy) = dst.split_at_mut(w);
        for (o, &v) in gx.iter_mut().zip(sx) {
            *o = f64::from(v);
        }
        for (o, &v) in gy.iter_mut().zip(sy) {
            *o = f64::from(v);
        }
    })?;
    let mut gx = Vec::with_capacity(w * h);
    let mut gy = Vec::with_capacity(w * h);
    for chunk in both.chunks_exact(2 * w) {
        gx.extend_from_slice(&chunk[..w]);
        gy.extend_from_slice(&chunk[w..]);
    }
    Ok((ScalarMap::new(w, h, gx)?, ScalarMap::new(w, h, gy)?))
}

/// Sobel magnitude without materializing the component maps.
///
/// Bit-identical to `gradient_magnitude(sobel_gradients(img))`.
pub fn sobel_magnitude(img: &GrayImage, aperture: KernelSize) -> Result<ScalarMap> {
    let (w, h) = img.dims();
    let mut out = vec![0.0f64; w * h];
    sobel_rows(img, aperture, &mut out, w, |sx, sy, dst| {
        for ((o, &a), &b) in dst.iter_mut().zip(sx).zip(sy) {
            let (a, b) = (f64::from(a), f64::from(b));
            *o = (a * a + b * b).sqrt();
        }
    })?;
    ScalarMap::new(w, h, out)
}

/// Per-pixel Euclidean norm `sqrt(gx^2 + gy^2)`.
pub fn gradient_magnitude(gx: &ScalarMap, gy: &ScalarMap) -> Result<ScalarMap> {
    ensure_same_dims("gradient components", gx.dims(), gy.dims())?;
    let data = gx
        .as_slice()
        .iter()
        .zip(gy.as_slice())
        .map(|(&a, &b)| (a * a + b * b).sqrt())
        .collect();
    ScalarMap::new(gx.width(), gx.height(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Direct 2D correlation with the outer-product kernel and replicate borders.
    fn naive(img: &GrayImage, aperture: usize) -> (Vec<f64>, Vec<f64>) {
        let (smooth, deriv) = sobel_kernels(KernelSize::new(aperture).unwrap()).unwrap();
        let r = (aperture / 2) as isize;
        let mut gx = Vec::new();
        let mut gy = Vec::new();
        for y in 0..img.height() as isize {
            for x in 0..img.width() as isize {
                let (mut sx, mut sy) = (0.0, 0.0);
                for j in 0..aperture as isize {
                    for i in 0..aperture as isize {
                        let v = f64::from(img.get_clamped(x + i - r, y + j - r));
                        sx += f64::from(smooth[j as usize] * deriv[i as usize]) * v;
                        sy += f64::from(deriv[j as usize] * smooth[i as usize]) * v;
                    }
                }
                gx.push(sx);
                gy.push(sy);
            }
        }
        (gx, gy)
    }

    #[test]
    fn constant_image_has_zero_gradient() {
        let img = GrayImage::filled(9, 7, 77).unwrap();
        for a in [3, 5] {
            let (gx, gy) = sobel_gradients(&img, KernelSize::new(a).unwrap()).unwrap();
            assert!(gx.as_slice().iter().all(|&v| v == 0.0));
            assert!(gy.as_slice().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn step_edge_matches_direct_convolution() {
        let img = GrayImage::from_fn(5, 5, |x, _| if x < 2 { 0 } else { 255 }).unwrap();
        let (gx, gy) = sobel_gradients(&img, KernelSize::new(3).unwrap()).unwrap();
        let (ox, oy) = naive(&img, 3);
        assert_eq!(gx.as_slice(), &ox[..]);
        assert_eq!(gy.as_slice(), &oy[..]);
        // Column 1 sits just left of the step: (255 - 0) * (1 + 2 + 1).
        assert_eq!(gx.get(1, 2), 1020.0);
        assert_eq!(gx.get(4, 2), 0.0);
    }

    #[test]
    fn random_aperture_five_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let img = GrayImage::from_fn(8, 8, |_, _| rng.gen()).unwrap();
        let (gx, gy) = sobel_gradients(&img, KernelSize::new(5).unwrap()).unwrap();
        let (ox, oy) = naive(&img, 5);
        assert_eq!(gx.as_slice(), &ox[..]);
        assert_eq!(gy.as_slice(), &oy[..]);
    }

    #[test]
    fn unsupported_aperture() {
        let img = GrayImage::filled(4, 4, 0).unwrap();
        for a in [1, 7] {
            assert!(matches!(
                sobel_gradients(&img, KernelSize::new(a).unwrap()),
                Err(Error::Parameter(_))
            ));
        }
    }

    #[test]
    fn fused_magnitude_is_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let img = GrayImage::from_fn(13, 7, |_, _| rng.gen()).unwrap();
        for a in [3, 5] {
            let k = KernelSize::new(a).unwrap();
            let (gx, gy) = sobel_gradients(&img, k).unwrap();
            assert_eq!(
                sobel_magnitude(&img, k).unwrap(),
                gradient_magnitude(&gx, &gy).unwrap()
            );
        }
    }

    #[test]
    fn magnitude_examples() {
        let gx = ScalarMap::filled(2, 2, 3.0).unwrap();
        let gy = ScalarMap::filled(2, 2, 4.0).unwrap();
        let m = gradient_magnitude(&gx, &gy).unwrap();
        assert!(m.as_slice().iter().all(|&v| v == 5.0));
        let z = ScalarMap::filled(2, 2, 0.0).unwrap();
        assert!(gradient_magnitude(&z, &z)
            .unwrap()
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));
        let odd = ScalarMap::filled(3, 2, 0.0).unwrap();
        assert!(matches!(
            gradient_magnitude(&z, &odd),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn magnitude_matches_hypot() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gx = ScalarMap::from_fn(8, 8, |_, _| rng.gen_range(-2000.0..2000.0)).unwrap();
        let gy = ScalarMap::from_fn(8, 8, |_, _| rng.gen_range(-2000.0..2000.0)).unwrap();
        let m = gradient_magnitude(&gx, &gy).unwrap();
        for i in 0..64 {
            let want = gx.as_slice()[i].hypot(gy.as_slice()[i]);
            assert!((m.as_slice()[i] - want).abs() <= 1e-9 * want.max(1.0));
        }
    }
}
