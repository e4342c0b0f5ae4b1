use rayon::prelude::*;

use super::{KernelSize, ScalarMap};
use crate::Result;

/// Sigma implied by a kernel size: `0.3 * ((d - 1) * 0.5 - 1) + 0.8`.
pub fn sigma_for_size(d: KernelSize) -> f64 {
    0.3 * ((d.get() as f64 - 1.0) * 0.5 - 1.0) + 0.8
}

/// Normalized 1D Gaussian weights of length `d`.
pub fn gaussian_kernel(d: KernelSize) -> Vec<f64> {
    if d.get() == 1 {
        return vec![1.0];
    }
    let sigma = sigma_for_size(d);
    let r = d.radius() as f64;
    let raw: Vec<f64> = (0..d.get())
        .map(|i| {
            let t = i as f64 - r;
            (-(t * t) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

// Outputs per register block in `convolve_padded`.
const LANES: usize = 8;

// Symmetric 1D correlation of `padded` (row plus `r` replicated samples on
// each side) into `dst`. Each output sums the centre tap, then the folded
// pairs from the outermost inwards; blocks of outputs accumulate in
// registers so `dst` is written once.
fn convolve_padded(padded: &[f64], kernel: &[f64], dst: &mut [f64]) {
    let r = kernel.len() / 2;
    let w = dst.len();
    let centre = kernel[r];
    let mut x = 0;
    while x + LANES <= w {
        let mut acc = [0.0f64; LANES];
        let mid: &[f64; LANES] = padded[x + r..x + r + LANES].try_into().unwrap();
        for (a, &v) in acc.iter_mut().zip(mid) {
            *a = centre * v;
        }
        for (k, &wk) in kernel[..r].iter().enumerate() {
            let left: &[f64; LANES] = padded[x + k..x + k + LANES].try_into().unwrap();
            let right: &[f64; LANES] = padded[x + 2 * r - k..x + 2 * r - k + LANES]
                .try_into()
                .unwrap();
            for ((a, &p), &q) in acc.iter_mut().zip(left).zip(right) {
                *a += wk * (p + q);
            }
        }
        dst[x..x + LANES].copy_from_slice(&acc);
        x += LANES;
    }
    for (i, o) in dst.iter_mut().enumerate().skip(x) {
        let mut a = centre * padded[i + r];
        for (k, &wk) in kernel[..r].iter().enumerate() {
            a += wk * (padded[i + k] + padded[i + 2 * r - k]);
        }
        *o = a;
    }
}

// Row-wise 1D pass with replicate padding.
fn blur_rows(src: &[f64], w: usize, kernel: &[f64]) -> Vec<f64> {
    let r = kernel.len() / 2;
    let mut out = vec![0.0f64; src.len()];
    out.par_chunks_mut(w).zip(src.par_chunks(w)).for_each_init(
        || vec![0.0f64; w + 2 * r],
        |padded, (dst, row)| {
            padded[..r].fill(row[0]);
            padded[r..r + w].copy_from_slice(row);
            padded[r + w..].fill(row[w - 1]);
            convolve_padded(padded, kernel, dst);
        },
    );
    out
}

// Blocked transpose of a `w x h` row-major buffer.
fn transpose(src: &[f64], w: usize, h: usize) -> Vec<f64> {
    const B: usize = 32;
    let mut out = vec![0.0f64; src.len()];
    out.par_chunks_mut(h * B)
        .enumerate()
        .for_each(|(bx, strip)| {
            let x0 = bx * B;
            let x1 = (x0 + B).min(w);
            for y0 in (0..h).step_by(B) {
                for y in y0..(y0 + B).min(h) {
                    for x in x0..x1 {
                        strip[(x - x0) * h + y] = src[y * w + x];
                    }
                }
            }
        });
    out
}

/// Separable Gaussian blur with replicate borders. `d = 1` is the identity.
///
/// The vertical pass runs as a row pass over the transposed map, which keeps
/// memory access sequential for large kernels.
pub fn gaussian_blur(map: &ScalarMap, d: KernelSize) -> Result<ScalarMap> {
    if d.get() == 1 {
        return Ok(map.clone());
    }
    let kernel = gaussian_kernel(d);
    let (w, h) = map.dims();
    let horizontal = blur_rows(map.as_slice(), w, &kernel);
    let vertical = blur_rows(&transpose(&horizontal, w, h), h, &kernel);
    ScalarMap::new(w, h, transpose(&vertical, h, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k(d: usize) -> KernelSize {
        KernelSize::new(d).unwrap()
    }

    fn naive(map: &ScalarMap, d: usize) -> ScalarMap {
        let w1 = gaussian_kernel(k(d));
        let r = (d / 2) as isize;
        ScalarMap::from_fn(map.width(), map.height(), |x, y| {
            let mut s = 0.0;
            for j in 0..d as isize {
                for i in 0..d as isize {
                    s += w1[j as usize]
                        * w1[i as usize]
                        * map.get_clamped(x as isize + i - r, y as isize + j - r);
                }
            }
            s
        })
        .unwrap()
    }

    #[test]
    fn sigma_formula() {
        assert!((sigma_for_size(k(3)) - 0.8).abs() < 1e-12);
        assert!((sigma_for_size(k(5)) - 1.1).abs() < 1e-12);
        assert!((sigma_for_size(k(271)) - 41.0).abs() < 1e-9);
    }

    #[test]
    fn constant_map_is_preserved() {
        let m = ScalarMap::filled(11, 6, 42.5).unwrap();
        for d in [1, 3, 9, 31] {
            let out = gaussian_blur(&m, k(d)).unwrap();
            assert!(out.as_slice().iter().all(|&v| (v - 42.5).abs() < 1e-9));
        }
    }

    #[test]
    fn impulse_reproduces_kernel() {
        let mut m = ScalarMap::filled(9, 9, 0.0).unwrap();
        m.set(4, 4, 1.0);
        let out = gaussian_blur(&m, k(3)).unwrap();
        // sigma 0.8: 1D weights exp(-1/1.28) normalized.
        let e = (-1.0f64 / 1.28).exp();
        let w1 = [
            e / (1.0 + 2.0 * e),
            1.0 / (1.0 + 2.0 * e),
            e / (1.0 + 2.0 * e),
        ];
        for j in 0..3 {
            for i in 0..3 {
                assert!((out.get(3 + i, 3 + j) - w1[i] * w1[j]).abs() < 1e-12);
            }
        }
        assert_eq!(out.get(0, 0), 0.0);
    }

    #[test]
    fn random_map_matches_direct_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = ScalarMap::from_fn(8, 8, |_, _| rng.gen_range(0.0..255.0)).unwrap();
        let out = gaussian_blur(&m, k(5)).unwrap();
        let want = naive(&m, 5);
        for (a, b) in out.as_slice().iter().zip(want.as_slice()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn kernel_wider_than_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = ScalarMap::from_fn(4, 3, |_, _| rng.gen_range(0.0..255.0)).unwrap();
        let out = gaussian_blur(&m, k(15)).unwrap();
        let want = naive(&m, 15);
        for (a, b) in out.as_slice().iter().zip(want.as_slice()) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
