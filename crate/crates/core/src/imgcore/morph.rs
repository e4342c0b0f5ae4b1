use rayon::prelude::*;

use super::{BinaryMask, KernelSize, ScalarMap};
use crate::{Error, Result};

/// Inverse binarization: a pixel is an artifact when its value is at most
/// `t` times the map maximum. A map whose maximum is zero is all artifact.
pub fn threshold_inverse(map: &ScalarMap, t: f64) -> Result<BinaryMask> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Parameter(format!(
            "binarization fraction must lie in [0, 1], got {t}"
        )));
    }
    let max = map.max();
    let (w, h) = map.dims();
    if max <= 0.0 {
        return BinaryMask::full(w, h);
    }
    let cut = t * max;
    BinaryMask::new(w, h, map.as_slice().iter().map(|&v| v <= cut).collect())
}

// Sliding-window "any" over a line, window clamped to the line.
fn dilate_line(src: &[bool], r: usize, out: &mut [bool]) {
    let n = src.len();
    let mut count = src[..r.min(n)].iter().filter(|&&b| b).count();
    for i in 0..n {
        if i + r < n && src[i + r] {
            count += 1;
        }
        if i > r && src[i - r - 1] {
            count -= 1;
        }
        out[i] = count > 0;
    }
}

/// Binary dilation with an `m x m` square structuring element.
///
/// Runs as a row pass followed by a column pass with running counts, so the
/// cost per pixel does not depend on `m`.
pub fn dilate(mask: &BinaryMask, m: KernelSize) -> Result<BinaryMask> {
    let r = m.radius();
    if r == 0 {
        return Ok(mask.clone());
    }
    let (w, h) = mask.dims();
    let src = mask.as_slice();

    let mut rows = vec![false; w * h];
    rows.par_chunks_mut(w)
        .zip(src.par_chunks(w))
        .for_each(|(out, line)| dilate_line(line, r, out));

    // Column pass on the transposed layout keeps the inner loop contiguous.
    let mut cols_t = vec![false; w * h];
    cols_t.par_chunks_mut(h).enumerate().for_each_init(
        || vec![false; h],
        |column, (x, out)| {
            for (y, c) in column.iter_mut().enumerate() {
                *c = rows[y * w + x];
            }
            dilate_line(column, r, out);
        },
    );
    let mut data = vec![false; w * h];
    for x in 0..w {
        for y in 0..h {
            data[y * w + x] = cols_t[x * h + y];
        }
    }
    BinaryMask::new(w, h, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k(d: usize) -> KernelSize {
        KernelSize::new(d).unwrap()
    }

    fn naive_dilate(mask: &BinaryMask, m: usize) -> BinaryMask {
        let r = (m / 2) as isize;
        BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
            let mut any = false;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if nx >= 0
                        && ny >= 0
                        && (nx as usize) < mask.width()
                        && (ny as usize) < mask.height()
                    {
                        any |= mask.get(nx as usize, ny as usize);
                    }
                }
            }
            any
        })
        .unwrap()
    }

    #[test]
    fn zero_map_is_all_artifact() {
        let m = ScalarMap::filled(4, 3, 0.0).unwrap();
        assert_eq!(threshold_inverse(&m, 0.18).unwrap().count(), 12);
    }

    #[test]
    fn threshold_separates_values() {
        let m = ScalarMap::new(2, 2, vec![0.0, 100.0, 100.0, 0.0]).unwrap();
        let b = threshold_inverse(&m, 0.5).unwrap();
        assert_eq!(b.as_slice(), &[true, false, false, true]);

        let m = ScalarMap::new(4, 1, vec![10.0, 17.0, 20.0, 90.0]).unwrap();
        let b = threshold_inverse(&m, 0.18).unwrap();
        assert_eq!(b.as_slice(), &[true, false, false, false]);
    }

    #[test]
    fn threshold_rejects_out_of_range() {
        let m = ScalarMap::filled(2, 2, 1.0).unwrap();
        assert!(matches!(
            threshold_inverse(&m, 1.5),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            threshold_inverse(&m, -0.1),
            Err(Error::Parameter(_))
        ));
        assert!(threshold_inverse(&m, f64::NAN).is_err());
    }

    #[test]
    fn single_pixel_becomes_block() {
        let mut m = BinaryMask::empty(7, 7).unwrap();
        m.set(3, 3, true);
        let d = dilate(&m, k(3)).unwrap();
        let want =
            BinaryMask::from_fn(7, 7, |x, y| (2..=4).contains(&x) && (2..=4).contains(&y)).unwrap();
        assert_eq!(d, want);
    }

    #[test]
    fn identity_for_unit_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = BinaryMask::from_fn(9, 5, |_, _| rng.gen_bool(0.3)).unwrap();
        assert_eq!(dilate(&m, k(1)).unwrap(), m);
    }

    #[test]
    fn random_mask_matches_window_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = BinaryMask::from_fn(16, 16, |_, _| rng.gen_bool(0.05)).unwrap();
        assert_eq!(dilate(&m, k(5)).unwrap(), naive_dilate(&m, 5));
        assert_eq!(dilate(&m, k(41)).unwrap(), naive_dilate(&m, 41));
    }
}
