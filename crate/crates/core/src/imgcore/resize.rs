use super::GrayImage;
use crate::{Error, Result};

/// Source index sampled by destination index `i` when mapping `src_len`
/// samples onto `dst_len`: the pixel whose extent contains the destination
/// pixel centre, `floor((i + 0.5) * src_len / dst_len)`.
#[inline]
pub fn nearest_index(i: usize, src_len: usize, dst_len: usize) -> usize {
    (((2 * i + 1) * src_len) / (2 * dst_len)).min(src_len - 1)
}

/// Nearest-neighbour resampling to exactly `width x height`.
pub fn resize_nearest(img: &GrayImage, width: usize, height: usize) -> Result<GrayImage> {
    if width == 0 || height == 0 {
        return Err(Error::Parameter(format!(
            "resize target must be positive, got {width}x{height}"
        )));
    }
    if img.dims() == (width, height) {
        return Ok(img.clone());
    }
    let xs: Vec<usize> = (0..width)
        .map(|x| nearest_index(x, img.width(), width))
        .collect();
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        let row = img.row(nearest_index(y, img.height(), height));
        data.extend(xs.iter().map(|&sx| row[sx]));
    }
    GrayImage::new(width, height, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_size_is_identity() {
        let img = GrayImage::from_fn(5, 3, |x, y| (x * 10 + y) as u8).unwrap();
        assert_eq!(resize_nearest(&img, 5, 3).unwrap(), img);
    }

    #[test]
    fn integer_upscale_replicates_blocks() {
        let img = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        let up = resize_nearest(&img, 4, 4).unwrap();
        assert_eq!(
            up.as_slice(),
            &[1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4]
        );
    }

    #[test]
    fn downscale_picks_centre_sources() {
        let img = GrayImage::from_fn(6, 4, |x, y| (y * 6 + x) as u8).unwrap();
        let down = resize_nearest(&img, 3, 2).unwrap();
        // x: floor((i + 0.5) * 2) = 1, 3, 5; y: 1, 3
        assert_eq!(down.as_slice(), &[7, 9, 11, 19, 21, 23]);
    }

    #[test]
    fn zero_target_rejected() {
        let img = GrayImage::filled(2, 2, 0).unwrap();
        assert!(matches!(
            resize_nearest(&img, 0, 2),
            Err(Error::Parameter(_))
        ));
    }
}
