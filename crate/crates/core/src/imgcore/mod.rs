//! Raster containers and the pixel kernels shared by every pipeline.
//!
//! All kernels use edge replication at borders and are pure functions of
//! their inputs. Row-level parallelism never changes results.

mod boxfilter;
mod color;
mod gaussian;
pub mod io;
mod morph;
mod resize;
mod sobel;
mod types;

pub use boxfilter::box_filter;
pub use color::{luma, rgb_interleaved_to_grayscale, to_grayscale};
pub use gaussian::{gaussian_blur, gaussian_kernel, sigma_for_size};
pub use morph::{dilate, threshold_inverse};
pub use resize::{nearest_index, resize_nearest};
pub use sobel::{gradient_magnitude, sobel_gradients, sobel_kernels, sobel_magnitude};
pub use types::{BinaryMask, GrayImage, KernelSize, ScalarMap};

pub(crate) use types::ensure_same_dims;
