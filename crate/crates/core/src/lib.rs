//! Raindrop occlusion detection for camera image sequences.
//!
//! A raindrop sitting on a lens or windshield blurs whatever lies behind it, so
//! its footprint has persistently low spatial gradient while the moving scene
//! around it keeps producing edges. The detector averages per-frame Sobel
//! gradient magnitudes over a short sequence, smooths the averaged map with a
//! large Gaussian, marks low-gradient pixels as artifact candidates and dilates
//! them back to drop size. The fraction of artifact pixels decides whether the
//! sequence is flagged.
//!
//! Modules:
//!
//! - [`imgcore`]: raster types and pixel kernels (Sobel, Gaussian, box filter,
//!   inverse threshold, dilation, resize, PNG/JPEG I/O).
//! - [`detector`]: the averaged-gradient detector and segmenter.
//! - [`ncc`]: the windowed normalized cross-correlation baseline.
//! - [`rainsynth`]: synthetic raindrop rendering for data augmentation.
//! - [`dataio`]: polygon annotations, mask rasterization, keyframe label
//!   propagation and sequence manifests.
//! - [`evalkit`]: segmentation scores, accumulated Dice, ROC sweeps, AUC and
//!   timing.
//! - [`cli`]: the batch front end used by the `raindrop` binary.
//!
//! ```
//! use raindrop::detector::{detect, DetectorParams, FrameSequence};
//! use raindrop::imgcore::GrayImage;
//!
//! let frames = vec![GrayImage::filled(64, 48, 90).unwrap(); 4];
//! let seq = FrameSequence::new(frames, "flat").unwrap();
//! let result = detect(&seq, &DetectorParams::default()).unwrap();
//! // A featureless sequence has zero gradient everywhere.
//! assert!(result.detected);
//! assert_eq!(result.artifact_fraction, 1.0);
//! ```

pub mod cli;
pub mod dataio;
pub mod detector;
mod error;
pub mod evalkit;
pub mod imgcore;
pub mod ncc;
pub mod rainsynth;

pub use error::{Error, Result};
