//! Metrics, analysis emitters, file formats and synthetic test data.

pub mod analysis;
mod histogram;
pub mod io;
mod metrics;
pub mod synth;

pub use histogram::{weight_histogram, WeightHistogram, DEFAULT_BINS, HISTOGRAM_PATCH_CAP};
pub use metrics::{error_ratio, kernel_ncc, psnr, EvalReport, SUCCESS_THRESHOLD};
