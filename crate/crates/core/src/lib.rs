//! Blind image deblurring with a reweighted graph total variation prior.
//!
//! The crate is organized bottom-up:
//!
//! * [`image`], [`graph`]: images as signals on 4-neighbor lattice graphs,
//!   Gaussian and l1 (`gamma`) edge weights, Laplacians.
//! * [`priors`]: GL, GTV, RGL and RGTV energies and their pairwise curves.
//! * [`spectral`]: eigendecompositions, MAP graph filters, Lanczos and power
//!   iterations.
//! * [`fourier`]: periodic convolution and frequency-domain solves.
//! * [`skeleton`], [`kernelest`]: the two alternating subproblems.
//! * [`pipeline`]: coarse-to-fine blind deblurring and the Gaussian fast path.
//! * [`eval`]: metrics, histograms, CSV emitters, file formats, synthetic data.

pub mod error;
pub mod eval;
pub mod fourier;
pub mod graph;
pub mod image;
pub mod kernel;
pub mod kernelest;
pub mod linalg;
pub mod pipeline;
pub mod priors;
pub mod skeleton;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{GraphKind, LatticeGraph, Neighborhood, WeightParams};
pub use image::Image;
pub use kernel::BlurKernel;
pub use pipeline::DeblurConfig;
