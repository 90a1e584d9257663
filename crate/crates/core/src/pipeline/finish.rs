use crate::error::{Error, Result};
use crate::fourier::wiener_deconvolve;
use crate::graph::{LatticeGraph, Neighborhood, WeightParams};
use crate::image::Image;
use crate::kernel::BlurKernel;
use crate::skeleton::{cg_solve, DeconvOperator};

/// Tikhonov weight of the pilot estimate that seeds the graph weights.
const PILOT_REG: f64 = 0.1;

/// Non-blind deconvolution with a graph-Laplacian prior whose Gaussian
/// weights come from a Wiener pilot estimate. Output is clamped to `[0, 1]`.
pub fn nonblind_finish(b: &Image, k: &BlurKernel, beta: f64) -> Result<Image> {
    nonblind_finish_with(b, k, beta, WeightParams::default())
}

pub fn nonblind_finish_with(b: &Image, k: &BlurKernel, beta: f64, params: WeightParams) -> Result<Image> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    params.validate()?;
    if k.is_delta() {
        return Ok(b.clamped(0.0, 1.0));
    }
    let pilot = wiener_deconvolve(b, k, PILOT_REG)?.clamped(0.0, 1.0);
    let g = LatticeGraph::weight_graph(&pilot, params, Neighborhood::Four)?;
    let op = DeconvOperator::new(k, g, beta)?;
    let rhs = op.rhs(b);
    let out = cg_solve(&op, &rhs, Some(pilot.as_slice()), 1e-8, 1000)?;
    Ok(Image::new(b.width(), b.height(), out.solution)?.clamped(0.0, 1.0))
}
