//! Smoothness priors on lattice graphs and their per-edge curves.
//!
//! All energies sum over ordered node pairs, so each undirected edge is
//! counted twice.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{build_weight_graph, gaussian, GraphKind, LatticeGraph, WeightParams};
use crate::image::Image;

fn check(x: &Image, g: &LatticeGraph) -> Result<()> {
    if x.dims() != g.dims() {
        return Err(Error::dims(g.dims(), x.dims()));
    }
    Ok(())
}

/// Graph total variation with fixed weights.
pub fn gtv_value(x: &Image, g: &LatticeGraph) -> Result<f64> {
    check(x, g)?;
    if g.kind() == GraphKind::L1Gamma {
        return Err(Error::InvalidInput(
            "total variation is defined on similarity weights, not l1-Laplacian weights".into(),
        ));
    }
    let s = x.as_slice();
    Ok(2.0 * g.edges().map(|(i, j, w)| w * (s[j] - s[i]).abs()).sum::<f64>())
}

/// Reweighted graph total variation: weights recomputed from `x` itself.
pub fn rgtv_value(x: &Image, params: WeightParams) -> Result<f64> {
    let g = build_weight_graph(x, params)?;
    gtv_value(x, &g)
}

/// Graph Laplacian regularizer, the double sum of `w (x_j - x_i)^2`.
///
/// Equals `2 x^T L x` for the combinatorial Laplacian of `g`.
pub fn gl_value(x: &Image, g: &LatticeGraph) -> Result<f64> {
    check(x, g)?;
    Ok(2.0 * g.quadratic_form(x.as_slice()))
}

/// Reweighted graph Laplacian regularizer.
pub fn rgl_value(x: &Image, params: WeightParams) -> Result<f64> {
    let g = build_weight_graph(x, params)?;
    gl_value(x, &g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    Gl,
    Gtv,
    Rgl,
    Rgtv,
}

impl PriorKind {
    pub const ALL: [PriorKind; 4] = [PriorKind::Gl, PriorKind::Gtv, PriorKind::Rgl, PriorKind::Rgtv];
}

impl fmt::Display for PriorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriorKind::Gl => "gl",
            PriorKind::Gtv => "gtv",
            PriorKind::Rgl => "rgl",
            PriorKind::Rgtv => "rgtv",
        })
    }
}

impl FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(PriorKind::Gl),
            "gtv" => Ok(PriorKind::Gtv),
            "rgl" => Ok(PriorKind::Rgl),
            "rgtv" => Ok(PriorKind::Rgtv),
            other => Err(Error::InvalidParameter(format!("unknown prior kind {other:?}"))),
        }
    }
}

/// Value and first derivative of the single-edge regularizer at difference `d`.
///
/// `w_fixed` is used by the fixed-weight priors, `sigma` by the reweighted ones.
pub fn pairwise_curve(kind: PriorKind, d: f64, w_fixed: f64, sigma: f64) -> (f64, f64) {
    match kind {
        PriorKind::Gl => (w_fixed * d * d, 2.0 * w_fixed * d),
        PriorKind::Gtv => (w_fixed * d, w_fixed),
        PriorKind::Rgl => {
            let e = gaussian(d, sigma);
            let r = d * d / (sigma * sigma);
            (e * d * d, e * 2.0 * d * (1.0 - r))
        }
        PriorKind::Rgtv => {
            let e = gaussian(d, sigma);
            let r = d * d / (sigma * sigma);
            (e * d, e * (1.0 - 2.0 * r))
        }
    }
}

/// Uniform grid of `points` differences spanning `[0, 1]`.
pub fn difference_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

/// Difference on `grid` that maximizes the pairwise curve.
pub fn curve_argmax(kind: PriorKind, grid: &[f64], w_fixed: f64, sigma: f64) -> f64 {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &d in grid {
        let (v, _) = pairwise_curve(kind, d, w_fixed, sigma);
        if v > best.0 {
            best = (v, d);
        }
    }
    best.1
}

/// One gradient-descent step on the single-edge regularizer.
pub fn descend_difference(kind: PriorKind, d: f64, step: f64, w_fixed: f64, sigma: f64) -> f64 {
    let (_, g) = pairwise_curve(kind, d, w_fixed, sigma);
    d - step * g
}
