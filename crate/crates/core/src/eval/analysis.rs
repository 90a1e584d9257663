//! CSV emitters for regularizer curves, weight histograms, graph spectra and
//! reweighted-filter iterations. Column order is fixed.

use std::fmt::Write;

use crate::error::Result;
use crate::graph::{LatticeGraph, WeightParams};
use crate::image::Image;
use crate::priors::{difference_grid, pairwise_curve, PriorKind};
use crate::spectral::{default_neighborhood, eigendecompose, relative_eigenvalues, RgtvFilterRun};

use super::WeightHistogram;

pub const CURVES_HEADER: &str = "d,gl,gtv,rgl,rgtv,gl_slope,gtv_slope,rgl_slope,rgtv_slope";
pub const HISTOGRAM_HEADER: &str = "bin_lo,bin_hi,fraction,center_weight";
pub const SPECTRUM_HEADER: &str = "variant,k,lambda_w,lambda_gamma,relative_w,relative_gamma";
pub const RGTV_ITER_HEADER: &str = "iteration,node,value";

/// Pairwise regularizer values and slopes on a uniform `d` grid over `[0, 1]`.
/// The fixed-weight priors use `w = 1`.
pub fn curves_csv(sigma: f64, points: usize) -> String {
    let mut s = String::from(CURVES_HEADER);
    s.push('\n');
    for d in difference_grid(points) {
        let vals: Vec<(f64, f64)> = PriorKind::ALL.iter().map(|&k| pairwise_curve(k, d, 1.0, sigma)).collect();
        let _ = write!(s, "{d}");
        for (v, _) in &vals {
            let _ = write!(s, ",{v}");
        }
        for (_, g) in &vals {
            let _ = write!(s, ",{g}");
        }
        s.push('\n');
    }
    s
}

pub fn histogram_csv(h: &WeightHistogram) -> String {
    let mut s = String::from(HISTOGRAM_HEADER);
    s.push('\n');
    for i in 0..h.bins() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            h.edges[i], h.edges[i + 1], h.fractions[i], h.center_weights[i]
        );
    }
    s
}

/// Spectra of the Gaussian-weight and l1 Laplacians of each named signal.
/// Relative eigenvalues are `lambda_k / lambda_2`; k is 1-based.
pub fn spectrum_csv(signals: &[(&str, Image)], params: WeightParams) -> Result<String> {
    let mut s = String::from(SPECTRUM_HEADER);
    s.push('\n');
    for (name, x) in signals {
        let nb = default_neighborhood(x);
        let w = eigendecompose(&LatticeGraph::weight_graph(x, params, nb)?.laplacian_dense()?)?;
        let g = eigendecompose(&LatticeGraph::gamma_graph(x, params, nb)?.laplacian_dense()?)?;
        let rw = relative_eigenvalues(&w)?;
        let rg = relative_eigenvalues(&g)?;
        for k in 0..w.len() {
            let _ = writeln!(
                s,
                "{name},{},{},{},{},{}",
                k + 1,
                w.eigenvalues[k],
                g.eigenvalues[k],
                rw[k],
                rg[k]
            );
        }
    }
    Ok(s)
}

/// Every iterate of a reweighted filter run, iteration 0 being the input.
pub fn rgtv_iter_csv(run: &RgtvFilterRun) -> String {
    let mut s = String::from(RGTV_ITER_HEADER);
    s.push('\n');
    for (it, x) in run.iterates.iter().enumerate() {
        for (i, v) in x.as_slice().iter().enumerate() {
            let _ = writeln!(s, "{it},{i},{v}");
        }
    }
    s
}
