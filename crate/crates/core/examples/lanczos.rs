//! Krylov approximation of a graph filter against the exact eigendecomposition.

use rgtv::graph::build_gamma_graph;
use rgtv::eval::synth::pws_image;
use rgtv::pipeline::gaussian_response;
use rgtv::spectral::{graph_spectrum, lanczos_filter};
use rgtv::WeightParams;

fn main() -> rgtv::Result<()> {
    let x = pws_image(16, 16, 3);
    let g = build_gamma_graph(&x, WeightParams::new(0.3, 0.01)?)?;
    let h = |l: f64| gaussian_response(l, -0.07, 0.01);
    let exact = graph_spectrum(&g)?.filter(x.as_slice(), h);
    for z in [5, 10, 20, 40, 80] {
        let approx = lanczos_filter(&g, x.as_slice(), h, z)?;
        let err: f64 = approx.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        println!("Z = {z:>2}: error {err:.3e}");
    }
    Ok(())
}
