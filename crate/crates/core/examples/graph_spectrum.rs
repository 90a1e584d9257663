//! Relative eigenvalues of the similarity and l1 Laplacians for a step signal.

use rgtv::eval::synth::{default_step, StepVariant};
use rgtv::spectral::{default_neighborhood, graph_spectrum, relative_eigenvalues};
use rgtv::{LatticeGraph, WeightParams};

fn main() -> rgtv::Result<()> {
    let p = WeightParams::new(0.3, 0.01)?;
    for v in StepVariant::ALL {
        let x = v.apply(&default_step(), 0.02, 1.0, 0)?;
        let nb = default_neighborhood(&x);
        let rw = relative_eigenvalues(&graph_spectrum(&LatticeGraph::weight_graph(&x, p, nb)?)?)?;
        let rg = relative_eigenvalues(&graph_spectrum(&LatticeGraph::gamma_graph(&x, p, nb)?)?)?;
        println!("{:>13}: lambda_10/lambda_2 = {:8.2} (w)  {:10.2} (gamma)", v.name(), rw[9], rg[9]);
    }
    Ok(())
}
