//! Iterative spectral filtering sharpens a blurred step.

use rgtv::eval::synth::{default_step, StepVariant};
use rgtv::spectral::iterative_rgtv_filter;
use rgtv::WeightParams;

fn main() -> rgtv::Result<()> {
    let y = StepVariant::BlurredNoisy.apply(&default_step(), 1e-4, 1.0, 0)?;
    let run = iterative_rgtv_filter(&y, WeightParams::new(0.3, 0.01)?, 1.0, 20, 1e-4)?;
    for (i, x) in run.iterates.iter().enumerate() {
        println!("iter {i}: edge jump {:.4}", x.get(25, 0) - x.get(24, 0));
    }
    println!("converged: {}", run.converged);
    Ok(())
}
