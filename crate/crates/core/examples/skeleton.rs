//! Skeleton restoration with a known kernel, with and without a conditioning check.

use rgtv::eval::synth::two_level_patch;
use rgtv::fourier::convolve;
use rgtv::skeleton::{restore_skeleton_detailed, SkeletonOptions};
use rgtv::BlurKernel;

fn main() -> rgtv::Result<()> {
    let sharp = two_level_patch(32, 32, 0.0, 1.0);
    let k = BlurKernel::gaussian(7, 1.5)?;
    let b = convolve(&sharp, &k)?;
    let opts = SkeletonOptions {
        check_conditioning: true,
        ..SkeletonOptions::default()
    };
    let res = restore_skeleton_detailed(&b, &k, &opts, None)?;
    println!(
        "{} outer passes, {:?} cg iterations, refined: {}",
        res.outer_iterations, res.cg_iterations, res.refined
    );
    if let Some(c) = &res.conditioning {
        println!("condition number {:.3e}", c.condition_number);
    }
    let row: Vec<String> = (12..20).map(|x| format!("{:.3}", res.skeleton.get(x, 16))).collect();
    println!("row across the edge: {}", row.join(" "));
    Ok(())
}
