//! Closed-form kernel estimate from a sharp image and its blurred version.

use rgtv::eval::kernel_ncc;
use rgtv::eval::synth::pws_image;
use rgtv::fourier::convolve;
use rgtv::kernelest::estimate_kernel;
use rgtv::BlurKernel;

fn main() -> rgtv::Result<()> {
    let x = pws_image(64, 64, 5);
    let k = BlurKernel::gaussian(7, 1.2)?;
    let b = convolve(&x, &k)?;
    for mu in [1e-4, 1e-2, 1.0] {
        let est = estimate_kernel(&x, &b, 7, mu)?;
        println!("mu {mu:.0e}: NCC {:.4}, center tap {:.4}", kernel_ncc(&est, &k)?, est.center_tap());
    }
    Ok(())
}
