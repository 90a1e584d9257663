//! Periodic blur, its adjoint, and Wiener deconvolution.

use rgtv::eval::psnr;
use rgtv::eval::synth::pws_image;
use rgtv::fourier::{convolve, convolve_adjoint, edge_taper, wiener_deconvolve};
use rgtv::BlurKernel;

fn main() -> rgtv::Result<()> {
    let x = pws_image(64, 64, 1);
    let k = BlurKernel::gaussian(9, 1.5)?;
    let b = convolve(&x, &k)?;
    println!("blurred PSNR {:.2} dB", psnr(&x, &b)?);

    // <Kx, b> == <x, K^T b>
    let lhs = b.dot(&b);
    let rhs = x.dot(&convolve_adjoint(&b, &k)?);
    println!("adjoint check: {lhs:.10} vs {rhs:.10}");

    for reg in [1e-1, 1e-2, 1e-3] {
        let xr = wiener_deconvolve(&b, &k, reg)?;
        println!("wiener reg {reg:.0e}: PSNR {:.2} dB", psnr(&x, &xr)?);
    }
    let tapered = edge_taper(&b, &k)?;
    println!("edge taper RMS change {:.4}", tapered.mse(&b)?.sqrt());
    Ok(())
}
