//! Fast blind deblurring for Gaussian-like blur through a Lanczos graph filter.

use std::time::Instant;

use rgtv::eval::synth::{add_gaussian_noise, pws_image};
use rgtv::eval::{kernel_ncc, psnr};
use rgtv::fourier::convolve;
use rgtv::pipeline::{blind_deblur_gaussian_detailed, nonblind_finish};
use rgtv::{BlurKernel, DeblurConfig};

fn main() -> rgtv::Result<()> {
    let x = pws_image(128, 128, 0);
    let k = BlurKernel::gaussian(9, 1.5)?;
    let b = add_gaussian_noise(&convolve(&x, &k)?, 0.01, 1)?;
    let cfg = DeblurConfig::with_kernel_side(9);

    let t = Instant::now();
    let run = blind_deblur_gaussian_detailed(&b, &cfg)?;
    println!(
        "{} iterations in {:.2}s, converged {}, final a {:.4}",
        run.iterations,
        t.elapsed().as_secs_f64(),
        run.converged,
        run.a
    );
    let k_hat = run.kernel?;
    let x_est = nonblind_finish(&b, &k_hat, cfg.nonblind_beta)?;
    println!("kernel NCC {:.4}, PSNR {:.2} dB", kernel_ncc(&k_hat, &k)?, psnr(&x, &x_est)?);
    Ok(())
}
