//! Coarse-to-fine blind deblurring of a synthetic image.

use rgtv::eval::synth::{add_gaussian_noise, pws_image};
use rgtv::eval::{error_ratio, kernel_ncc, psnr};
use rgtv::fourier::convolve;
use rgtv::pipeline::{blind_deblur_traced, nonblind_finish};
use rgtv::{BlurKernel, DeblurConfig};

fn main() -> rgtv::Result<()> {
    let x = pws_image(128, 128, 0);
    let k = BlurKernel::gaussian(9, 1.5)?;
    let b = add_gaussian_noise(&convolve(&x, &k)?, 0.01, 1)?;
    let cfg = DeblurConfig::with_kernel_side(9);

    let run = blind_deblur_traced(&b, &cfg)?;
    for s in &run.trace {
        println!("scale {} step {} beta {:.4} kernel change {:.2e}", s.scale, s.step, s.beta, s.kernel_change);
    }
    let x_est = nonblind_finish(&b, &run.kernel, cfg.nonblind_beta)?;
    let x_gt = nonblind_finish(&b, &k, cfg.nonblind_beta)?;
    println!("kernel NCC {:.4}", kernel_ncc(&run.kernel, &k)?);
    println!("error ratio {:.3}", error_ratio(&x, &x_est, &x_gt)?);
    println!("PSNR blurred {:.2} dB, restored {:.2} dB", psnr(&x, &b)?, psnr(&x, &x_est)?);
    Ok(())
}
