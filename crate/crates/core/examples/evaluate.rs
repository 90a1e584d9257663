//! Metrics and the JSON evaluation report.

use rgtv::eval::synth::pws_image;
use rgtv::eval::{error_ratio, kernel_ncc, psnr, EvalReport};
use rgtv::fourier::convolve;
use rgtv::pipeline::nonblind_finish;
use rgtv::{BlurKernel, DeblurConfig};

fn main() -> rgtv::Result<()> {
    let x = pws_image(64, 64, 2);
    let k = BlurKernel::gaussian(7, 1.5)?;
    let b = convolve(&x, &k)?;
    // pretend the estimate came out a bit too narrow
    let k_hat = BlurKernel::gaussian(7, 1.1)?;

    let cfg = DeblurConfig::with_kernel_side(7);
    let x_est = nonblind_finish(&b, &k_hat, cfg.nonblind_beta)?;
    let x_gt = nonblind_finish(&b, &k, cfg.nonblind_beta)?;
    let mut report = EvalReport::new(error_ratio(&x, &x_est, &x_gt)?, psnr(&x, &x_est)?, kernel_ncc(&k_hat, &k)?);
    report.config = Some(cfg);
    println!("{}", report.to_json()?);
    Ok(())
}
