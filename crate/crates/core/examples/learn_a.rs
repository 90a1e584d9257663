//! Fitting the blur coefficient `a` in `y ~ (I + a L) x` from training pairs.

use rgtv::eval::synth::pws_image;
use rgtv::fourier::convolve;
use rgtv::pipeline::learn_a;
use rgtv::BlurKernel;

fn main() -> rgtv::Result<()> {
    for sigma_b in [0.5f64, 1.0, 1.5, 2.0] {
        let side = 2 * (3.0 * sigma_b).ceil() as usize + 1;
        let k = BlurKernel::gaussian(side, sigma_b)?;
        let pairs = (0..4)
            .map(|s| {
                let x = pws_image(96, 96, 90 + s);
                let y = convolve(&x, &k)?;
                Ok((x, y))
            })
            .collect::<rgtv::Result<Vec<_>>>()?;
        println!("sigma_b {sigma_b}: a = {:.4}", learn_a(&pairs)?);
    }
    Ok(())
}
