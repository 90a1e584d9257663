//! Closed-form blur-kernel estimation in the gradient domain.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::Fft2;
use crate::image::Image;
use crate::kernel::BlurKernel;

/// Fraction of the largest tap below which taps are zeroed during sanitation.
pub const DEFAULT_KERNEL_FLOOR: f64 = 0.05;

/// Estimates an `h x h` kernel from a skeleton `x_hat` and observation `b`:
///
/// `argmin_k 1/2 |grad(x_hat) * k - grad(b)|^2 + mu |k|^2`
///
/// solved on the full periodic grid, cropped around the origin and sanitized
/// with the default floor.
pub fn estimate_kernel(x_hat: &Image, b: &Image, h: usize, mu: f64) -> Result<BlurKernel> {
    estimate_kernel_with_floor(x_hat, b, h, mu, DEFAULT_KERNEL_FLOOR)
}

pub fn estimate_kernel_with_floor(x_hat: &Image, b: &Image, h: usize, mu: f64, floor: f64) -> Result<BlurKernel> {
    let raw = estimate_kernel_raw(x_hat, b, h, mu)?;
    sanitize_kernel_with_floor(h, &raw, floor)
}

/// The cropped `h x h` least-squares solution before sanitation.
pub fn estimate_kernel_raw(x_hat: &Image, b: &Image, h: usize, mu: f64) -> Result<Vec<f64>> {
    x_hat.same_dims(b)?;
    if h < 3 || h % 2 == 0 {
        return Err(Error::InvalidParameter(format!("kernel side must be odd and >= 3, got {h}")));
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be > 0, got {mu}")));
    }
    let (w, ht) = x_hat.dims();
    if h > w || h > ht {
        return Err(Error::InvalidInput(format!("kernel side {h} exceeds image {w}x{ht}")));
    }
    let fft = Fft2::new(w, ht);
    let (dx, dy) = fft.gradient_spectra();
    let xs = fft.forward_real(x_hat.as_slice());
    let bs = fft.forward_real(b.as_slice());
    let mut energy = 0.0;
    let mut num = Vec::with_capacity(xs.len());
    let mut den = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        let (gxx, gyx) = (dx[i] * xs[i], dy[i] * xs[i]);
        let (gxb, gyb) = (dx[i] * bs[i], dy[i] * bs[i]);
        let p = gxx.norm_sqr() + gyx.norm_sqr();
        energy += p;
        num.push(gxx.conj() * gxb + gyx.conj() * gyb);
        den.push(p + 2.0 * mu);
    }
    if energy <= 1e-20 * xs.len() as f64 {
        return Err(Error::DegenerateInput("skeleton has no gradients".into()));
    }
    let spec: Vec<Complex64> = num.iter().zip(&den).map(|(n, d)| n / d).collect();
    let (full, _) = fft.inverse_real(spec);
    let r = (h / 2) as isize;
    let mut out = Vec::with_capacity(h * h);
    for ky in 0..h {
        for kx in 0..h {
            let x = (kx as isize - r).rem_euclid(w as isize) as usize;
            let y = (ky as isize - r).rem_euclid(ht as isize) as usize;
            out.push(full[y * w + x]);
        }
    }
    Ok(out)
}

/// Clamps negatives, applies the default 5%-of-max floor and normalizes.
pub fn sanitize_kernel(side: usize, raw: &[f64]) -> Result<BlurKernel> {
    sanitize_kernel_with_floor(side, raw, DEFAULT_KERNEL_FLOOR)
}

pub fn sanitize_kernel_with_floor(side: usize, raw: &[f64], floor: f64) -> Result<BlurKernel> {
    if raw.len() != side * side {
        return Err(Error::DimensionMismatch {
            expected: format!("{} taps", side * side),
            actual: format!("{} taps", raw.len()),
        });
    }
    if !(0.0..1.0).contains(&floor) {
        return Err(Error::InvalidParameter(format!("kernel floor must be in [0, 1), got {floor}")));
    }
    if raw.iter().any(|t| !t.is_finite()) {
        return Err(Error::DegenerateKernel("non-finite kernel tap".into()));
    }
    let max = raw.iter().cloned().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateKernel("no positive taps".into()));
    }
    let cut = floor * max;
    let taps: Vec<f64> = raw.iter().map(|&t| if t > 0.0 && t >= cut { t } else { 0.0 }).collect();
    BlurKernel::normalized(side, taps)
}
