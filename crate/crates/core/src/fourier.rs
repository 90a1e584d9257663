//! Periodic 2-D convolution and frequency-domain solves.
//!
//! Convolution wraps around at the borders, so a blur is a BCCB matrix that
//! the 2-D DFT diagonalizes.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::kernel::BlurKernel;

/// Cached forward/inverse plans for one image size.
#[derive(Clone)]
pub struct Fft2 {
    width: usize,
    height: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

impl Fft2 {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0);
        let mut planner = FftPlanner::new();
        Self {
            width,
            height,
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn transform(&self, buf: &mut [Complex64], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        let (w, h) = (self.width, self.height);
        row.process(buf);
        if h > 1 {
            let mut t = vec![Complex64::default(); w * h];
            for y in 0..h {
                for x in 0..w {
                    t[x * h + y] = buf[y * w + x];
                }
            }
            col.process(&mut t);
            for y in 0..h {
                for x in 0..w {
                    buf[y * w + x] = t[x * h + y];
                }
            }
        }
    }

    /// In-place unnormalized forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.row_fwd, &self.col_fwd);
    }

    /// In-place inverse transform, scaled by `1/N`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.row_inv, &self.col_inv);
        let s = 1.0 / self.len() as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }

    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }

    /// Inverse transform returning the real part and the largest imaginary residue.
    pub fn inverse_real(&self, mut spec: Vec<Complex64>) -> (Vec<f64>, f64) {
        self.inverse(&mut spec);
        let mut residue = 0.0f64;
        let out = spec
            .into_iter()
            .map(|c| {
                residue = residue.max(c.im.abs());
                c.re
            })
            .collect();
        (out, residue)
    }

    /// Transfer function of `k` on this grid (the DFT of the wrapped, centered kernel).
    pub fn kernel_spectrum(&self, k: &BlurKernel) -> Vec<Complex64> {
        let (w, h) = (self.width, self.height);
        let r = k.radius() as isize;
        let mut buf = vec![Complex64::default(); w * h];
        for ky in 0..k.side() {
            for kx in 0..k.side() {
                let x = (kx as isize - r).rem_euclid(w as isize) as usize;
                let y = (ky as isize - r).rem_euclid(h as isize) as usize;
                buf[y * w + x].re += k.tap(kx, ky);
            }
        }
        self.forward(&mut buf);
        buf
    }

    /// Transfer functions of the periodic forward-difference operators.
    pub fn gradient_spectra(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let (w, h) = (self.width, self.height);
        let mut dx = Vec::with_capacity(w * h);
        let mut dy = Vec::with_capacity(w * h);
        for v in 0..h {
            for u in 0..w {
                let ax = 2.0 * std::f64::consts::PI * u as f64 / w as f64;
                let ay = 2.0 * std::f64::consts::PI * v as f64 / h as f64;
                dx.push(Complex64::new(ax.cos() - 1.0, ax.sin()));
                dy.push(Complex64::new(ay.cos() - 1.0, ay.sin()));
            }
        }
        (dx, dy)
    }
}

fn check_kernel_fits(x: &Image, k: &BlurKernel) -> Result<()> {
    if k.side() > x.width() || k.side() > x.height() {
        return Err(Error::InvalidInput(format!(
            "kernel side {} exceeds image {}x{}",
            k.side(),
            x.width(),
            x.height()
        )));
    }
    Ok(())
}

/// Periodic convolution with a fixed kernel, reusing its transfer function.
#[derive(Debug, Clone)]
pub struct Convolver {
    fft: Fft2,
    otf: Vec<Complex64>,
}

impl Convolver {
    pub fn new(width: usize, height: usize, k: &BlurKernel) -> Result<Self> {
        check_kernel_fits(&Image::zeros(width, height), k)?;
        let fft = Fft2::new(width, height);
        let otf = fft.kernel_spectrum(k);
        Ok(Self { fft, otf })
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    pub fn otf(&self) -> &[Complex64] {
        &self.otf
    }

    fn filter(&self, x: &[f64], adjoint: bool) -> Vec<f64> {
        let mut s = self.fft.forward_real(x);
        for (v, k) in s.iter_mut().zip(&self.otf) {
            *v *= if adjoint { k.conj() } else { *k };
        }
        self.fft.inverse_real(s).0
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.filter(x, false)
    }

    pub fn apply_adjoint(&self, x: &[f64]) -> Vec<f64> {
        self.filter(x, true)
    }

    /// `K^T K x` through the squared transfer magnitude.
    pub fn apply_normal(&self, x: &[f64]) -> Vec<f64> {
        let mut s = self.fft.forward_real(x);
        for (v, k) in s.iter_mut().zip(&self.otf) {
            *v *= k.norm_sqr();
        }
        self.fft.inverse_real(s).0
    }
}

/// Periodic convolution `x ⊗ k` with the kernel centered at its middle tap.
pub fn convolve(x: &Image, k: &BlurKernel) -> Result<Image> {
    check_kernel_fits(x, k)?;
    let c = Convolver::new(x.width(), x.height(), k)?;
    Ok(Image::from_vec_unchecked(x.width(), x.height(), c.apply(x.as_slice())))
}

/// Adjoint of [`convolve`]: correlation with `k`.
pub fn convolve_adjoint(y: &Image, k: &BlurKernel) -> Result<Image> {
    check_kernel_fits(y, k)?;
    let c = Convolver::new(y.width(), y.height(), k)?;
    Ok(Image::from_vec_unchecked(y.width(), y.height(), c.apply_adjoint(y.as_slice())))
}

/// Periodic forward differences `(x[c+1] - x[c], x[r+1] - x[r])`.
pub fn gradients(x: &Image) -> (Image, Image) {
    let (w, h) = x.dims();
    let gx = Image::from_fn(w, h, |c, r| x.get((c + 1) % w, r) - x.get(c, r));
    let gy = Image::from_fn(w, h, |c, r| x.get(c, (r + 1) % h) - x.get(c, r));
    (gx, gy)
}

/// Divides `numerator` by a strictly positive real `denominator` spectrum and
/// returns the real inverse transform.
pub fn wiener_like_solve(fft: &Fft2, numerator: &[Complex64], denominator: &[f64]) -> Result<Image> {
    if numerator.len() != fft.len() || denominator.len() != fft.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} spectral samples", fft.len()),
            actual: format!("{} / {}", numerator.len(), denominator.len()),
        });
    }
    if let Some((i, d)) = denominator
        .iter()
        .enumerate()
        .find(|(_, d)| !(d.is_finite() && **d > 0.0))
    {
        return Err(Error::SingularSystem(format!("denominator {d} at frequency {i}")));
    }
    let spec: Vec<Complex64> = numerator.iter().zip(denominator).map(|(n, d)| n / d).collect();
    let (re, residue) = fft.inverse_real(spec);
    let scale = re.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if residue > 1e-8 * scale {
        return Err(Error::InvalidInput(format!(
            "spectral quotient is not Hermitian (imaginary residue {residue:e})"
        )));
    }
    let (w, h) = fft.dims();
    Ok(Image::from_vec_unchecked(w, h, re))
}

/// Tikhonov-regularized deconvolution `conj(K) B / (|K|^2 + reg)`.
pub fn wiener_deconvolve(b: &Image, k: &BlurKernel, reg: f64) -> Result<Image> {
    let conv = Convolver::new(b.width(), b.height(), k)?;
    let bs = conv.fft().forward_real(b.as_slice());
    let num: Vec<Complex64> = bs.iter().zip(conv.otf()).map(|(b, k)| k.conj() * b).collect();
    let den: Vec<f64> = conv.otf().iter().map(|k| k.norm_sqr() + reg).collect();
    wiener_like_solve(conv.fft(), &num, &den)
}

/// Blends each border toward its periodically blurred version so that
/// wraparound discontinuities do not ring in the periodic solvers.
pub fn edge_taper(x: &Image, k: &BlurKernel) -> Result<Image> {
    let blurred = convolve(x, k)?;
    let (w, h) = x.dims();
    let r = k.side() as f64;
    let ramp = |t: usize, n: usize| -> f64 {
        let d = t.min(n - 1 - t) as f64;
        if d >= r {
            1.0
        } else {
            let s = d / r;
            s * s * (3.0 - 2.0 * s)
        }
    };
    Ok(Image::from_fn(w, h, |c, row| {
        let a = ramp(c, w) * ramp(row, h);
        a * x.get(c, row) + (1.0 - a) * blurred.get(c, row)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_kernel_is_identity() {
        let x = Image::from_fn(7, 5, |c, r| (c * 3 + r) as f64 / 30.0);
        let y = convolve(&x, &BlurKernel::delta(3).unwrap()).unwrap();
        for (a, b) in x.as_slice().iter().zip(y.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
        let y = convolve_adjoint(&x, &BlurKernel::delta(5).unwrap()).unwrap();
        for (a, b) in x.as_slice().iter().zip(y.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn constants_are_preserved() {
        let x = Image::constant(8, 8, 0.37);
        let y = convolve(&x, &BlurKernel::gaussian(5, 1.3).unwrap()).unwrap();
        assert!(y.as_slice().iter().all(|v| (v - 0.37).abs() < 1e-14));
    }

    #[test]
    fn kernel_larger_than_image_is_rejected() {
        let x = Image::zeros(4, 8);
        assert!(matches!(
            convolve(&x, &BlurKernel::delta(5).unwrap()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn periodic_gradients() {
        let x = Image::signal(vec![0.0, 1.0, 2.0]).unwrap();
        let (gx, gy) = gradients(&x);
        assert_eq!(gx.as_slice(), &[1.0, 1.0, -2.0]);
        assert_eq!(gy.as_slice(), &[0.0, 0.0, 0.0]);
        let (gx, gy) = gradients(&Image::constant(4, 3, 2.0));
        assert!(gx.as_slice().iter().chain(gy.as_slice()).all(|v| *v == 0.0));
    }

    #[test]
    fn gradient_spectra_match_spatial_differences() {
        let x = Image::from_fn(6, 5, |c, r| ((c * 7 + r * 3) % 5) as f64);
        let fft = Fft2::new(6, 5);
        let (dx, dy) = fft.gradient_spectra();
        let xs = fft.forward_real(x.as_slice());
        let (gx, gy) = gradients(&x);
        let via = |d: &[Complex64]| {
            let s: Vec<Complex64> = xs.iter().zip(d).map(|(a, b)| a * b).collect();
            fft.inverse_real(s).0
        };
        for (a, b) in via(&dx).iter().zip(gx.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in via(&dy).iter().zip(gy.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_denominator_is_plain_inverse() {
        let fft = Fft2::new(4, 4);
        let x: Vec<f64> = (0..16).map(|i| i as f64 * 0.1).collect();
        let spec = fft.forward_real(&x);
        let out = wiener_like_solve(&fft, &spec, &[1.0; 16]).unwrap();
        for (a, b) in out.as_slice().iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_denominator_is_singular() {
        let fft = Fft2::new(2, 2);
        let spec = vec![Complex64::new(1.0, 0.0); 4];
        assert!(matches!(
            wiener_like_solve(&fft, &spec, &[1.0, 0.0, 1.0, 1.0]),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn taper_leaves_interior_alone() {
        let x = Image::from_fn(32, 32, |c, r| if c < 16 { 0.2 } else { 0.9 } + 0.001 * r as f64);
        let k = BlurKernel::gaussian(5, 1.0).unwrap();
        let t = edge_taper(&x, &k).unwrap();
        assert_eq!(t.get(10, 12), x.get(10, 12));
        assert!((t.get(0, 0) - x.get(0, 0)).abs() > 0.0);
    }
}
