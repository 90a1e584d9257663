use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{build_gamma_graph, build_unweighted_graph, LatticeGraph};
use crate::image::{dot, Image};
use crate::kernel::BlurKernel;
use crate::kernelest::estimate_kernel_with_floor;
use crate::linalg::LinearOperator;
use crate::spectral::lanczos_filter_image;

use super::DeblurConfig;

/// Graph-frequency response `g / (g^2 + 2 beta lambda)` with `g = 1 + a lambda`.
pub fn gaussian_response(lambda: f64, a: f64, beta: f64) -> f64 {
    let g = 1.0 + a * lambda;
    g / (g * g + 2.0 * beta * lambda)
}

/// Least-squares `a` for `(I + a L) x ~ y` pooled over pairs, with `L` the
/// unweighted lattice Laplacian.
pub fn learn_a(pairs: &[(Image, Image)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("need at least one sharp/blurred pair".into()));
    }
    let sums = pairs
        .par_iter()
        .map(|(x, y)| -> Result<(f64, f64)> {
            x.same_dims(y)?;
            let g = build_unweighted_graph(x.width(), x.height())?;
            Ok(fit_terms(&g, x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    let (num, den) = sums.iter().fold((0.0, 0.0), |(n, d), (a, b)| (n + a, d + b));
    if den <= 0.0 {
        return Err(Error::DegenerateInput("every sharp image is constant".into()));
    }
    Ok(num / den)
}

/// `(<Lx, y - x>, |Lx|^2)`.
fn fit_terms(g: &LatticeGraph, x: &Image, y: &Image) -> (f64, f64) {
    let lx = g.apply_vec(x.as_slice());
    let r: Vec<f64> = y.as_slice().iter().zip(x.as_slice()).map(|(a, b)| a - b).collect();
    (dot(&lx, &r), dot(&lx, &lx))
}

#[derive(Debug)]
pub struct GaussianResult {
    /// Kernel estimation runs last and may fail on its own (for instance on a
    /// gradient-free skeleton); the skeleton is still reported.
    pub kernel: Result<BlurKernel>,
    pub skeleton: Image,
    /// Surrogate coefficient after the last refit.
    pub a: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Blind deblurring under a Gaussian-blur surrogate `K ~ I + a L`, without a
/// pyramid. Returns the kernel and skeleton.
pub fn blind_deblur_gaussian(b: &Image, cfg: &DeblurConfig) -> Result<(BlurKernel, Image)> {
    let r = blind_deblur_gaussian_detailed(b, cfg)?;
    Ok((r.kernel?, r.skeleton))
}

pub fn blind_deblur_gaussian_detailed(b: &Image, cfg: &DeblurConfig) -> Result<GaussianResult> {
    cfg.validate()?;
    let params = cfg.weight_params();
    let beta = cfg.beta0;
    let z = cfg.lanczos_order.min(b.len());
    let mut a = cfg.gaussian_a0;
    let mut x = b.clone();
    let mut g = build_unweighted_graph(b.width(), b.height())?;
    let mut converged = false;
    let mut iterations = 0;
    let constant = b.as_slice().iter().all(|v| *v == b.as_slice()[0]);
    if !constant {
        for _ in 0..cfg.gaussian_iters {
            let a_now = a;
            let next = lanczos_filter_image(&g, b, |l| gaussian_response(l, a_now, beta), z)?;
            let change = next.relative_change(&x);
            x = next;
            iterations += 1;
            g = build_gamma_graph(&x, params)?;
            let (num, den) = fit_terms(&g, &x, b);
            if den > 0.0 && (num / den).is_finite() {
                a = num / den;
            }
            if change < cfg.gaussian_tol {
                converged = true;
                break;
            }
        }
    } else {
        converged = true;
    }
    let kernel = estimate_kernel_with_floor(&x, b, cfg.kernel_side, cfg.mu, cfg.kernel_floor);
    Ok(GaussianResult {
        kernel,
        skeleton: x,
        a,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_preserves_dc() {
        for a in [-0.3, -0.07, 0.0, 0.2] {
            for beta in [0.001, 0.01, 1.0] {
                assert_eq!(gaussian_response(0.0, a, beta), 1.0);
            }
        }
    }

    #[test]
    fn identical_pairs_learn_zero() {
        let x = Image::from_fn(10, 8, |c, r| ((c * 3 + r) % 4) as f64 / 4.0);
        assert_eq!(learn_a(&[(x.clone(), x)]).unwrap(), 0.0);
    }

    #[test]
    fn planted_a_is_recovered() {
        let a0 = -0.07;
        let x = Image::from_fn(12, 9, |c, r| ((c * 5 + r * 7) % 11) as f64 / 11.0);
        let g = build_unweighted_graph(12, 9).unwrap();
        let lx = g.apply_vec(x.as_slice());
        let y = Image::new(12, 9, x.as_slice().iter().zip(&lx).map(|(v, l)| v + a0 * l).collect()).unwrap();
        assert!((learn_a(&[(x, y)]).unwrap() - a0).abs() < 1e-10);
    }

    #[test]
    fn constant_pairs_are_degenerate() {
        let x = Image::constant(5, 5, 0.2);
        assert!(matches!(learn_a(&[(x.clone(), x)]), Err(Error::DegenerateInput(_))));
        assert!(learn_a(&[]).is_err());
    }

    #[test]
    fn constant_observation_is_a_fixed_point() {
        let b = Image::constant(20, 20, 0.6);
        let r = blind_deblur_gaussian_detailed(&b, &DeblurConfig::with_kernel_side(5)).unwrap();
        assert_eq!(r.skeleton, b);
        assert_eq!(r.a, -0.07);
        assert!(matches!(r.kernel, Err(Error::DegenerateInput(_))));
    }
}
