use crate::image::{dot, norm};
use crate::linalg::LinearOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremeEigenvalues {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl ExtremeEigenvalues {
    pub fn condition_number(&self) -> f64 {
        if self.lambda_min > 0.0 {
            self.lambda_max / self.lambda_min
        } else {
            f64::INFINITY
        }
    }
}

fn start_vector(n: usize) -> Vec<f64> {
    // fixed, non-degenerate pattern: overlaps every eigenvector in practice
    (0..n)
        .map(|i| {
            let h = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40;
            1.0 + (h % 1000) as f64 / 1000.0
        })
        .collect()
}

/// Power iteration for the dominant eigenvalue of `shift I - A` (or of `A`
/// when `shift` is `None`). Stops once the eigen-residual falls below `tol`
/// relative to the larger of the estimate and the shift.
fn dominant(op: &impl LinearOperator, shift: Option<f64>, iters: usize, tol: f64) -> (f64, bool, usize) {
    let n = op.dim();
    let mut v = start_vector(n);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut av = vec![0.0; n];
    let apply = |v: &[f64], out: &mut [f64]| {
        op.apply(v, out);
        if let Some(s) = shift {
            for (o, x) in out.iter_mut().zip(v) {
                *o = s * x - *o;
            }
        }
    };
    let mut lambda = 0.0;
    for it in 1..=iters.max(1) {
        apply(&v, &mut av);
        lambda = dot(&v, &av);
        let res: f64 = av
            .iter()
            .zip(&v)
            .map(|(a, x)| (a - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt();
        let an = norm(&av);
        if an == 0.0 {
            return (0.0, true, it);
        }
        let scale = lambda.abs().max(shift.map_or(0.0, f64::abs)).max(f64::MIN_POSITIVE);
        if res <= tol * scale {
            return (lambda, true, it);
        }
        for (x, a) in v.iter_mut().zip(&av) {
            *x = a / an;
        }
    }
    (lambda, false, iters)
}

/// Largest and smallest eigenvalues of a symmetric PSD operator of size `n`.
///
/// The smallest comes from a second power iteration on `lambda_max I - A`.
pub fn power_method_extremes(op: &impl LinearOperator, n: usize, iters: usize, tol: f64) -> ExtremeEigenvalues {
    assert_eq!(op.dim(), n, "operator dimension mismatch");
    let (lambda_max, c1, i1) = dominant(op, None, iters, tol);
    let (rho, c2, i2) = dominant(op, Some(lambda_max), iters, tol);
    ExtremeEigenvalues {
        lambda_max,
        lambda_min: lambda_max - rho,
        converged: c1 && c2,
        iterations: i1 + i2,
    }
}
