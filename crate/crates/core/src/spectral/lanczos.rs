//! Symmetric Lanczos with full reorthogonalization, and the Krylov
//! approximation `f(A) b ≈ |b| V f(H) e_1`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::image::{dot, norm, Image};
use crate::linalg::{axpy, LinearOperator};

#[derive(Debug, Clone)]
pub struct LanczosBasis {
    /// Orthonormal Krylov vectors `v_1..v_Z`.
    pub basis: Vec<Vec<f64>>,
    /// Diagonal of the tridiagonal projection.
    pub alpha: Vec<f64>,
    /// Off-diagonal, `beta[i]` couples `v_{i+1}` and `v_{i+2}`; length `Z - 1`.
    pub beta: Vec<f64>,
    pub input_norm: f64,
}

impl LanczosBasis {
    /// Number of basis vectors actually built (smaller than requested on breakdown).
    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    pub fn tridiagonal(&self) -> DMatrix<f64> {
        let z = self.order();
        let mut h = DMatrix::zeros(z, z);
        for i in 0..z {
            h[(i, i)] = self.alpha[i];
            if i + 1 < z {
                h[(i, i + 1)] = self.beta[i];
                h[(i + 1, i)] = self.beta[i];
            }
        }
        h
    }

    /// `|b| V f(H) e_1`.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let z = self.order();
        let eig = SymmetricEigen::new(self.tridiagonal());
        // f(H) e_1 = Q f(Theta) Q^T e_1
        let mut coeffs = vec![0.0; z];
        for k in 0..z {
            let q = eig.eigenvectors.column(k);
            let c = f(eig.eigenvalues[k]) * q[0];
            for (i, ci) in coeffs.iter_mut().enumerate() {
                *ci += c * q[i];
            }
        }
        let n = self.basis[0].len();
        let mut out = vec![0.0; n];
        for (v, c) in self.basis.iter().zip(&coeffs) {
            axpy(self.input_norm * c, v, &mut out);
        }
        out
    }
}

/// Builds an order-`z` Krylov basis of `op` started from `b`.
///
/// Stops early when the next off-diagonal vanishes (an invariant subspace).
pub fn lanczos_basis(op: &impl LinearOperator, b: &[f64], z: usize) -> Result<LanczosBasis> {
    let n = op.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} entries"),
            actual: format!("{} entries", b.len()),
        });
    }
    if z == 0 || z > n {
        return Err(Error::InvalidParameter(format!("Lanczos order must be in 1..={n}, got {z}")));
    }
    let bnorm = norm(b);
    if bnorm == 0.0 || !bnorm.is_finite() {
        return Err(Error::InvalidInput("Lanczos start vector must be nonzero and finite".into()));
    }
    let mut basis: Vec<Vec<f64>> = vec![b.iter().map(|v| v / bnorm).collect()];
    let mut alpha = Vec::with_capacity(z);
    let mut beta: Vec<f64> = Vec::with_capacity(z);
    let mut w = vec![0.0; n];
    let mut scale = 0.0f64;
    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        scale = scale.max(a.abs());
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        if basis.len() == z {
            break;
        }
        let bn = norm(&w);
        if !bn.is_finite() {
            return Err(Error::SolverFailure {
                reason: "non-finite Lanczos vector".into(),
                iterations: basis.len(),
                residual: f64::NAN,
            });
        }
        if bn == 0.0 || bn <= 1e-12 * scale {
            break;
        }
        scale = scale.max(bn);
        beta.push(bn);
        basis.push(w.iter().map(|v| v / bn).collect());
    }
    Ok(LanczosBasis {
        basis,
        alpha,
        beta,
        input_norm: bnorm,
    })
}

/// Approximates `f(A) b` in an order-`z` Krylov subspace.
pub fn lanczos_filter(
    op: &impl LinearOperator,
    b: &[f64],
    f: impl Fn(f64) -> f64,
    z: usize,
) -> Result<Vec<f64>> {
    let basis = lanczos_basis(op, b, z)?;
    let out = basis.apply_function(f);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverFailure {
            reason: "spectral response produced non-finite values".into(),
            iterations: basis.order(),
            residual: f64::NAN,
        });
    }
    Ok(out)
}

/// [`lanczos_filter`] on an image-shaped signal.
pub fn lanczos_filter_image(
    op: &impl LinearOperator,
    b: &Image,
    f: impl Fn(f64) -> f64,
    z: usize,
) -> Result<Image> {
    let out = lanczos_filter(op, b.as_slice(), f, z)?;
    Image::new(b.width(), b.height(), out)
}
