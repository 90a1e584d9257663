//! Matrix-free linear operators shared by the solvers.

use nalgebra::DMatrix;

/// A real linear map on vectors of a fixed dimension.
///
/// Solvers in this crate assume the map is symmetric; they never check.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// Writes `A x` into `out`. Both slices have length `dim()`.
    fn apply(&self, x: &[f64], out: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply(x, &mut out);
        out
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.nrows();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut s = 0.0;
            for (j, xj) in x.iter().enumerate() {
                s += self[(i, j)] * xj;
            }
            *o = s;
        }
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply(x, out)
    }
}

/// Wraps a closure as an operator.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

/// `I + scale * A`.
pub struct ShiftedIdentity<A> {
    pub inner: A,
    pub scale: f64,
}

impl<A: LinearOperator> LinearOperator for ShiftedIdentity<A> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.inner.apply(x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi + self.scale * *o;
        }
    }
}

/// Materializes any operator as a dense matrix by applying it to unit vectors.
pub fn to_dense(op: &impl LinearOperator) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    m
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
