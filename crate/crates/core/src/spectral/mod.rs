//! Graph spectra on analysis-sized instances and spectral graph filters.

mod lanczos;
mod power;

pub use lanczos::{lanczos_basis, lanczos_filter, lanczos_filter_image, LanczosBasis};
pub use power::{power_method_extremes, ExtremeEigenvalues};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{GraphKind, LatticeGraph, Neighborhood, WeightParams, DEFAULT_DENSE_CAP};
use crate::image::Image;
use crate::linalg::ShiftedIdentity;
use crate::skeleton::cg_solve;

/// Node count up to which [`map_filter`] diagonalizes instead of iterating.
pub const SPECTRAL_FILTER_CAP: usize = 256;

/// Ascending eigenvalues and matching orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    /// `U diag(lambda) U^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let u = &self.eigenvectors;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eigenvalues.clone()));
        u * d * u.transpose()
    }

    /// `U diag(f(lambda)) U^T y`.
    pub fn filter(&self, y: &[f64], response: impl Fn(f64) -> f64) -> Vec<f64> {
        let u = &self.eigenvectors;
        let n = self.len();
        let mut out = vec![0.0; n];
        for k in 0..n {
            let col = u.column(k);
            let c: f64 = col.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() * response(self.eigenvalues[k]);
            for (o, v) in out.iter_mut().zip(col.iter()) {
                *o += c * v;
            }
        }
        out
    }
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
///
/// Each eigenvector is signed so its first non-negligible entry is positive.
pub fn eigendecompose(l: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = l.nrows();
    if l.ncols() != n {
        return Err(Error::dims((n, n), (l.ncols(), n)));
    }
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::TooLarge {
            size: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let scale = l.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let asym = (l - l.transpose()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if asym > 1e-12 * scale {
        return Err(Error::Asymmetric(asym));
    }
    let eig = SymmetricEigen::new(l.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(i);
        let sign = col
            .iter()
            .find(|v| v.abs() > 1e-10)
            .map(|v| v.signum())
            .unwrap_or(1.0);
        for r in 0..n {
            eigenvectors[(r, k)] = sign * col[r];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigendecomposition of a graph's dense Laplacian.
pub fn graph_spectrum(g: &LatticeGraph) -> Result<SpectralDecomposition> {
    eigendecompose(&g.laplacian_dense()?)
}

/// `lambda_k / lambda_2` for every k.
pub fn relative_eigenvalues(dec: &SpectralDecomposition) -> Result<Vec<f64>> {
    if dec.len() < 2 {
        return Err(Error::DegenerateSpectrum("need at least two eigenvalues".into()));
    }
    let top = dec.eigenvalues.last().copied().unwrap_or(0.0).abs().max(1.0);
    let l2 = dec.eigenvalues[1];
    if l2 <= 1e-12 * top {
        return Err(Error::DegenerateSpectrum(format!(
            "second eigenvalue {l2:e} is zero; graph is disconnected"
        )));
    }
    Ok(dec.eigenvalues.iter().map(|l| l / l2).collect())
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
    }
    Ok(())
}

/// Solves `(I + mu L) x = y` with conjugate gradients.
pub fn map_filter_cg(y: &Image, g: &LatticeGraph, mu: f64) -> Result<Image> {
    check_mu(mu)?;
    if y.dims() != g.dims() {
        return Err(Error::dims(g.dims(), y.dims()));
    }
    let op = ShiftedIdentity { inner: g, scale: mu };
    let out = cg_solve(&op, y.as_slice(), Some(y.as_slice()), 1e-12, 10 * y.len().max(100))?;
    if !out.converged {
        return Err(Error::SolverFailure {
            reason: "graph filter did not converge".into(),
            iterations: out.iterations,
            residual: out.relative_residual,
        });
    }
    Image::new(y.width(), y.height(), out.solution)
}

/// `U diag(1 / (1 + mu lambda)) U^T y` via a dense eigendecomposition.
pub fn map_filter_spectral(y: &Image, g: &LatticeGraph, mu: f64) -> Result<Image> {
    check_mu(mu)?;
    if y.dims() != g.dims() {
        return Err(Error::dims(g.dims(), y.dims()));
    }
    let dec = graph_spectrum(g)?;
    let out = dec.filter(y.as_slice(), |l| 1.0 / (1.0 + mu * l));
    Image::new(y.width(), y.height(), out)
}

/// MAP graph-spectral low-pass filter `(I + mu L)^{-1} y`.
pub fn map_filter(y: &Image, g: &LatticeGraph, mu: f64) -> Result<Image> {
    if y.len() <= SPECTRAL_FILTER_CAP {
        map_filter_spectral(y, g, mu)
    } else {
        map_filter_cg(y, g, mu)
    }
}

/// Result of iterating the reweighted filter.
#[derive(Debug, Clone)]
pub struct RgtvFilterRun {
    pub output: Image,
    /// `x^(0) = y` followed by every iterate.
    pub iterates: Vec<Image>,
    pub converged: bool,
}

impl RgtvFilterRun {
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }
}

/// Neighborhood used by default for a signal: two-hop paths for 1-D rows,
/// the 4-neighbor lattice otherwise.
pub fn default_neighborhood(y: &Image) -> Neighborhood {
    if y.height() == 1 && y.width() > 2 {
        Neighborhood::PathTwoHop
    } else {
        Neighborhood::Four
    }
}

/// Repeats `x <- (I + mu L_gamma(x))^{-1} y`, always filtering the original `y`.
pub fn iterative_rgtv_filter(
    y: &Image,
    params: WeightParams,
    mu: f64,
    max_iters: usize,
    tol: f64,
) -> Result<RgtvFilterRun> {
    iterative_rgtv_filter_on(y, params, mu, max_iters, tol, default_neighborhood(y))
}

pub fn iterative_rgtv_filter_on(
    y: &Image,
    params: WeightParams,
    mu: f64,
    max_iters: usize,
    tol: f64,
    neighborhood: Neighborhood,
) -> Result<RgtvFilterRun> {
    check_mu(mu)?;
    params.validate()?;
    let mut iterates = vec![y.clone()];
    let mut converged = false;
    for _ in 0..max_iters.max(1) {
        let current = iterates.last().expect("nonempty");
        let g = LatticeGraph::gamma_graph(current, params, neighborhood)?;
        let next = map_filter(y, &g, mu)?;
        let change = next.relative_change(current);
        iterates.push(next);
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(RgtvFilterRun {
        output: iterates.last().cloned().expect("nonempty"),
        iterates,
        converged,
    })
}

/// Gershgorin upper bound `max_i 2 d_i / eps` on the l1-Laplacian spectrum.
pub fn gershgorin_bound(g: &LatticeGraph, epsilon: f64) -> Result<f64> {
    if g.kind() != GraphKind::L1Gamma {
        return Err(Error::InvalidInput("Gershgorin bound applies to l1-Laplacian graphs".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
    }
    let dmax = g.degrees().into_iter().max().unwrap_or(0);
    Ok(2.0 * dmax as f64 / epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_gamma_graph, build_unweighted_graph};

    fn two_node(w: f64) -> LatticeGraph {
        // a difference d gives exp(-d^2/sigma^2) = w
        let d = 0.1 * (-w.ln()).sqrt();
        LatticeGraph::weight_graph(&Image::signal(vec![0.0, d]).unwrap(), WeightParams::default(), Neighborhood::Four)
            .unwrap()
    }

    #[test]
    fn two_node_spectrum() {
        let dec = graph_spectrum(&two_node(0.5)).unwrap();
        assert!(dec.eigenvalues[0].abs() < 1e-12);
        assert!((dec.eigenvalues[1] - 1.0).abs() < 1e-12);
        let u0 = dec.eigenvector(0);
        let u1 = dec.eigenvector(1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u0[0] - h).abs() < 1e-12 && (u0[1] - h).abs() < 1e-12);
        assert!((u1[0] - h).abs() < 1e-12 && (u1[1] + h).abs() < 1e-12);
    }

    #[test]
    fn path_spectrum_and_relative() {
        let dec = graph_spectrum(&build_unweighted_graph(3, 1).unwrap()).unwrap();
        for (a, b) in dec.eigenvalues.iter().zip([0.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let rel = relative_eigenvalues(&dec).unwrap();
        for (a, b) in rel.iter().zip([0.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_is_scale_free() {
        let img = Image::from_fn(4, 3, |x, y| ((x * 5 + y * 3) % 7) as f64 / 7.0);
        let l = build_gamma_graph(&img, WeightParams::new(0.5, 0.01).unwrap())
            .unwrap()
            .laplacian_dense()
            .unwrap();
        let a = relative_eigenvalues(&eigendecompose(&l).unwrap()).unwrap();
        let b = relative_eigenvalues(&eigendecompose(&(l * 3.7)).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn disconnected_graph_is_degenerate() {
        let g = LatticeGraph::weight_graph(
            &Image::signal(vec![0.0, 0.0, 5.0, 5.0]).unwrap(),
            WeightParams::default(),
            Neighborhood::Four,
        )
        .unwrap();
        let dec = graph_spectrum(&g).unwrap();
        assert!(matches!(relative_eigenvalues(&dec), Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(eigendecompose(&m), Err(Error::Asymmetric(_))));
    }

    #[test]
    fn map_filter_examples() {
        let g = two_node(0.25);
        let y = Image::signal(vec![1.0, -1.0]).unwrap();
        for (a, b) in map_filter(&y, &g, 0.0).unwrap().as_slice().iter().zip(y.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
        let out = map_filter(&y, &g, 1.0).unwrap();
        let s = 1.0 / (1.0 + 2.0 * 0.25);
        assert!((out.as_slice()[0] - s).abs() < 1e-12 && (out.as_slice()[1] + s).abs() < 1e-12);
        let c = Image::constant(5, 4, 0.3);
        let g = build_gamma_graph(&Image::from_fn(5, 4, |x, _| x as f64 * 0.1), WeightParams::default()).unwrap();
        for v in map_filter(&c, &g, 3.0).unwrap().as_slice() {
            assert!((v - 0.3).abs() < 1e-12);
        }
        assert!(map_filter(&c, &g, -1.0).is_err());
    }

    #[test]
    fn cg_and_spectral_filters_agree() {
        let img = Image::from_fn(9, 7, |x, y| ((x * 13 + y * 7) % 11) as f64 / 11.0);
        let g = build_gamma_graph(&img, WeightParams::default()).unwrap();
        let a = map_filter_cg(&img, &g, 0.5).unwrap();
        let b = map_filter_spectral(&img, &g, 0.5).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn rgtv_filter_fixed_points() {
        let p = WeightParams::new(0.3, 0.01).unwrap();
        let c = Image::constant(12, 1, 0.6);
        let run = iterative_rgtv_filter(&c, p, 2.0, 20, 1e-4).unwrap();
        assert!(run.output.as_slice().iter().all(|v| (v - 0.6).abs() < 1e-12));
        let y = Image::signal((0..12).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        let run = iterative_rgtv_filter(&y, p, 0.0, 20, 1e-4).unwrap();
        assert_eq!(run.iterations(), 1);
        for (a, b) in run.output.as_slice().iter().zip(y.as_slice()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn gershgorin_values() {
        let p = WeightParams::default();
        let g = build_gamma_graph(&Image::constant(3, 3, 0.1), p).unwrap();
        assert_eq!(gershgorin_bound(&g, 0.01).unwrap(), 800.0);
        let g = build_gamma_graph(&Image::signal(vec![0.0, 1.0]).unwrap(), p).unwrap();
        assert_eq!(gershgorin_bound(&g, 0.01).unwrap(), 200.0);
        assert!(gershgorin_bound(&build_unweighted_graph(3, 3).unwrap(), 0.01).is_err());
    }
}
