//! Weighted lattice graphs over pixels and their Laplacians.
//!
//! Every graph here is a regular stencil: each pixel links to a fixed set of
//! forward offsets, so edges are stored as one weight grid per offset instead
//! of adjacency lists. Pixels on the border simply have fewer edges; there is
//! no wraparound.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::linalg::LinearOperator;

/// Largest node count accepted by the dense Laplacian path by default.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Parameters of the Gaussian edge kernel and the l1 stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightParams {
    pub sigma: f64,
    pub epsilon: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self {
            sigma: 0.1,
            epsilon: 0.01,
        }
    }
}

impl WeightParams {
    pub fn new(sigma: f64, epsilon: f64) -> Result<Self> {
        let p = Self { sigma, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// What the stored weights mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    /// Gaussian similarity weights in `[0, 1]`.
    GaussianW,
    /// l1-Laplacian weights `w / max(d, eps)` in `[0, 1/eps]`.
    L1Gamma,
    /// All weights equal to one.
    Unweighted,
}

/// Which pixels are connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    /// Left/right/up/down neighbors on a 2-D grid.
    Four,
    /// 1-D signals: the two nearest samples on each side (four neighbors total).
    PathTwoHop,
}

impl Neighborhood {
    fn offsets(self) -> &'static [(usize, usize)] {
        match self {
            Neighborhood::Four => &[(1, 0), (0, 1)],
            Neighborhood::PathTwoHop => &[(1, 0), (2, 0)],
        }
    }
}

/// Gaussian edge weight `exp(-d^2 / sigma^2)`.
pub fn edge_weight(d: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be > 0, got {sigma}")));
    }
    Ok(gaussian(d, sigma))
}

#[inline]
pub(crate) fn gaussian(d: f64, sigma: f64) -> f64 {
    (-(d * d) / (sigma * sigma)).exp()
}

/// l1-Laplacian weight `w / max(|x_j - x_i|, eps)`.
#[inline]
pub fn gamma_weight(xi: f64, xj: f64, w: f64, epsilon: f64) -> f64 {
    w / (xj - xi).abs().max(epsilon)
}

#[derive(Debug, Clone, PartialEq)]
struct EdgeLayer {
    dx: usize,
    dy: usize,
    /// Indexed by the edge's first endpoint; zero where the edge does not exist.
    weights: Vec<f64>,
}

/// A weighted stencil graph on a `width x height` pixel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGraph {
    width: usize,
    height: usize,
    kind: GraphKind,
    neighborhood: Neighborhood,
    layers: Vec<EdgeLayer>,
}

impl LatticeGraph {
    fn build(
        width: usize,
        height: usize,
        kind: GraphKind,
        neighborhood: Neighborhood,
        mut weight: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput("graph must have at least one node".into()));
        }
        if neighborhood == Neighborhood::PathTwoHop && height != 1 {
            return Err(Error::InvalidInput(
                "two-hop path neighborhood requires a 1-D signal".into(),
            ));
        }
        let layers = neighborhood
            .offsets()
            .iter()
            .map(|&(dx, dy)| {
                let mut weights = vec![0.0; width * height];
                for y in 0..height.saturating_sub(dy) {
                    for x in 0..width.saturating_sub(dx) {
                        let i = y * width + x;
                        let j = (y + dy) * width + x + dx;
                        weights[i] = weight(i, j);
                    }
                }
                EdgeLayer { dx, dy, weights }
            })
            .collect();
        Ok(Self {
            width,
            height,
            kind,
            neighborhood,
            layers,
        })
    }

    /// Graph with all weights equal to one.
    pub fn unweighted(width: usize, height: usize, neighborhood: Neighborhood) -> Result<Self> {
        Self::build(width, height, GraphKind::Unweighted, neighborhood, |_, _| 1.0)
    }

    /// Gaussian similarity graph on the chosen neighborhood.
    pub fn weight_graph(img: &Image, params: WeightParams, neighborhood: Neighborhood) -> Result<Self> {
        params.validate()?;
        let x = img.as_slice();
        Self::build(img.width(), img.height(), GraphKind::GaussianW, neighborhood, |i, j| {
            gaussian(x[i] - x[j], params.sigma)
        })
    }

    /// l1-Laplacian graph on the chosen neighborhood.
    pub fn gamma_graph(img: &Image, params: WeightParams, neighborhood: Neighborhood) -> Result<Self> {
        params.validate()?;
        let x = img.as_slice();
        Self::build(img.width(), img.height(), GraphKind::L1Gamma, neighborhood, |i, j| {
            let w = gaussian(x[i] - x[j], params.sigma);
            gamma_weight(x[i], x[j], w, params.epsilon)
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn node_count(&self) -> usize {
        self.width * self.height
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn neighborhood(&self) -> Neighborhood {
        self.neighborhood
    }

    /// Weights of edges `(x, y) - (x + 1, y)`, grid of `(width - 1) x height`.
    pub fn horizontal_weights(&self) -> Vec<f64> {
        self.layer_grid(1, 0)
    }

    /// Weights of edges `(x, y) - (x, y + 1)`, grid of `width x (height - 1)`.
    /// Empty for 1-D neighborhoods.
    pub fn vertical_weights(&self) -> Vec<f64> {
        self.layer_grid(0, 1)
    }

    fn layer_grid(&self, dx: usize, dy: usize) -> Vec<f64> {
        let Some(layer) = self.layers.iter().find(|l| l.dx == dx && l.dy == dy) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for y in 0..self.height.saturating_sub(dy) {
            for x in 0..self.width.saturating_sub(dx) {
                out.push(layer.weights[y * self.width + x]);
            }
        }
        out
    }

    /// Iterates `(i, j, w)` over every undirected edge once.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.layers.iter().flat_map(move |l| {
            let (w, h) = (self.width, self.height);
            (0..h.saturating_sub(l.dy)).flat_map(move |y| {
                (0..w.saturating_sub(l.dx)).map(move |x| {
                    let i = y * w + x;
                    (i, (y + l.dy) * w + x + l.dx, l.weights[i])
                })
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn max_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).fold(0.0, f64::max)
    }

    /// Number of incident edges per node (the unweighted degree).
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.node_count()];
        for (i, j, _) in self.edges() {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    /// Sum of incident weights per node.
    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.node_count()];
        for (i, j, w) in self.edges() {
            d[i] += w;
            d[j] += w;
        }
        d
    }

    fn check_signal(&self, x: &Image) -> Result<()> {
        if x.dims() != self.dims() {
            return Err(Error::dims(self.dims(), x.dims()));
        }
        Ok(())
    }

    /// `L x` evaluated edge-locally.
    pub fn laplacian_apply(&self, x: &Image) -> Result<Image> {
        self.check_signal(x)?;
        let mut out = vec![0.0; x.len()];
        self.apply_into(x.as_slice(), &mut out);
        Ok(Image::from_vec_unchecked(self.width, self.height, out))
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let w = self.width;
        for l in &self.layers {
            let off = l.dy * w + l.dx;
            for y in 0..self.height.saturating_sub(l.dy) {
                let row = y * w;
                for xi in 0..w.saturating_sub(l.dx) {
                    let i = row + xi;
                    let j = i + off;
                    let f = l.weights[i] * (x[i] - x[j]);
                    out[i] += f;
                    out[j] -= f;
                }
            }
        }
    }

    /// `x^T L x`, i.e. the sum over undirected edges of `w (x_i - x_j)^2`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.edges().map(|(i, j, w)| w * (x[i] - x[j]).powi(2)).sum()
    }

    /// Dense Laplacian, refused above [`DEFAULT_DENSE_CAP`] nodes.
    pub fn laplacian_dense(&self) -> Result<DMatrix<f64>> {
        self.laplacian_dense_capped(DEFAULT_DENSE_CAP)
    }

    pub fn laplacian_dense_capped(&self, cap: usize) -> Result<DMatrix<f64>> {
        let n = self.node_count();
        if n > cap {
            return Err(Error::TooLarge { size: n, cap });
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, j, w) in self.edges() {
            m[(i, j)] -= w;
            m[(j, i)] -= w;
            m[(i, i)] += w;
            m[(j, j)] += w;
        }
        Ok(m)
    }
}

impl LinearOperator for LatticeGraph {
    fn dim(&self) -> usize {
        self.node_count()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.apply_into(x, out)
    }
}

/// Gaussian-weight graph on the 4-neighbor lattice of `img`.
pub fn build_weight_graph(img: &Image, params: WeightParams) -> Result<LatticeGraph> {
    LatticeGraph::weight_graph(img, params, Neighborhood::Four)
}

/// l1-Laplacian graph on the 4-neighbor lattice of `img`.
pub fn build_gamma_graph(img: &Image, params: WeightParams) -> Result<LatticeGraph> {
    LatticeGraph::gamma_graph(img, params, Neighborhood::Four)
}

/// Unit-weight 4-neighbor lattice.
pub fn build_unweighted_graph(width: usize, height: usize) -> Result<LatticeGraph> {
    LatticeGraph::unweighted(width, height, Neighborhood::Four)
}

pub fn laplacian_apply(g: &LatticeGraph, x: &Image) -> Result<Image> {
    g.laplacian_apply(x)
}

pub fn laplacian_dense(g: &LatticeGraph) -> Result<DMatrix<f64>> {
    g.laplacian_dense()
}
