use crate::error::{Error, Result};
use crate::graph::{edge_weight, WeightParams};
use crate::image::Image;

pub const DEFAULT_BINS: usize = 50;
/// Largest patch (in pixels) accepted for the fully connected pair count.
pub const HISTOGRAM_PATCH_CAP: usize = 32 * 32;

/// Distribution of `d = |x_i - x_j|` over all unordered pixel pairs, in
/// uniform bins over `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightHistogram {
    pub edges: Vec<f64>,
    pub fractions: Vec<f64>,
    /// Gaussian edge weight at each bin center.
    pub center_weights: Vec<f64>,
}

impl WeightHistogram {
    pub fn bins(&self) -> usize {
        self.fractions.len()
    }

    /// Mass of the bins lying entirely inside `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let tol = 1e-12;
        (0..self.bins())
            .filter(|&i| self.edges[i] >= lo - tol && self.edges[i + 1] <= hi + tol)
            .map(|i| self.fractions[i])
            .sum()
    }
}

pub fn weight_histogram(patch: &Image, params: WeightParams, bins: usize) -> Result<WeightHistogram> {
    params.validate()?;
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    let n = patch.len();
    if n > HISTOGRAM_PATCH_CAP {
        return Err(Error::TooLarge {
            size: n,
            cap: HISTOGRAM_PATCH_CAP,
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput("histogram needs at least two pixels".into()));
    }
    let v = patch.as_slice();
    let mut counts = vec![0u64; bins];
    for i in 0..n {
        for j in i + 1..n {
            let d = (v[i] - v[j]).abs();
            let b = ((d * bins as f64).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let center_weights = (0..bins)
        .map(|i| edge_weight(0.5 * (edges[i] + edges[i + 1]), params.sigma))
        .collect::<Result<_>>()?;
    Ok(WeightHistogram {
        fractions: counts.iter().map(|&c| c as f64 / total).collect(),
        edges,
        center_weights,
    })
}
