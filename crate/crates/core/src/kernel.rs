use crate::error::{Error, Result};

/// Tolerance on the unit-sum invariant.
pub const KERNEL_SUM_TOL: f64 = 1e-10;

/// A non-negative, unit-sum, odd-sided square blur kernel.
///
/// The origin is the center tap `(side / 2, side / 2)`. Taps are row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BlurKernel {
    side: usize,
    taps: Vec<f64>,
}

impl BlurKernel {
    pub fn new(side: usize, taps: Vec<f64>) -> Result<Self> {
        check_side(side)?;
        if taps.len() != side * side {
            return Err(Error::DimensionMismatch {
                expected: format!("{} taps", side * side),
                actual: format!("{} taps", taps.len()),
            });
        }
        if let Some(t) = taps.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::InvalidInput(format!("kernel tap {t} is negative or non-finite")));
        }
        let sum: f64 = taps.iter().sum();
        if (sum - 1.0).abs() > KERNEL_SUM_TOL {
            return Err(Error::InvalidInput(format!("kernel taps sum to {sum}, expected 1")));
        }
        Ok(Self { side, taps })
    }

    /// Builds a kernel from non-negative taps, dividing by their sum.
    pub fn normalized(side: usize, taps: Vec<f64>) -> Result<Self> {
        check_side(side)?;
        let sum: f64 = taps.iter().sum();
        if !(sum > 0.0) || taps.iter().any(|t| *t < 0.0 || !t.is_finite()) {
            return Err(Error::DegenerateKernel("taps must be non-negative with a positive sum".into()));
        }
        Self::new(side, taps.into_iter().map(|t| t / sum).collect())
    }

    /// The identity kernel.
    pub fn delta(side: usize) -> Result<Self> {
        check_side(side)?;
        let mut taps = vec![0.0; side * side];
        taps[side * side / 2] = 1.0;
        Ok(Self { side, taps })
    }

    /// Sampled isotropic Gaussian, normalized over the window.
    pub fn gaussian(side: usize, sigma: f64) -> Result<Self> {
        check_side(side)?;
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("gaussian sigma must be > 0, got {sigma}")));
        }
        let c = (side / 2) as f64;
        let mut taps = Vec::with_capacity(side * side);
        for y in 0..side {
            for x in 0..side {
                let r2 = (x as f64 - c).powi(2) + (y as f64 - c).powi(2);
                taps.push((-r2 / (2.0 * sigma * sigma)).exp());
            }
        }
        Self::normalized(side, taps)
    }

    /// Uniform box of `inner x inner` taps centered in a `side x side` window.
    pub fn boxed(side: usize, inner: usize) -> Result<Self> {
        check_side(side)?;
        check_side(inner)?;
        if inner > side {
            return Err(Error::InvalidParameter("box larger than kernel".into()));
        }
        let lo = (side - inner) / 2;
        let taps = (0..side * side)
            .map(|i| {
                let (x, y) = (i % side, i / side);
                if (lo..lo + inner).contains(&x) && (lo..lo + inner).contains(&y) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Self::normalized(side, taps)
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.side / 2
    }

    #[inline]
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    #[inline]
    pub fn tap(&self, x: usize, y: usize) -> f64 {
        self.taps[y * self.side + x]
    }

    pub fn center_tap(&self) -> f64 {
        self.taps[self.side * self.side / 2]
    }

    /// True when all mass sits on the center tap.
    pub fn is_delta(&self) -> bool {
        (self.center_tap() - 1.0).abs() <= KERNEL_SUM_TOL
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.taps.iter().map(|t| t * t).sum()
    }

    /// The 180-degree rotated kernel.
    pub fn flipped(&self) -> Self {
        let mut taps = self.taps.clone();
        taps.reverse();
        Self { side: self.side, taps }
    }

    /// Bilinear resampling of the tap grid to a new side. The result is not
    /// normalized; feed it through kernel sanitation.
    pub fn resample(&self, new_side: usize) -> Vec<f64> {
        resample_grid(&self.taps, self.side, new_side)
    }

    /// l2 distance between tap grids of equal side.
    pub fn distance(&self, other: &BlurKernel) -> Result<f64> {
        if self.side != other.side {
            return Err(Error::DimensionMismatch {
                expected: format!("side {}", self.side),
                actual: format!("side {}", other.side),
            });
        }
        Ok(self
            .taps
            .iter()
            .zip(&other.taps)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

fn check_side(side: usize) -> Result<()> {
    if side == 0 || side % 2 == 0 {
        return Err(Error::InvalidParameter(format!("kernel side must be odd and positive, got {side}")));
    }
    Ok(())
}

/// Center-aligned bilinear resampling of a square grid.
pub(crate) fn resample_grid(taps: &[f64], side: usize, new_side: usize) -> Vec<f64> {
    if side == new_side {
        return taps.to_vec();
    }
    let c_old = (side / 2) as f64;
    let c_new = (new_side / 2) as f64;
    // scale maps new-grid offsets from the center onto old-grid offsets
    let scale = if new_side > 1 { (side as f64) / (new_side as f64) } else { 1.0 };
    let sample = |fx: f64, fy: f64| -> f64 {
        if fx < 0.0 || fy < 0.0 || fx > (side - 1) as f64 || fy > (side - 1) as f64 {
            return 0.0;
        }
        let x0 = fx.floor() as usize;
        let y0 = fy.floor() as usize;
        let x1 = (x0 + 1).min(side - 1);
        let y1 = (y0 + 1).min(side - 1);
        let tx = fx - x0 as f64;
        let ty = fy - y0 as f64;
        let t = |x: usize, y: usize| taps[y * side + x];
        (t(x0, y0) * (1.0 - tx) + t(x1, y0) * tx) * (1.0 - ty) + (t(x0, y1) * (1.0 - tx) + t(x1, y1) * tx) * ty
    };
    let mut out = Vec::with_capacity(new_side * new_side);
    for y in 0..new_side {
        for x in 0..new_side {
            let fx = c_old + (x as f64 - c_new) * scale;
            let fy = c_old + (y as f64 - c_new) * scale;
            out.push(sample(fx, fy));
        }
    }
    out
}
