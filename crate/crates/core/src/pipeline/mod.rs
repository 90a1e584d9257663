//! Coarse-to-fine blind deblurring, the Gaussian fast path and the non-blind
//! finishing step.

mod blind;
mod finish;
mod gaussian;
mod pyramid;

pub use blind::{blind_deblur, blind_deblur_traced, BlindResult, TraceStep};
pub use finish::{nonblind_finish, nonblind_finish_with};
pub use gaussian::{blind_deblur_gaussian, blind_deblur_gaussian_detailed, gaussian_response, learn_a, GaussianResult};
pub use pyramid::{build_pyramid, Pyramid, PyramidLevel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightParams;
use crate::skeleton::SkeletonOptions;

/// Every solver parameter of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeblurConfig {
    /// Side `h` of the estimated kernel at the finest scale.
    pub kernel_side: usize,
    pub sigma: f64,
    pub epsilon: f64,
    pub beta0: f64,
    pub mu: f64,
    /// `beta` is divided by this after every alternation.
    pub beta_decay: f64,
    /// Linear size ratio between adjacent pyramid levels.
    pub pyramid_factor: f64,
    /// Skeleton/kernel alternations per scale.
    pub alternations: usize,
    /// l2 kernel change that ends the alternations of a scale early.
    pub kernel_tol: f64,
    pub skeleton_outer_iters: usize,
    pub skeleton_tol: f64,
    pub cg_tol: f64,
    pub cg_max_iters: usize,
    pub check_conditioning: bool,
    pub kernel_floor: f64,
    pub gaussian_a0: f64,
    pub gaussian_iters: usize,
    pub gaussian_tol: f64,
    pub lanczos_order: usize,
    pub nonblind_beta: f64,
}

impl Default for DeblurConfig {
    fn default() -> Self {
        Self {
            kernel_side: 9,
            sigma: 0.1,
            epsilon: 0.01,
            beta0: 0.01,
            mu: 0.05,
            beta_decay: 1.1,
            pyramid_factor: 3f64.log2(),
            alternations: 5,
            kernel_tol: 1e-3,
            skeleton_outer_iters: 4,
            skeleton_tol: 1e-4,
            cg_tol: 1e-6,
            cg_max_iters: 200,
            check_conditioning: false,
            kernel_floor: crate::kernelest::DEFAULT_KERNEL_FLOOR,
            gaussian_a0: -0.07,
            gaussian_iters: 20,
            gaussian_tol: 1e-4,
            lanczos_order: 30,
            nonblind_beta: 0.002,
        }
    }
}

impl DeblurConfig {
    pub fn with_kernel_side(kernel_side: usize) -> Self {
        Self {
            kernel_side,
            ..Self::default()
        }
    }

    pub fn weight_params(&self) -> WeightParams {
        WeightParams {
            sigma: self.sigma,
            epsilon: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.kernel_side < 3 || self.kernel_side % 2 == 0 {
            return bad(format!("kernel side must be odd and >= 3, got {}", self.kernel_side));
        }
        self.weight_params().validate()?;
        if !(self.beta_decay > 1.0) {
            return bad(format!("beta decay must be > 1, got {}", self.beta_decay));
        }
        if !(self.pyramid_factor > 1.0) {
            return bad(format!("pyramid factor must be > 1, got {}", self.pyramid_factor));
        }
        for (name, v) in [
            ("beta0", self.beta0),
            ("mu", self.mu),
            ("kernel tolerance", self.kernel_tol),
            ("skeleton tolerance", self.skeleton_tol),
            ("cg tolerance", self.cg_tol),
            ("gaussian tolerance", self.gaussian_tol),
            ("non-blind beta", self.nonblind_beta),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.kernel_floor) {
            return bad(format!("kernel floor must be in [0, 1), got {}", self.kernel_floor));
        }
        if !self.gaussian_a0.is_finite() {
            return bad("gaussian a0 must be finite".into());
        }
        if self.alternations == 0
            || self.skeleton_outer_iters == 0
            || self.cg_max_iters == 0
            || self.gaussian_iters == 0
            || self.lanczos_order == 0
        {
            return bad("iteration counts must be positive".into());
        }
        Ok(())
    }

    /// Skeleton options for a given `beta`.
    pub fn skeleton_options(&self, beta: f64) -> SkeletonOptions {
        SkeletonOptions {
            params: self.weight_params(),
            beta,
            outer_iters: self.skeleton_outer_iters,
            tol: self.skeleton_tol,
            cg_tol: self.cg_tol,
            cg_max_iters: self.cg_max_iters,
            check_conditioning: self.check_conditioning,
        }
    }
}
