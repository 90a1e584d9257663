use crate::error::{Error, Result};
use crate::image::Image;
use crate::kernel::BlurKernel;
use crate::kernelest::{estimate_kernel_with_floor, sanitize_kernel_with_floor};
use crate::skeleton::restore_skeleton;

use super::{build_pyramid, DeblurConfig};

/// One skeleton/kernel alternation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    /// Pyramid level, 0 = coarsest.
    pub scale: usize,
    /// Alternation index within the scale.
    pub step: usize,
    pub beta: f64,
    /// l2 distance between the kernel before and after this step.
    pub kernel_change: f64,
}

#[derive(Debug, Clone)]
pub struct BlindResult {
    pub kernel: BlurKernel,
    pub skeleton: Image,
    pub trace: Vec<TraceStep>,
}

/// Coarse-to-fine blind deblurring. Returns the finest-scale kernel and skeleton.
pub fn blind_deblur(b: &Image, cfg: &DeblurConfig) -> Result<(BlurKernel, Image)> {
    let r = blind_deblur_traced(b, cfg)?;
    Ok((r.kernel, r.skeleton))
}

pub fn blind_deblur_traced(b: &Image, cfg: &DeblurConfig) -> Result<BlindResult> {
    let pyramid = build_pyramid(b, cfg)?;
    let mut kernel = BlurKernel::delta(pyramid.levels[0].kernel_side)?;
    let mut skeleton = None;
    let mut trace = Vec::new();
    for (scale, level) in pyramid.levels.iter().enumerate() {
        let at = |e: Error| Error::AtScale {
            scale,
            source: Box::new(e),
        };
        if kernel.side() != level.kernel_side {
            let raw = kernel.resample(level.kernel_side);
            kernel = sanitize_kernel_with_floor(level.kernel_side, &raw, cfg.kernel_floor).map_err(at)?;
        }
        let mut beta = cfg.beta0;
        let mut x = None;
        for step in 0..cfg.alternations {
            let xs = restore_skeleton(&level.image, &kernel, &cfg.skeleton_options(beta)).map_err(at)?;
            let next = estimate_kernel_with_floor(&xs, &level.image, level.kernel_side, cfg.mu, cfg.kernel_floor)
                .map_err(at)?;
            let kernel_change = next.distance(&kernel)?;
            trace.push(TraceStep {
                scale,
                step,
                beta,
                kernel_change,
            });
            kernel = next;
            x = Some(xs);
            beta /= cfg.beta_decay;
            if kernel_change < cfg.kernel_tol {
                break;
            }
        }
        skeleton = x;
    }
    Ok(BlindResult {
        kernel,
        skeleton: skeleton.expect("at least one alternation ran"),
        trace,
    })
}
