use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::kernel::BlurKernel;
use crate::pipeline::DeblurConfig;

/// Largest error ratio still counted as a successful deblur.
pub const SUCCESS_THRESHOLD: f64 = 5.0;

/// `|x - x_est|^2 / |x - x_gt|^2`: restoration error under the estimated kernel
/// relative to the error under the true kernel.
pub fn error_ratio(x_true: &Image, x_est_kernel: &Image, x_gt_kernel: &Image) -> Result<f64> {
    x_true.same_dims(x_est_kernel)?;
    x_true.same_dims(x_gt_kernel)?;
    let den = sq_dist(x_true, x_gt_kernel);
    if den == 0.0 {
        return Err(Error::DegenerateInput(
            "restoration with the true kernel is exact; error ratio undefined".into(),
        ));
    }
    Ok(sq_dist(x_true, x_est_kernel) / den)
}

fn sq_dist(a: &Image, b: &Image) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Peak signal-to-noise ratio in dB for unit peak. Identical images give `+inf`.
pub fn psnr(x: &Image, y: &Image) -> Result<f64> {
    let mse = x.mse(y)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

/// Zero-mean normalized cross-correlation maximized over circular shifts of
/// up to `side / 4` taps. Kernels of different sides are compared after
/// bilinear resampling of the smaller one.
pub fn kernel_ncc(k1: &BlurKernel, k2: &BlurKernel) -> Result<f64> {
    let side = k1.side().max(k2.side());
    let grid = |k: &BlurKernel| {
        if k.side() == side {
            k.taps().to_vec()
        } else {
            k.resample(side)
        }
    };
    let a = centered(grid(k1))?;
    let b = centered(grid(k2))?;
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let reach = (side / 4) as isize;
    let s = side as isize;
    let mut best = f64::NEG_INFINITY;
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            let mut acc = 0.0;
            for y in 0..s {
                for x in 0..s {
                    let xs = (x + dx).rem_euclid(s);
                    let ys = (y + dy).rem_euclid(s);
                    acc += a[(y * s + x) as usize] * b[(ys * s + xs) as usize];
                }
            }
            best = best.max(acc / (na * nb));
        }
    }
    Ok(best.clamp(-1.0, 1.0))
}

fn centered(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|t| *t -= mean);
    let var = v.iter().map(|t| t * t).sum::<f64>();
    if var <= 1e-24 {
        return Err(Error::UndefinedSimilarity("kernel has zero variance".into()));
    }
    Ok(v)
}

/// Quantitative summary of one blind-deblurring run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub error_ratio: f64,
    /// PSNR of the estimated-kernel restoration; `null` in JSON when infinite.
    #[serde(serialize_with = "ser_db", deserialize_with = "de_db")]
    pub psnr_db: f64,
    pub kernel_ncc: f64,
    pub success: bool,
    pub wall_time_seconds: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<DeblurConfig>,
}

impl EvalReport {
    pub fn new(error_ratio: f64, psnr_db: f64, kernel_ncc: f64) -> Self {
        Self {
            error_ratio,
            psnr_db,
            kernel_ncc,
            success: error_ratio <= SUCCESS_THRESHOLD,
            wall_time_seconds: BTreeMap::new(),
            config: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn ser_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_db<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}
