use crate::error::{Error, Result};
use crate::image::Image;

use super::DeblurConfig;

#[derive(Debug, Clone)]
pub struct PyramidLevel {
    pub image: Image,
    pub kernel_side: usize,
}

/// Image levels ordered coarsest first; the last level is the input itself.
#[derive(Debug, Clone)]
pub struct Pyramid {
    pub levels: Vec<PyramidLevel>,
}

impl Pyramid {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn finest(&self) -> &PyramidLevel {
        self.levels.last().expect("pyramid has at least one level")
    }

    pub fn sizes(&self) -> Vec<(usize, usize)> {
        self.levels.iter().map(|l| l.image.dims()).collect()
    }

    pub fn kernel_sides(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.kernel_side).collect()
    }
}

fn odd_side(h: usize, scale: f64) -> usize {
    let s = (h as f64 / scale).round() as usize;
    if s % 2 == 0 {
        s.saturating_sub(1)
    } else {
        s
    }
}

/// Downsamples `b` by powers of the pyramid factor until the scaled kernel
/// side would fall below 3 or no longer fit in the level.
pub fn build_pyramid(b: &Image, cfg: &DeblurConfig) -> Result<Pyramid> {
    cfg.validate()?;
    let h = cfg.kernel_side;
    if b.width() < h || b.height() < h {
        return Err(Error::InvalidInput(format!(
            "image {}x{} is smaller than the {h}x{h} kernel",
            b.width(),
            b.height()
        )));
    }
    let mut levels = vec![PyramidLevel {
        image: b.clone(),
        kernel_side: h,
    }];
    for l in 1.. {
        let scale = cfg.pyramid_factor.powi(l);
        let side = odd_side(h, scale);
        let w = (b.width() as f64 / scale).round() as usize;
        let ht = (b.height() as f64 / scale).round() as usize;
        if side < 3 || w < side || ht < side {
            break;
        }
        levels.insert(
            0,
            PyramidLevel {
                image: b.resize_bilinear(w, ht),
                kernel_side: side,
            },
        );
    }
    Ok(Pyramid { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_schedule() {
        let b = Image::from_fn(128, 128, |x, y| ((x + y) % 9) as f64 / 9.0);
        let p = build_pyramid(&b, &DeblurConfig::with_kernel_side(9)).unwrap();
        assert_eq!(p.sizes(), vec![(51, 51), (81, 81), (128, 128)]);
        assert_eq!(p.kernel_sides(), vec![3, 5, 9]);
        assert_eq!(p.finest().image, b);
    }

    #[test]
    fn small_kernel_gives_single_level() {
        let b = Image::constant(20, 20, 0.4);
        let p = build_pyramid(&b, &DeblurConfig::with_kernel_side(3)).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn constants_survive_every_level() {
        let b = Image::constant(64, 48, 0.7);
        let p = build_pyramid(&b, &DeblurConfig::with_kernel_side(15)).unwrap();
        assert!(p.len() > 2);
        for l in &p.levels {
            assert!(l.image.as_slice().iter().all(|v| (v - 0.7).abs() < 1e-14));
            assert!(l.kernel_side % 2 == 1 && l.kernel_side >= 3);
        }
    }

    #[test]
    fn too_small_is_rejected() {
        let b = Image::constant(5, 20, 0.1);
        assert!(matches!(
            build_pyramid(&b, &DeblurConfig::with_kernel_side(7)),
            Err(Error::InvalidInput(_))
        ));
    }
}
