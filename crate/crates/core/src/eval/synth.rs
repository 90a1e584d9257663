//! Seeded synthetic images and signals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::image::Image;

/// Piecewise-smooth test image: a gentle background ramp overlaid with
/// random rectangles and discs, each carrying its own slight gradient.
pub fn pws_image(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (wf, hf) = (width as f64, height as f64);
    struct Shape {
        disc: bool,
        cx: f64,
        cy: f64,
        rx: f64,
        ry: f64,
        level: f64,
        gx: f64,
        gy: f64,
    }
    let count = 6 + (width * height / 2048).min(10);
    let shapes: Vec<Shape> = (0..count)
        .map(|_| Shape {
            disc: rng.random_bool(0.4),
            cx: rng.random_range(0.0..wf),
            cy: rng.random_range(0.0..hf),
            rx: rng.random_range(0.08..0.3) * wf,
            ry: rng.random_range(0.08..0.3) * hf,
            level: rng.random_range(0.1..0.9),
            gx: rng.random_range(-0.1..0.1) / wf,
            gy: rng.random_range(-0.1..0.1) / hf,
        })
        .collect();
    let base = rng.random_range(0.3..0.6);
    Image::from_fn(width, height, |x, y| {
        let (xf, yf) = (x as f64 + 0.5, y as f64 + 0.5);
        let mut v = base + 0.1 * (xf / wf - 0.5) - 0.05 * (yf / hf - 0.5);
        for s in &shapes {
            let (dx, dy) = ((xf - s.cx) / s.rx, (yf - s.cy) / s.ry);
            let inside = if s.disc {
                dx * dx + dy * dy <= 1.0
            } else {
                dx.abs() <= 1.0 && dy.abs() <= 1.0
            };
            if inside {
                v = s.level + s.gx * (xf - s.cx) + s.gy * (yf - s.cy);
            }
        }
        v.clamp(0.0, 1.0)
    })
}

/// Adds i.i.d. Gaussian noise of standard deviation `sigma_n`.
pub fn add_gaussian_noise(img: &Image, sigma_n: f64, seed: u64) -> Result<Image> {
    if sigma_n == 0.0 {
        return Ok(img.clone());
    }
    let normal = Normal::new(0.0, sigma_n).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Image::new(
        img.width(),
        img.height(),
        img.as_slice().iter().map(|v| v + normal.sample(&mut rng)).collect(),
    )
}

/// Length-`len` step signal: `lo` on the first half, `hi` on the rest.
pub fn step_signal(len: usize, lo: f64, hi: f64) -> Result<Image> {
    Image::signal((0..len).map(|i| if i < len / 2 { lo } else { hi }).collect())
}

/// The canonical 50-sample step from 0.2 to 0.8.
pub fn default_step() -> Image {
    step_signal(50, 0.2, 0.8).expect("valid")
}

/// 1-D Gaussian blur of a row signal with replicated boundaries.
pub fn blur_signal(signal: &Image, sigma_b: f64) -> Result<Image> {
    if signal.height() != 1 {
        return Err(Error::InvalidInput("expected a 1-D signal".into()));
    }
    if !(sigma_b > 0.0) {
        return Err(Error::InvalidParameter(format!("blur sigma must be > 0, got {sigma_b}")));
    }
    let r = (3.0 * sigma_b).ceil() as isize;
    let taps: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma_b * sigma_b)).exp()).collect();
    let norm: f64 = taps.iter().sum();
    let n = signal.width() as isize;
    let v = signal.as_slice();
    Image::signal(
        (0..n)
            .map(|i| {
                (-r..=r)
                    .map(|o| taps[(o + r) as usize] * v[(i + o).clamp(0, n - 1) as usize])
                    .sum::<f64>()
                    / norm
            })
            .collect(),
    )
}

/// Step variants used in the spectral analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepVariant {
    Ideal,
    Noisy,
    Blurred,
    BlurredNoisy,
}

impl StepVariant {
    pub const ALL: [StepVariant; 4] = [
        StepVariant::Ideal,
        StepVariant::Noisy,
        StepVariant::Blurred,
        StepVariant::BlurredNoisy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StepVariant::Ideal => "ideal",
            StepVariant::Noisy => "noisy",
            StepVariant::Blurred => "blurred",
            StepVariant::BlurredNoisy => "blurred-noisy",
        }
    }

    /// Builds the variant from `base`. Unused knobs are ignored.
    pub fn apply(self, base: &Image, sigma_n: f64, sigma_b: f64, seed: u64) -> Result<Image> {
        match self {
            StepVariant::Ideal => Ok(base.clone()),
            StepVariant::Noisy => add_gaussian_noise(base, sigma_n, seed),
            StepVariant::Blurred => blur_signal(base, sigma_b),
            StepVariant::BlurredNoisy => add_gaussian_noise(&blur_signal(base, sigma_b)?, sigma_n, seed),
        }
    }
}

/// A `width x height` patch split vertically into two constant levels.
pub fn two_level_patch(width: usize, height: usize, lo: f64, hi: f64) -> Image {
    Image::from_fn(width, height, |x, _| if x < width / 2 { lo } else { hi })
}
