//! Seeded synthetic test images.
//!
//! Everything except [`Family::UniformNoise`] keeps the LSB plane in long
//! horizontal runs, like scanner output with large flat backgrounds, so the
//! run-length coded watermark fits in the ROI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::GrayImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Slow linear ramp plus a gentle vertical term.
    Gradient,
    /// Flat-shaded ellipses on a black background.
    Shapes,
    /// Random intensity tiles of 16 to 32 pixels.
    BlockNoise,
    /// Uniform noise restricted to even values (LSB plane all zero).
    EvenNoise,
    /// Shapes over a dim gradient with even-valued grain.
    Phantom,
    /// Uniform bytes; the LSB plane is incompressible.
    UniformNoise,
}

impl Family {
    /// The families that can carry a watermark.
    pub const EMBEDDABLE: [Family; 5] = [
        Family::Gradient,
        Family::Shapes,
        Family::BlockNoise,
        Family::EvenNoise,
        Family::Phantom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Gradient => "gradient",
            Family::Shapes => "shapes",
            Family::BlockNoise => "block-noise",
            Family::EvenNoise => "even-noise",
            Family::Phantom => "phantom",
            Family::UniformNoise => "uniform-noise",
        }
    }
}

struct Ellipse {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    value: u8,
}

impl Ellipse {
    fn random(rng: &mut ChaCha8Rng, width: usize, height: usize) -> Self {
        let (w, h) = (width as f64, height as f64);
        Self {
            cx: rng.gen_range(0.2..0.8) * w,
            cy: rng.gen_range(0.2..0.8) * h,
            rx: rng.gen_range(0.05..0.35) * w,
            ry: rng.gen_range(0.05..0.35) * h,
            value: rng.gen_range(40..=230),
        }
    }

    fn contains(&self, x: usize, y: usize) -> bool {
        let dx = (x as f64 - self.cx) / self.rx;
        let dy = (y as f64 - self.cy) / self.ry;
        dx * dx + dy * dy <= 1.0
    }
}

pub fn generate(family: Family, width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (family as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let img = match family {
        Family::Gradient => {
            let base: usize = rng.gen_range(0..60);
            let hstep: usize = rng.gen_range(16..=32);
            let vstep: usize = rng.gen_range(2..=6);
            GrayImage::from_fn(width, height, |x, y| {
                (base + x / hstep + y / vstep).min(255) as u8
            })
        }
        Family::Shapes => {
            let shapes: Vec<Ellipse> = (0..rng.gen_range(3..8))
                .map(|_| Ellipse::random(&mut rng, width, height))
                .collect();
            GrayImage::from_fn(width, height, |x, y| {
                shapes
                    .iter()
                    .rev()
                    .find(|e| e.contains(x, y))
                    .map_or(0, |e| e.value)
            })
        }
        Family::BlockNoise => {
            let tile: usize = rng.gen_range(16..=32);
            let tx = width.div_ceil(tile);
            let ty = height.div_ceil(tile);
            let values: Vec<u8> = (0..tx * ty).map(|_| rng.gen()).collect();
            GrayImage::from_fn(width, height, |x, y| values[(y / tile) * tx + x / tile])
        }
        Family::EvenNoise => {
            let pixels = (0..width * height)
                .map(|_| rng.gen::<u8>() & 0xFE)
                .collect();
            GrayImage::new(width, height, pixels)
        }
        Family::Phantom => {
            let shapes: Vec<Ellipse> = (0..rng.gen_range(2..6))
                .map(|_| Ellipse::random(&mut rng, width, height))
                .collect();
            let grain: Vec<u8> = (0..width * height)
                .map(|_| rng.gen_range(0..8u8) * 2)
                .collect();
            GrayImage::from_fn(width, height, |x, y| {
                let bg = (y * 24 / height) as u8 & 0xF0;
                let v = shapes
                    .iter()
                    .rev()
                    .find(|e| e.contains(x, y))
                    .map_or(bg, |e| e.value & 0xF0);
                v.saturating_add(grain[y * width + x])
            })
        }
        Family::UniformNoise => {
            let pixels = (0..width * height).map(|_| rng.gen()).collect();
            GrayImage::new(width, height, pixels)
        }
    };
    img.expect("synthetic image dimensions must be at least 16x16")
}

/// `count` images cycling through the embeddable families.
pub fn corpus(count: usize, width: usize, height: usize, seed: u64) -> Vec<(String, GrayImage)> {
    (0..count)
        .map(|i| {
            let fam = Family::EMBEDDABLE[i % Family::EMBEDDABLE.len()];
            let s = seed.wrapping_add(i as u64);
            (
                format!("{}-{i:03}", fam.name()),
                generate(fam, width, height, s),
            )
        })
        .collect()
}

/// Random printable ASCII text of `len` bytes.
pub fn random_epr(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(0x20..0x7F)).collect()
}
