//! Attack injection with ground truth.
//!
//! Ground truth is taken at the level the verifier can see: a ROI block
//! counts as tampered iff its LSB-masked average changed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::{GrayImage, Rect, RegionMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TamperMode {
    /// Overwrite every pixel with `value`.
    Constant { value: u8 },
    /// Overwrite every pixel with a uniformly random byte.
    Random { seed: u64 },
    /// Flip the LSB of every pixel.
    LsbOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamperSpec {
    pub regions: Vec<Rect>,
    pub mode: TamperMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TamperOutcome {
    pub image: GrayImage,
    /// ROI blocks (0-based) whose masked average changed.
    pub ground_truth_blocks: Vec<usize>,
    /// ROI blocks (0-based) intersecting any tamper region.
    pub touched_blocks: Vec<usize>,
}

pub fn apply_tamper(image: &GrayImage, spec: &TamperSpec, roi: Rect) -> Result<TamperOutcome> {
    for r in &spec.regions {
        r.check_within(image.width(), image.height())?;
    }
    let map = RegionMap::new(image.width(), image.height(), roi)?;

    let mut out = image.clone();
    let mut rng = match spec.mode {
        TamperMode::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    for r in &spec.regions {
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                let v = match spec.mode {
                    TamperMode::Constant { value } => value,
                    TamperMode::Random { .. } => {
                        rng.as_mut().map(|g| g.gen::<u8>()).unwrap_or_default()
                    }
                    TamperMode::LsbOnly => out.get(x, y) ^ 1,
                };
                out.set(x, y, v);
            }
        }
    }

    let mut ground_truth_blocks = Vec::new();
    let mut touched = BTreeSet::new();
    for (i, b) in map.roi_blocks().iter().enumerate() {
        if b.average(image) != b.average(&out) {
            ground_truth_blocks.push(i);
        }
        if spec
            .regions
            .iter()
            .any(|r| r.w > 0 && r.h > 0 && r.intersects(&b.rect()))
        {
            touched.insert(i);
        }
    }

    Ok(TamperOutcome {
        image: out,
        ground_truth_blocks,
        touched_blocks: touched.into_iter().collect(),
    })
}

/// Up to `count` pairwise-disjoint `size`x`size` squares inside `within`,
/// placed by seeded rejection sampling.
pub fn random_regions(within: Rect, count: usize, size: usize, seed: u64) -> Vec<Rect> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Rect> = Vec::with_capacity(count);
    if size == 0 || size > within.w || size > within.h {
        return out;
    }
    for _ in 0..count * 64 {
        if out.len() == count {
            break;
        }
        let r = Rect::new(
            within.x + rng.gen_range(0..=within.w - size),
            within.y + rng.gen_range(0..=within.h - size),
            size,
            size,
        );
        if out.iter().all(|o| !o.intersects(&r)) {
            out.push(r);
        }
    }
    out
}
