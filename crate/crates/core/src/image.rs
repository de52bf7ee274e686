//! Grayscale raster, the three-region segmentation (border / ROI / RONI) and
//! the block tilings built on top of it.
//!
//! Every ordering produced here is deterministic and depends only on the image
//! dimensions and the ROI rectangle, so the embedder and the verifier always
//! agree on which pixel carries which bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the border frame, in pixels, on every side.
pub const BORDER_WIDTH: usize = 3;
/// Side of a square ROI block.
pub const ROI_BLOCK: usize = 4;
/// Side of a square RONI block.
pub const RONI_BLOCK: usize = 3;
/// Smallest accepted image side.
pub const MIN_SIDE: usize = 16;

/// 8-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE || pixels.len() != width * height {
            return Err(Error::BadDimensions {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }

    #[inline]
    pub fn lsb(&self, x: usize, y: usize) -> bool {
        self.get(x, y) & 1 == 1
    }

    #[inline]
    pub fn set_lsb(&mut self, x: usize, y: usize, bit: bool) {
        let p = &mut self.pixels[y * self.width + x];
        *p = (*p & 0xFE) | bit as u8;
    }

    /// Copies the pixels of `rect` out in row-major order.
    pub fn crop(&self, rect: &Rect) -> Result<Vec<u8>> {
        rect.check_within(self.width, self.height)?;
        let mut out = Vec::with_capacity(rect.w * rect.h);
        for y in rect.y..rect.y + rect.h {
            let row = y * self.width;
            out.extend_from_slice(&self.pixels[row + rect.x..row + rect.x + rect.w]);
        }
        Ok(out)
    }
}

/// Axis-aligned rectangle in pixel coordinates. Used for the ROI and for
/// tamper regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }

    pub fn check_within(&self, width: usize, height: usize) -> Result<()> {
        if self.x + self.w > width || self.y + self.h > height {
            return Err(Error::OutOfBounds {
                x: self.x,
                y: self.y,
                w: self.w,
                h: self.h,
                width,
                height,
            });
        }
        Ok(())
    }

    /// Checks the ROI placement rules: tiles exactly into 4x4 blocks and sits
    /// inside the non-border interior.
    pub fn validate_roi(&self, width: usize, height: usize) -> Result<()> {
        if self.w == 0
            || self.h == 0
            || !self.w.is_multiple_of(ROI_BLOCK)
            || !self.h.is_multiple_of(ROI_BLOCK)
        {
            return Err(Error::RoiNotTileable {
                w: self.w,
                h: self.h,
            });
        }
        let b = BORDER_WIDTH;
        if self.x < b
            || self.y < b
            || width < 2 * b
            || height < 2 * b
            || self.x + self.w > width - b
            || self.y + self.h > height - b
        {
            return Err(Error::RoiOutOfBounds {
                x: self.x,
                y: self.y,
                w: self.w,
                h: self.h,
                width,
                height,
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{},{}", self.x, self.y, self.w, self.h)
    }
}

impl std::str::FromStr for Rect {
    type Err = Error;

    /// Parses `X,Y,W,H`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("bad rectangle `{s}`: {e}")))?;
        match parts[..] {
            [x, y, w, h] => Ok(Rect::new(x, y, w, h)),
            _ => Err(Error::Format(format!("rectangle `{s}` must be X,Y,W,H"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Border,
    Roi,
    Roni,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Roi,
    Roni,
}

/// Square block identified by its top-left corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub x: usize,
    pub y: usize,
    pub size: usize,
}

impl Block {
    /// Pixel coordinates, row-major within the block.
    pub fn coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.y..self.y + self.size)
            .flat_map(move |y| (self.x..self.x + self.size).map(move |x| (x, y)))
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.size, self.size)
    }

    /// LSB-masked, floor-rounded mean of the block.
    pub fn average(&self, image: &GrayImage) -> u8 {
        let sum: u32 = self
            .coords()
            .map(|(x, y)| (image.get(x, y) & 0xFE) as u32)
            .sum();
        (sum / (self.size * self.size) as u32) as u8
    }
}

/// Floor of the mean of `pixel & 0xFE` over the given coordinates.
///
/// Panics if `block` is empty or a coordinate lies outside the image.
pub fn block_average(image: &GrayImage, block: &[(usize, usize)]) -> u8 {
    assert!(!block.is_empty(), "block_average of an empty block");
    let sum: u64 = block
        .iter()
        .map(|&(x, y)| (image.get(x, y) & 0xFE) as u64)
        .sum();
    (sum / block.len() as u64) as u8
}

#[inline]
pub fn is_border(width: usize, height: usize, x: usize, y: usize) -> bool {
    x.min(y).min(width - 1 - x).min(height - 1 - y) < BORDER_WIDTH
}

/// Border pixels in row-major order over the whole image. Depends on the
/// dimensions only, so the header can be located before the ROI is known.
pub fn border_scan(width: usize, height: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(border_count(width, height));
    for y in 0..height {
        for x in 0..width {
            if is_border(width, height, x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

pub fn border_count(width: usize, height: usize) -> usize {
    let b = 2 * BORDER_WIDTH;
    width * height - width.saturating_sub(b) * height.saturating_sub(b)
}

/// Per-pixel classification plus the deterministic block tilings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionMap {
    width: usize,
    height: usize,
    roi: Rect,
    labels: Vec<Label>,
    roi_blocks: Vec<Block>,
    roni_blocks: Vec<Block>,
    border_pixels: Vec<(usize, usize)>,
}

/// Segments `image` around `roi`.
pub fn segment(image: &GrayImage, roi: Rect) -> Result<RegionMap> {
    RegionMap::new(image.width(), image.height(), roi)
}

impl RegionMap {
    pub fn new(width: usize, height: usize, roi: Rect) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(Error::BadDimensions {
                width,
                height,
                len: width * height,
            });
        }
        roi.validate_roi(width, height)?;

        let mut labels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                labels.push(if is_border(width, height, x, y) {
                    Label::Border
                } else if roi.contains(x, y) {
                    Label::Roi
                } else {
                    Label::Roni
                });
            }
        }

        let mut roi_blocks = Vec::with_capacity(roi.area() / (ROI_BLOCK * ROI_BLOCK));
        for by in (roi.y..roi.y + roi.h).step_by(ROI_BLOCK) {
            for bx in (roi.x..roi.x + roi.w).step_by(ROI_BLOCK) {
                roi_blocks.push(Block {
                    x: bx,
                    y: by,
                    size: ROI_BLOCK,
                });
            }
        }

        // 3x3 tiles anchored at the interior corner; a tile counts only if it
        // holds no ROI pixel. Tiles never reach the border by construction.
        let b = BORDER_WIDTH;
        let mut roni_blocks = Vec::new();
        let mut ty = b;
        while ty + RONI_BLOCK <= height - b {
            let mut tx = b;
            while tx + RONI_BLOCK <= width - b {
                let tile = Rect::new(tx, ty, RONI_BLOCK, RONI_BLOCK);
                if !tile.intersects(&roi) {
                    roni_blocks.push(Block {
                        x: tx,
                        y: ty,
                        size: RONI_BLOCK,
                    });
                }
                tx += RONI_BLOCK;
            }
            ty += RONI_BLOCK;
        }

        Ok(Self {
            width,
            height,
            roi,
            labels,
            roi_blocks,
            roni_blocks,
            border_pixels: border_scan(width, height),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn roi(&self) -> Rect {
        self.roi
    }

    pub fn label(&self, x: usize, y: usize) -> Label {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn roi_blocks(&self) -> &[Block] {
        &self.roi_blocks
    }

    pub fn roni_blocks(&self) -> &[Block] {
        &self.roni_blocks
    }

    pub fn border_pixels(&self) -> &[(usize, usize)] {
        &self.border_pixels
    }

    /// ROI pixel coordinates in row-major order over the ROI rectangle.
    pub fn roi_scan(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let r = self.roi;
        (r.y..r.y + r.h).flat_map(move |y| (r.x..r.x + r.w).map(move |x| (x, y)))
    }

    pub fn block(&self, index: usize, kind: BlockKind) -> Result<Block> {
        let blocks = match kind {
            BlockKind::Roi => &self.roi_blocks,
            BlockKind::Roni => &self.roni_blocks,
        };
        blocks.get(index).copied().ok_or(Error::IndexOutOfRange {
            index,
            count: blocks.len(),
        })
    }

    /// Coordinates of block `index` (0-based), row-major within the block.
    pub fn block_pixels(&self, index: usize, kind: BlockKind) -> Result<Vec<(usize, usize)>> {
        Ok(self.block(index, kind)?.coords().collect())
    }
}
