//! ROI hashing, watermark assembly and the keyed ROI-to-RONI block mapping.

use crate::codec::BitString;
use crate::error::{Error, Result};
use crate::image::{GrayImage, Rect};
use crate::md5::{Digest128, Md5};

pub const DIGEST_BITS: usize = 128;

/// MD5 of the ROI pixels, one byte per pixel, row-major. Includes the LSBs.
pub fn roi_hash(image: &GrayImage, roi: Rect) -> Result<Digest128> {
    roi.validate_roi(image.width(), image.height())?;
    let mut h = Md5::new();
    for y in roi.y..roi.y + roi.h {
        let row = y * image.width();
        h.update(&image.pixels()[row + roi.x..row + roi.x + roi.w]);
    }
    Ok(h.finalize())
}

/// Checks that every byte of the patient record is 7-bit ASCII.
pub fn check_ascii(epr: &[u8]) -> Result<()> {
    match epr.iter().position(|b| !b.is_ascii()) {
        Some(offset) => Err(Error::NonAsciiEpr {
            offset,
            byte: epr[offset],
        }),
        None => Ok(()),
    }
}

/// The triple `h1 || B || E` before compression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Watermark {
    /// Hash of the original ROI.
    pub h1: Digest128,
    /// Original ROI LSBs, row-major.
    pub roi_lsbs: BitString,
    /// Patient record, ASCII.
    pub epr: Vec<u8>,
}

impl Watermark {
    pub fn bit_len(roi_pixels: usize, epr_bytes: usize) -> usize {
        DIGEST_BITS + roi_pixels + 8 * epr_bytes
    }

    pub fn to_bits(&self) -> BitString {
        let mut out = BitString::with_capacity(Self::bit_len(self.roi_lsbs.len(), self.epr.len()));
        out.push_bytes(self.h1.as_bytes());
        out.extend_from(&self.roi_lsbs);
        out.push_bytes(&self.epr);
        out
    }

    /// Splits an assembled bitstring back into its three fields.
    pub fn from_bits(bits: &BitString, roi_pixels: usize, epr_bytes: usize) -> Result<Self> {
        let expected = Self::bit_len(roi_pixels, epr_bytes);
        if bits.len() != expected {
            return Err(Error::Format(format!(
                "watermark is {} bits, expected {expected}",
                bits.len()
            )));
        }
        let mut h1 = [0u8; 16];
        h1.copy_from_slice(&bits.slice(0..DIGEST_BITS).to_bytes());
        let lsb_end = DIGEST_BITS + roi_pixels;
        Ok(Self {
            h1: Digest128(h1),
            roi_lsbs: bits.slice(DIGEST_BITS..lsb_end),
            epr: bits.slice(lsb_end..expected).to_bytes(),
        })
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A validated mapping key: `k` prime, `1 < k < n_blocks`, coprime with
/// `n_blocks`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockMapKey {
    k: u64,
    n_blocks: usize,
}

impl BlockMapKey {
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    /// Maps a 1-based ROI block number to a 1-based RONI block number:
    /// `(k * b_roi) mod N_b + 1`.
    pub fn map(&self, b_roi: usize) -> Result<usize> {
        if b_roi == 0 || b_roi > self.n_blocks {
            return Err(Error::IndexOutOfRange {
                index: b_roi,
                count: self.n_blocks,
            });
        }
        let n = self.n_blocks as u64;
        Ok(((self.k % n) * (b_roi as u64) % n) as usize + 1)
    }
}

pub fn validate_key(k: u64, n_blocks: usize, roni_block_count: usize) -> Result<BlockMapKey> {
    let n = n_blocks as u64;
    if k <= 1 || k >= n {
        return Err(Error::KeyInvalid(format!(
            "k = {k} must lie strictly between 1 and the ROI block count {n_blocks}"
        )));
    }
    if !is_prime(k) {
        return Err(Error::KeyInvalid(format!("k = {k} is not prime")));
    }
    if gcd(k, n) != 1 {
        return Err(Error::KeyInvalid(format!(
            "k = {k} divides the ROI block count {n_blocks}; the mapping would not be a permutation"
        )));
    }
    if roni_block_count < n_blocks {
        return Err(Error::InsufficientRoni {
            available: roni_block_count,
            required: n_blocks,
        });
    }
    Ok(BlockMapKey { k, n_blocks })
}

/// See [`BlockMapKey::map`].
pub fn map_block(b_roi: usize, key: &BlockMapKey) -> Result<usize> {
    key.map(b_roi)
}
