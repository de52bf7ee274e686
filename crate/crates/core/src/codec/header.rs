use super::BitString;
use crate::error::{Error, Result};

pub const HEADER_VERSION: u8 = 0x01;
pub const HEADER_BITS: usize = 120;

/// Fixed 120-bit header stored (encrypted) in the border LSBs.
///
/// Layout, big-endian: version:8, roi_x:16, roi_y:16, roi_w:16, roi_h:16,
/// payload_len_bits:32, epr_len_bytes:16.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeaderPayload {
    pub version: u8,
    pub roi_x: u32,
    pub roi_y: u32,
    pub roi_w: u32,
    pub roi_h: u32,
    /// Length of the encrypted compressed watermark in the ROI LSBs.
    pub payload_len_bits: u32,
    pub epr_len_bytes: u32,
}

fn check16(field: &'static str, value: u32) -> Result<u64> {
    if value > u16::MAX as u32 {
        return Err(Error::FieldOverflow {
            field,
            value: value as u64,
            bits: 16,
        });
    }
    Ok(value as u64)
}

pub fn pack_header(h: &HeaderPayload) -> Result<BitString> {
    let fields = [
        check16("roi_x", h.roi_x)?,
        check16("roi_y", h.roi_y)?,
        check16("roi_w", h.roi_w)?,
        check16("roi_h", h.roi_h)?,
    ];
    let mut out = BitString::with_capacity(HEADER_BITS);
    out.push_bits(h.version as u64, 8);
    for f in fields {
        out.push_bits(f, 16);
    }
    out.push_bits(h.payload_len_bits as u64, 32);
    out.push_bits(check16("epr_len_bytes", h.epr_len_bytes)?, 16);
    debug_assert_eq!(out.len(), HEADER_BITS);
    Ok(out)
}

pub fn unpack_header(bits: &BitString) -> Result<HeaderPayload> {
    if bits.len() != HEADER_BITS {
        return Err(Error::HeaderLength(bits.len()));
    }
    let version = bits.read_uint(0, 8) as u8;
    if version != HEADER_VERSION {
        return Err(Error::BadVersion(version));
    }
    Ok(HeaderPayload {
        version,
        roi_x: bits.read_uint(8, 16) as u32,
        roi_y: bits.read_uint(24, 16) as u32,
        roi_w: bits.read_uint(40, 16) as u32,
        roi_h: bits.read_uint(56, 16) as u32,
        payload_len_bits: bits.read_uint(72, 32) as u32,
        epr_len_bytes: bits.read_uint(104, 16) as u32,
    })
}
