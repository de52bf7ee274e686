//! Bit-level run-length coding with 4-bit tokens: a 3-bit run length (1..=7)
//! followed by the repeated bit. Longer runs are split greedily into runs of
//! seven plus a remainder. The stream carries no terminator; the decoder is
//! told how many bits to produce.

use super::BitString;
use crate::error::{Error, Result};

pub const MAX_RUN: usize = 7;
const TOKEN_BITS: usize = 4;

pub fn rle_compress(data: &BitString) -> BitString {
    let bits = data.as_slice();
    let mut out = BitString::with_capacity(rle_encoded_len(data));
    let mut i = 0;
    while i < bits.len() {
        let symbol = bits[i];
        let run = bits[i..]
            .iter()
            .take(MAX_RUN)
            .take_while(|&&b| b == symbol)
            .count();
        out.push_bits(run as u64, 3);
        out.push(symbol);
        i += run;
    }
    out
}

/// Length in bits that [`rle_compress`] would produce, without encoding.
pub fn rle_encoded_len(data: &BitString) -> usize {
    let bits = data.as_slice();
    let mut tokens = 0;
    let mut i = 0;
    while i < bits.len() {
        let symbol = bits[i];
        let run = bits[i..].iter().take_while(|&&b| b == symbol).count();
        tokens += run.div_ceil(MAX_RUN);
        i += run;
    }
    tokens * TOKEN_BITS
}

/// Expands tokens until exactly `expected_len` bits are produced. Bits after
/// the last consumed token are ignored.
pub fn rle_decompress(data: &BitString, expected_len: usize) -> Result<BitString> {
    let mut out = BitString::with_capacity(expected_len);
    let mut pos = 0;
    while out.len() < expected_len {
        if pos + TOKEN_BITS > data.len() {
            return Err(Error::CorruptStream(
                "stream exhausted before expected length",
            ));
        }
        let run = data.read_uint(pos, 3) as usize;
        let symbol = data.get(pos + 3).unwrap_or_default();
        pos += TOKEN_BITS;
        if run == 0 {
            return Err(Error::CorruptStream("zero run length"));
        }
        if out.len() + run > expected_len {
            return Err(Error::CorruptStream("run overshoots expected length"));
        }
        for _ in 0..run {
            out.push(symbol);
        }
    }
    Ok(out)
}
