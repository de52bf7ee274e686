//! XOR stream cipher keyed by text. Keystream block `i` is
//! `MD5(key_bytes || i as u32 big-endian)`; blocks are concatenated and each
//! digest byte contributes its bits MSB first.

use super::BitString;
use crate::error::{Error, Result};
use crate::md5::Md5;

pub fn keystream(key: &str, n: usize) -> Result<BitString> {
    if key.is_empty() {
        return Err(Error::EmptyKey);
    }
    let mut out = BitString::with_capacity(n);
    let mut counter: u32 = 0;
    while out.len() < n {
        let mut h = Md5::new();
        h.update(key.as_bytes());
        h.update(&counter.to_be_bytes());
        let digest = h.finalize();
        for &byte in digest.as_bytes() {
            for shift in (0..8).rev() {
                if out.len() == n {
                    return Ok(out);
                }
                out.push((byte >> shift) & 1 == 1);
            }
        }
        counter = counter.wrapping_add(1);
    }
    Ok(out)
}

/// `data XOR keystream(key, data.len())`. Self-inverse.
pub fn xor_crypt(data: &BitString, key: &str) -> Result<BitString> {
    let ks = keystream(key, data.len())?;
    Ok(data.iter().zip(ks.iter()).map(|(d, k)| d ^ k).collect())
}
