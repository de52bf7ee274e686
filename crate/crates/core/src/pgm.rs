//! Binary PGM (P5, maxval 255) reader and writer.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Writes `P5\n<w> <h>\n255\n` followed by the raw pixels.
pub fn encode(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.pixels());
    out
}

pub fn decode(data: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;

    let magic = next_token(data, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::Format(format!(
            "expected binary PGM magic P5, found {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = parse_number(next_token(data, &mut pos)?, "width")?;
    let height = parse_number(next_token(data, &mut pos)?, "height")?;
    let maxval = parse_number(next_token(data, &mut pos)?, "maxval")?;
    if maxval != 255 {
        return Err(Error::Format(format!(
            "only maxval 255 is supported, got {maxval}"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Format("missing whitespace after maxval".into())),
    }

    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
    let raster = &data[pos..];
    if raster.len() < expected {
        return Err(Error::Format(format!(
            "raster has {} bytes, expected {expected}",
            raster.len()
        )));
    }
    GrayImage::new(width, height, raster[..expected].to_vec())
}

fn next_token<'a>(data: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while data.get(*pos).is_some_and(|b| b.is_ascii_whitespace()) {
            *pos += 1;
        }
        if data.get(*pos) == Some(&b'#') {
            while data.get(*pos).is_some_and(|&b| b != b'\n') {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while data
        .get(*pos)
        .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
    {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("truncated PGM header".into()));
    }
    Ok(&data[start..*pos])
}

fn parse_number(token: &[u8], what: &str) -> Result<usize> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::Format(format!(
                "bad PGM {what}: {:?}",
                String::from_utf8_lossy(token)
            ))
        })
}

pub fn read(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    decode(&data)
}

pub fn write(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(image)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
