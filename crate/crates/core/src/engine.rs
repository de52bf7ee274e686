//! Embedding and extraction pipelines.
//!
//! Carrier layout inside a watermarked image:
//!
//! * ROI LSBs, row-major: the encrypted RLE-compressed watermark
//!   `h1 || B || E` as a prefix; ROI LSBs past the prefix keep their
//!   original values.
//! * RONI: for ROI block `i` (1-based) the masked block average, 8 bits MSB
//!   first, in the LSBs of the first 8 pixels of RONI block `map(i)`.
//! * Border: the encrypted 120-bit header in the LSBs of the first 120 border
//!   pixels.

use crate::authmark::{check_ascii, roi_hash, validate_key, BlockMapKey, Watermark};
use crate::codec::{
    pack_header, rle_compress, rle_decompress, unpack_header, xor_crypt, BitString, HeaderPayload,
    HEADER_BITS, HEADER_VERSION,
};
use crate::error::{Error, Result};
use crate::image::{border_scan, Block, GrayImage, Label, Rect, RegionMap};
use crate::md5::Digest128;
use crate::metrics::psnr;

/// Number of RONI pixels (row-major) that carry one block average.
const AVERAGE_BITS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbedStats {
    /// `|h1 || B || E|` in bits.
    pub w_bits: usize,
    /// Compressed (and encrypted) watermark length in bits.
    pub w_comp_bits: usize,
    /// `w_comp_bits / w_bits`.
    pub compression_ratio: f64,
    pub n_blocks: usize,
    pub roni_blocks_used: usize,
    pub roni_blocks_available: usize,
    pub psnr_vs_original: f64,
}

#[derive(Clone, Debug)]
pub struct EmbedResult {
    pub watermarked: GrayImage,
    pub header: HeaderPayload,
    pub stats: EmbedStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PayloadState {
    Ok,
    /// The ROI payload did not decompress; `B` and the EPR are lost.
    Corrupt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    /// `h1 == h2`.
    pub authentic: bool,
    /// `None` when the payload could not be decoded.
    pub epr: Option<Vec<u8>>,
    /// 0-based indices of ROI blocks whose average disagrees with the stored one.
    pub tampered_blocks: Vec<usize>,
    pub header: HeaderPayload,
    pub payload_state: PayloadState,
    /// Hash carried in the payload, if it decoded.
    pub h1: Option<Digest128>,
    /// Hash of the ROI after LSB restoration (or as received, if the payload
    /// is corrupt).
    pub h2: Digest128,
    /// Number of per-block average comparisons performed. Zero on the
    /// authentic fast path.
    pub block_comparisons: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredImage {
    pub image: GrayImage,
    /// `(0-based ROI block index, fill value)` for every replaced block.
    pub recovered_blocks: Vec<(usize, u8)>,
    /// Set when the ROI payload was corrupt: unflagged ROI pixels still carry
    /// watermark bits in their LSBs.
    pub caveat: bool,
}

fn write_bits<I>(image: &mut GrayImage, coords: I, bits: &BitString)
where
    I: IntoIterator<Item = (usize, usize)>,
{
    for ((x, y), bit) in coords.into_iter().zip(bits.iter()) {
        image.set_lsb(x, y, bit);
    }
}

fn read_bits<I>(image: &GrayImage, coords: I) -> BitString
where
    I: IntoIterator<Item = (usize, usize)>,
{
    coords.into_iter().map(|(x, y)| image.lsb(x, y)).collect()
}

fn stored_average(image: &GrayImage, roni: &Block) -> u8 {
    roni.coords()
        .take(AVERAGE_BITS)
        .fold(0u8, |acc, (x, y)| (acc << 1) | image.lsb(x, y) as u8)
}

fn roni_slot(map: &RegionMap, key: &BlockMapKey, roi_index: usize) -> Result<Block> {
    let target = key.map(roi_index + 1)?;
    Ok(map.roni_blocks()[target - 1])
}

pub fn embed(image: &GrayImage, roi: Rect, epr: &[u8], k1: &str, k: u64) -> Result<EmbedResult> {
    if k1.is_empty() {
        return Err(Error::EmptyKey);
    }
    check_ascii(epr)?;
    if epr.len() > u16::MAX as usize {
        return Err(Error::CapacityExceeded(format!(
            "patient record is {} bytes; at most {} can be described by the header",
            epr.len(),
            u16::MAX
        )));
    }

    let map = RegionMap::new(image.width(), image.height(), roi)?;
    let n_blocks = map.roi_blocks().len();
    let key = validate_key(k, n_blocks, map.roni_blocks().len())?;

    let h1 = roi_hash(image, roi)?;
    let averages: Vec<u8> = map.roi_blocks().iter().map(|b| b.average(image)).collect();
    let watermark = Watermark {
        h1,
        roi_lsbs: read_bits(image, map.roi_scan()),
        epr: epr.to_vec(),
    };
    let w = watermark.to_bits();
    let w_comp = rle_compress(&w);
    if w_comp.len() > roi.area() {
        return Err(Error::CapacityExceeded(format!(
            "compressed watermark is {} bits but the ROI holds {} LSBs (uncompressed {} bits)",
            w_comp.len(),
            roi.area(),
            w.len()
        )));
    }
    let payload = xor_crypt(&w_comp, k1)?;

    let header = HeaderPayload {
        version: HEADER_VERSION,
        roi_x: roi.x as u32,
        roi_y: roi.y as u32,
        roi_w: roi.w as u32,
        roi_h: roi.h as u32,
        payload_len_bits: payload.len() as u32,
        epr_len_bytes: epr.len() as u32,
    };
    let header_bits = xor_crypt(&pack_header(&header)?, k1)?;
    if map.border_pixels().len() < HEADER_BITS {
        return Err(Error::CapacityExceeded(format!(
            "border holds {} LSBs, header needs {HEADER_BITS}",
            map.border_pixels().len()
        )));
    }

    let mut out = image.clone();
    write_bits(&mut out, map.roi_scan(), &payload);
    for (i, avg) in averages.iter().enumerate() {
        let slot = roni_slot(&map, &key, i)?;
        let mut bits = BitString::with_capacity(AVERAGE_BITS);
        bits.push_bits(*avg as u64, AVERAGE_BITS as u32);
        write_bits(&mut out, slot.coords(), &bits);
    }
    write_bits(&mut out, map.border_pixels().iter().copied(), &header_bits);

    let stats = EmbedStats {
        w_bits: w.len(),
        w_comp_bits: payload.len(),
        compression_ratio: if w.is_empty() {
            0.0
        } else {
            payload.len() as f64 / w.len() as f64
        },
        n_blocks,
        roni_blocks_used: n_blocks,
        roni_blocks_available: map.roni_blocks().len(),
        psnr_vs_original: psnr(image, &out)?,
    };
    Ok(EmbedResult {
        watermarked: out,
        header,
        stats,
    })
}

/// Reads and decrypts the border header and checks it describes a payload
/// this image can hold.
pub fn extract_header(image: &GrayImage, k1: &str) -> Result<HeaderPayload> {
    let border = border_scan(image.width(), image.height());
    if border.len() < HEADER_BITS {
        return Err(Error::Format(format!(
            "border holds {} pixels, header needs {HEADER_BITS}",
            border.len()
        )));
    }
    let bits = read_bits(image, border.into_iter().take(HEADER_BITS));
    let header = unpack_header(&xor_crypt(&bits, k1)?)?;

    let roi = header_roi(&header);
    roi.validate_roi(image.width(), image.height())?;
    if header.payload_len_bits as usize > roi.area() {
        return Err(Error::InvalidHeader(format!(
            "payload of {} bits exceeds the {} ROI pixels",
            header.payload_len_bits,
            roi.area()
        )));
    }
    Ok(header)
}

pub fn header_roi(h: &HeaderPayload) -> Rect {
    Rect::new(
        h.roi_x as usize,
        h.roi_y as usize,
        h.roi_w as usize,
        h.roi_h as usize,
    )
}

/// Everything the extractor learns from an image, shared by verify, recover
/// and restore.
struct Extraction {
    map: RegionMap,
    key: BlockMapKey,
    watermark: Option<Watermark>,
    report: VerifyReport,
}

fn extract(image: &GrayImage, k1: &str, k: u64) -> Result<Extraction> {
    let header = extract_header(image, k1)?;
    let roi = header_roi(&header);
    let map = RegionMap::new(image.width(), image.height(), roi)?;
    let key = validate_key(k, map.roi_blocks().len(), map.roni_blocks().len())?;

    let payload = read_bits(image, map.roi_scan().take(header.payload_len_bits as usize));
    let expected = Watermark::bit_len(roi.area(), header.epr_len_bytes as usize);
    let decoded = rle_decompress(&xor_crypt(&payload, k1)?, expected);

    let (watermark, payload_state, h2) = match decoded {
        Ok(bits) => {
            let wm = Watermark::from_bits(&bits, roi.area(), header.epr_len_bytes as usize)?;
            let mut restored = image.clone();
            write_bits(&mut restored, map.roi_scan(), &wm.roi_lsbs);
            let h2 = roi_hash(&restored, roi)?;
            (Some(wm), PayloadState::Ok, h2)
        }
        Err(Error::CorruptStream(_)) => (None, PayloadState::Corrupt, roi_hash(image, roi)?),
        Err(e) => return Err(e),
    };

    let authentic = watermark.as_ref().is_some_and(|wm| wm.h1 == h2);
    let mut tampered_blocks = Vec::new();
    let mut block_comparisons = 0;
    if !authentic {
        for (i, block) in map.roi_blocks().iter().enumerate() {
            block_comparisons += 1;
            let slot = roni_slot(&map, &key, i)?;
            if block.average(image) != stored_average(image, &slot) {
                tampered_blocks.push(i);
            }
        }
    }

    let report = VerifyReport {
        authentic,
        epr: watermark.as_ref().map(|wm| wm.epr.clone()),
        tampered_blocks,
        header,
        payload_state,
        h1: watermark.as_ref().map(|wm| wm.h1),
        h2,
        block_comparisons,
    };
    Ok(Extraction {
        map,
        key,
        watermark,
        report,
    })
}

/// Checks ROI integrity and, on mismatch, localizes the tampered blocks.
pub fn verify(image: &GrayImage, k1: &str, k: u64) -> Result<VerifyReport> {
    Ok(extract(image, k1, k)?.report)
}

/// Verifies, then rebuilds the image: ROI LSBs restored from the payload,
/// flagged blocks filled with their stored average, RONI and border LSBs
/// cleared.
pub fn recover(image: &GrayImage, k1: &str, k: u64) -> Result<(RecoveredImage, VerifyReport)> {
    let ex = extract(image, k1, k)?;
    let mut out = image.clone();
    if let Some(wm) = &ex.watermark {
        write_bits(&mut out, ex.map.roi_scan(), &wm.roi_lsbs);
    }
    clear_carrier_lsbs(&mut out, &ex.map);

    let mut recovered_blocks = Vec::with_capacity(ex.report.tampered_blocks.len());
    for &i in &ex.report.tampered_blocks {
        let slot = roni_slot(&ex.map, &ex.key, i)?;
        let fill = stored_average(image, &slot);
        for (x, y) in ex.map.roi_blocks()[i].coords() {
            out.set(x, y, fill);
        }
        recovered_blocks.push((i, fill));
    }

    let recovered = RecoveredImage {
        image: out,
        recovered_blocks,
        caveat: ex.report.payload_state == PayloadState::Corrupt,
    };
    Ok((recovered, ex.report))
}

/// Reverses the embedding for an authentic image. The ROI comes back bit
/// exact; RONI and border LSBs are set to 0.
pub fn restore(image: &GrayImage, k1: &str, k: u64) -> Result<GrayImage> {
    let ex = extract(image, k1, k)?;
    let wm = match (&ex.watermark, ex.report.authentic) {
        (Some(wm), true) => wm,
        _ => return Err(Error::NotAuthentic),
    };
    let mut out = image.clone();
    write_bits(&mut out, ex.map.roi_scan(), &wm.roi_lsbs);
    clear_carrier_lsbs(&mut out, &ex.map);
    Ok(out)
}

fn clear_carrier_lsbs(image: &mut GrayImage, map: &RegionMap) {
    for y in 0..image.height() {
        for x in 0..image.width() {
            if map.label(x, y) != Label::Roi {
                image.set_lsb(x, y, false);
            }
        }
    }
}
