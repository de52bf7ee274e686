//! Bit-level plumbing: bitstrings, run-length coding, the keyed XOR cipher
//! and the fixed 120-bit header carried in the border.

mod bits;
mod crypt;
mod header;
mod rle;

pub use bits::BitString;
pub use crypt::{keystream, xor_crypt};
pub use header::{pack_header, unpack_header, HeaderPayload, HEADER_BITS, HEADER_VERSION};
pub use rle::{rle_compress, rle_decompress, rle_encoded_len, MAX_RUN};
