use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("image must be at least 16x16 with width*height pixels, got {width}x{height} with {len} pixels")]
    BadDimensions {
        width: usize,
        height: usize,
        len: usize,
    },

    #[error("ROI ({x},{y},{w},{h}) does not fit inside the {width}x{height} image interior (3-pixel border excluded)")]
    RoiOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error("ROI extent {w}x{h} is not a nonzero multiple of 4 in both directions")]
    RoiNotTileable { w: usize, h: usize },

    #[error("block index {index} out of range (count {count})")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("corrupt RLE stream: {0}")]
    CorruptStream(&'static str),

    #[error("encryption key must not be empty")]
    EmptyKey,

    #[error("header field `{field}` value {value} does not fit in {bits} bits")]
    FieldOverflow {
        field: &'static str,
        value: u64,
        bits: u32,
    },

    #[error("header must be exactly 120 bits, got {0}")]
    HeaderLength(usize),

    #[error("header version {0:#04x} is not 0x01 (wrong key or tampered border)")]
    BadVersion(u8),

    #[error("header describes an impossible payload: {0}")]
    InvalidHeader(String),

    #[error("invalid block-mapping key: {0}")]
    KeyInvalid(String),

    #[error("RONI holds {available} 3x3 blocks but the ROI needs {required}")]
    InsufficientRoni { available: usize, required: usize },

    #[error("patient record contains a non-ASCII byte {byte:#04x} at offset {offset}")]
    NonAsciiEpr { offset: usize, byte: u8 },

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    #[error("ROI hash mismatch; image is not authentic (use recover)")]
    NotAuthentic,

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("image {width}x{height} is smaller than the {min}x{min} window")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("region ({x},{y},{w},{h}) lies outside the {width}x{height} image")]
    OutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
