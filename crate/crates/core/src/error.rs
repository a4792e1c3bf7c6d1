use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed PLY header: {0}")]
    PlyHeader(String),

    #[error("malformed PLY body: {0}")]
    PlyBody(String),

    #[error("vertex {index} has a non-integral coordinate {value}")]
    NonIntegralCoordinate { index: usize, value: f64 },

    #[error("vertex {index} duplicates voxel {coord:?}")]
    DuplicateVoxel { index: usize, coord: [u32; 3] },

    #[error("coordinate {coord:?} of point {index} does not fit in depth {depth}")]
    CoordinateOutOfRange { index: usize, coord: [i64; 3], depth: u32 },

    #[error("expected {expected} attribute channels, got {got}")]
    ChannelCount { expected: usize, got: usize },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("block sizes {sizes:?} do not multiply to 2^{depth}")]
    BlockSizeProduct { sizes: Vec<u32>, depth: u32 },

    #[error("block size {0} is not a power of two greater than one")]
    InvalidBlockSize(u32),

    #[error("RAHT requires block size 2 at every level, got {0}")]
    NonBinaryBlockSize(u32),

    #[error("block contains repeated coordinate {0:?}")]
    RepeatedCoordinate([u32; 3]),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("bad bitstream magic")]
    BadMagic,

    #[error("unsupported bitstream version {0}")]
    UnsupportedVersion(u16),

    #[error("bitstream truncated")]
    Truncated,

    #[error("surplus data after end of stream")]
    SurplusData,

    #[error("corrupt bitstream: {0}")]
    Corrupt(String),

    #[error("bitstream header does not match: {0}")]
    HeaderMismatch(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
