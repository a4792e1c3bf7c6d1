//! Quantization, adaptive run-length Golomb-Rice coding and the container
//! format.

pub mod bitio;
pub mod bitstream;
pub mod quant;
pub mod rlgr;

pub use bitstream::{Bitstream, Header, MAGIC, VERSION};
pub use quant::QuantParams;
pub use rlgr::{rlgr_decode, rlgr_encode, RlgrState};
