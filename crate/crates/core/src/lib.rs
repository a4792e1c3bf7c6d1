//! Lossy coding of voxelized point cloud colors with an intra-predicted,
//! region-adaptive graph Fourier transform.
//!
//! The pipeline: a multi-resolution block transform ([`ragft`] or the Haar
//! baseline in [`raht`]) produces approximation and detail coefficients per
//! octree level; detail coefficients are predicted from decoded
//! approximations ([`predict`]), residuals are uniformly quantized and
//! coded with adaptive run-length Golomb-Rice ([`entropy`]). [`codec`]
//! runs the closed prediction loop, [`eval`] measures rate and distortion.

pub mod codec;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod graph;
pub mod pcgeom;
pub mod predict;
pub mod ragft;
pub mod raht;

pub use error::{Error, Result};
