//! Computational laboratory for penetrable obstacles that admit
//! non-scattering incident waves.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contrast;
pub mod error;
pub mod fft;
pub mod freeboundary;
pub mod geometry;
pub mod grid;
pub mod incident;
pub mod linalg;
pub mod qdomain;
pub mod scatter;
pub mod specialfun;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
