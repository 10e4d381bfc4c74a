//! Blaschke unwinding of sampled signals, carrier-frequency preprocessing and
//! synchrosqueezed time-frequency analysis.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod imt;
pub mod phase;
pub mod roots;
pub mod signal;
pub mod spectral;
pub mod synth;
pub mod tf;
pub mod unwind;
pub mod verify;

pub use blaschke::{weiss_factorize, winding_number, BlaschkeFactorization};
pub use error::{Error, Result};
pub use imt::ImtSpec;
pub use signal::{BoundarySignal, Spectrum};
pub use unwind::{unwind, UnwindConfig, UnwindingDecomposition};
