//! Short-time Fourier analysis, synchrosqueezing, the Blaschke time-frequency
//! representation and ridge extraction.

mod grid;
mod ridge;
mod stft;

pub use grid::TfrGrid;
pub use ridge::{error_ratio, extract_if, IfCurve, LOG_FLOOR, MASK_HALF_WIDTH};
pub use stft::{blaschke_tfr, reassignment_frequency, sst, sst_complex, stft, SstConfig, SstOutput, Threshold};
