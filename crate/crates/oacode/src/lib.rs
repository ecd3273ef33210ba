//! OAcode: a 2D barcode that hides in a background image.
//!
//! The code has no position detection pattern. Its data area is built from a
//! mirror-tiled spread-spectrum signal whose point symmetry doubles as the
//! synchronization signal: the decoder finds symmetry peaks, fits the lattice
//! they form, undoes the perspective, determines the code parameters
//! statistically, and despreads the message.
//!
//! Pipeline stages map to modules:
//!
//! 1. [`format`] - shared constants, mask PRNG, capacity/module tables.
//! 2. [`encoder`] - message to data unit, mirror-tiled prototype, blending.
//! 3. [`symmetry`] - prototype estimation, FFT auto-convolution symmetry map,
//!    adaptive peak extraction.
//! 4. [`synchronizer`] - Hough lines over the peaks, outermost quad, unit
//!    pitch estimation, 8-parameter perspective solve, warp.
//! 5. [`paramdet`] - unit lattice on the synchronized code, orientation and
//!    version determination by masked-correlation confidence.
//! 6. [`demodulator`] - unit accumulation, fast despread, and the
//!    subunit-reregistration enhanced path for lens distortion.
//! 7. [`channel`] - synthetic screen-camera capture simulator with ground
//!    truth for tests and benchmarks.
//! 8. [`pipeline`] - end-to-end decode with stage diagnostics and timings.

pub mod channel;
pub mod demodulator;
pub mod encoder;
pub mod error;
pub mod fft;
pub mod format;
pub mod matrix;
pub mod paramdet;
pub mod pipeline;
pub mod symmetry;
pub mod synchronizer;

pub use error::{Error, Result};
pub use format::{Capacity, CodeParams, Module, SizeSpec, DEFAULT_MASK_SEED};
pub use matrix::{BipolarMatrix, BitMatrix, GrayImage, RealMatrix};
