//! Lightweight error-correction code encoders for single-flux-quantum (SFQ)
//! output links.
//!
//! - [`codes`]: Hamming(7,4), extended Hamming(8,4) and Reed-Muller RM(1,3),
//!   with detect-only and correcting decoders and exhaustive pattern analysis.
//! - [`synth`]: SFQ gate-level encoder synthesis (XOR sharing, DFF path
//!   balancing, splitter insertion, clock tree) and cell-library costing.
//! - [`sim`]: cycle-accurate simulation of synthesized netlists.
//! - [`ppv`]: process-parameter-variation fault injection and Monte Carlo.
//! - [`cli`]: the experiment commands behind the `sfq-ecc` binary.

pub mod bits;
pub mod cli;
pub mod codes;
pub mod error;
pub mod ppv;
pub mod sim;
pub mod synth;

pub use bits::BitVector;
pub use codes::{make_code, DecodeMode, DecodeOutcome, DecodeStatus, LinearCode};
pub use error::{Error, Result};
