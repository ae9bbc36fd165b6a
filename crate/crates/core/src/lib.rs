//! Entropy of coded subshifts from their code-word counts.

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod codecheck;
pub mod error;
pub mod family;
pub mod genfun;
pub mod input;
pub mod language;
pub mod report;
pub mod scalar;
pub mod sft;
pub mod word;

pub use error::{Error, Result};

/// Double-precision interval, the type every report uses.
pub type Interval = genfun::BoundedValue<f64>;
/// Double-precision root enclosure.
pub type Root = genfun::RootEnclosure<f64>;
