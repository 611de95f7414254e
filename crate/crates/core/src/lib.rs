//! Nonlinear frequency-division multiplexing over optical fiber.
//!
//! Transmitter framing and nonlinear inverse synthesis, a split-step fiber
//! channel with distributed amplification noise, the forward-NFT receiver
//! and a decision-feedback receiver built on a windowed GLM inverse NFT.

mod error;

pub mod channel;
pub mod dsp;
pub mod framing;
pub mod harness;
pub mod link;
pub mod metrics;
pub mod nft;
pub mod receivers;

pub use error::{NfdmError, Result};

pub type C64 = num_complex::Complex<f64>;
