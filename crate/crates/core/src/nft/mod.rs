//! Nonlinear Fourier transform: forward scattering, GLM-based inverse,
//! nonlinear inverse synthesis and link precompensation.

mod fnft;
mod glm;
mod nis;
mod spectrum;

pub use fnft::{fnft_continuous, fnft_with, scattering_at, FnftScheme};
pub use glm::{bnft_glm, bnft_windowed, GlmKernel, GlmSolver};
pub use nis::{linear_image, nis_decode, nis_encode};
pub use spectrum::{precompensate, propagate_spectrum, ContinuousSpectrum, LambdaGrid, NftGrid, SINGULAR_A};
