//! FFT plumbing shared by the NFT engine and the fiber channel.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Unnormalized forward DFT, `X_k = sum_n x_n exp(-j 2 pi k n / N)`.
pub fn fft(buf: &mut [C64]) {
    if !buf.is_empty() {
        forward_plan(buf.len()).process(buf);
    }
}

/// Normalized inverse DFT, so that `ifft(fft(x)) == x` up to rounding.
pub fn ifft(buf: &mut [C64]) {
    if buf.is_empty() {
        return;
    }
    inverse_plan(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Signed DFT bin index: `k` for `k < N/2`, `k - N` otherwise.
#[inline]
pub fn signed_bin(k: usize, len: usize) -> i64 {
    if k < len.div_ceil(2) {
        k as i64
    } else {
        k as i64 - len as i64
    }
}

/// Angular frequency of DFT bin `k` for sample spacing `dt`.
#[inline]
pub fn angular_frequency(k: usize, len: usize, dt: f64) -> f64 {
    2.0 * PI * signed_bin(k, len) as f64 / (len as f64 * dt)
}

/// Band-limited interpolation by an integer factor (zero padding in frequency).
/// The Nyquist bin of an even-length input is split between the two sides.
pub fn upsample(samples: &[C64], factor: usize) -> Vec<C64> {
    let n = samples.len();
    if factor == 1 || n == 0 {
        return samples.to_vec();
    }
    let mut spec = samples.to_vec();
    fft(&mut spec);
    let m = n * factor;
    let mut out = vec![C64::new(0.0, 0.0); m];
    let half = n / 2;
    if n % 2 == 0 {
        out[..half].copy_from_slice(&spec[..half]);
        out[m - half + 1..].copy_from_slice(&spec[half + 1..]);
        out[half] = spec[half] * 0.5;
        out[m - half] = spec[half] * 0.5;
    } else {
        out[..=half].copy_from_slice(&spec[..=half]);
        out[m - half..].copy_from_slice(&spec[half + 1..]);
    }
    ifft(&mut out);
    for v in out.iter_mut() {
        *v *= factor as f64;
    }
    out
}

/// Keep every `factor`-th sample. Exact for signals band-limited below the new Nyquist rate.
pub fn decimate(samples: &[C64], factor: usize) -> Vec<C64> {
    samples.iter().step_by(factor.max(1)).copied().collect()
}

/// Band-limited values at `t_n + shift * dt` for a periodic sequence. The
/// Nyquist bin of an even-length input is treated symmetrically.
pub fn fractional_shift(samples: &[C64], shift: f64) -> Vec<C64> {
    let n = samples.len();
    if n == 0 || shift == 0.0 {
        return samples.to_vec();
    }
    let mut spec = samples.to_vec();
    fft(&mut spec);
    for (k, v) in spec.iter_mut().enumerate() {
        let phase = 2.0 * PI * signed_bin(k, n) as f64 * shift / n as f64;
        if n % 2 == 0 && k == n / 2 {
            *v *= phase.cos();
        } else {
            *v *= C64::from_polar(1.0, phase);
        }
    }
    ifft(&mut spec);
    spec
}

/// Relative L2 distance `||a - b|| / ||b||`.
pub fn relative_l2(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Largest sample magnitude.
pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
