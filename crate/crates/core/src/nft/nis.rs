//! Linear-domain signal <-> continuous spectrum: `rho(lambda) = S(-2 lambda)`
//! with `S(omega) = integral s(t) exp(-j omega t) dt`.

use crate::dsp;
use crate::error::{NfdmError, Result};
use crate::framing::{ComplexEnvelope, TimeGrid, Units};
use crate::nft::spectrum::{ContinuousSpectrum, LambdaGrid};
use crate::C64;

/// Ordinary Fourier transform of `s` placed on the continuous spectrum.
pub fn nis_encode(s: &ComplexEnvelope) -> Result<ContinuousSpectrum> {
    if s.units() != Units::Normalized {
        return Err(NfdmError::Usage("nis_encode expects a normalized envelope".into()));
    }
    let grid = s.grid();
    let lambda = LambdaGrid::for_signal(&grid)?;
    // rho_i = dt * exp(2j lambda_i t0) * sum_n s_n (-1)^n exp(+2 pi j i n / N)
    let mut buf: Vec<C64> = s
        .samples()
        .iter()
        .enumerate()
        .map(|(n, &v)| if n % 2 == 0 { v } else { -v })
        .collect();
    dsp::inverse_plan(buf.len()).process(&mut buf);
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= C64::from_polar(grid.dt, 2.0 * lambda.at(i) * grid.t0);
    }
    ContinuousSpectrum::from_rho(lambda, buf)
}

/// Inverse of [`nis_encode`] onto the linear-domain grid `s_grid`.
pub fn nis_decode(spec: &ContinuousSpectrum, s_grid: &TimeGrid) -> Result<ComplexEnvelope> {
    let expect = LambdaGrid::for_signal(s_grid)?;
    let got = spec.lambda();
    if got.len != expect.len
        || ((got.step - expect.step) / expect.step).abs() > 1e-12
        || (got.min - expect.min).abs() > 1e-9 * expect.step
    {
        return Err(NfdmError::GridMismatch(format!(
            "spectrum grid ({}, {}, {}) does not match the signal grid",
            got.min, got.step, got.len
        )));
    }
    let mut buf: Vec<C64> = spec
        .rho()
        .iter()
        .enumerate()
        .map(|(i, &r)| r * C64::from_polar(1.0 / s_grid.dt, -2.0 * expect.at(i) * s_grid.t0))
        .collect();
    dsp::fft(&mut buf);
    let n = buf.len() as f64;
    for (k, v) in buf.iter_mut().enumerate() {
        *v /= if k % 2 == 0 { n } else { -n };
    }
    ComplexEnvelope::on_grid(buf, *s_grid, Units::Normalized)
}

/// First-order NFT-domain image of a linear-domain signal, `q(t) = -conj(s(-t))`,
/// evaluated on `q_grid` by band-limited interpolation of `s`.
pub fn linear_image(s: &ComplexEnvelope, q_grid: &TimeGrid) -> Result<Vec<C64>> {
    let spec = nis_encode(s)?;
    // q(t) = -conj(s(-t)) = -conj( (1/2pi) int S(w) e^{-jwt} dw )
    //      = -conj( (1/pi) int rho(l) e^{2j l t} dl )
    let lam = spec.lambda();
    let out = (0..q_grid.len)
        .map(|n| {
            let t = q_grid.time(n);
            let acc: C64 = spec
                .rho()
                .iter()
                .enumerate()
                .map(|(i, &r)| r * C64::from_polar(1.0, 2.0 * lam.at(i) * t))
                .sum();
            -(acc * lam.step / std::f64::consts::PI).conj()
        })
        .collect();
    Ok(out)
}
