use std::f64::consts::PI;

use crate::error::{NfdmError, Result};
use crate::framing::TimeGrid;
use crate::C64;

/// Uniform real spectral grid `min + i * step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaGrid {
    pub min: f64,
    pub step: f64,
    pub len: usize,
}

impl LambdaGrid {
    pub fn new(min: f64, step: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(NfdmError::InvalidInput(format!("lambda grid needs at least 2 points, got {len}")));
        }
        if !(step > 0.0) || !min.is_finite() {
            return Err(NfdmError::InvalidInput(format!("invalid lambda grid (min = {min}, step = {step})")));
        }
        Ok(Self { min, step, len })
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.at(i)).collect()
    }

    /// Default grid for a linear-domain signal grid: `len` points covering
    /// `[-pi/(2 dt), pi/(2 dt))`, the image of the sampling band under `omega = -2 lambda`.
    pub fn for_signal(s: &TimeGrid) -> Result<Self> {
        if s.len % 2 != 0 {
            return Err(NfdmError::GridMismatch(format!("signal grid length {} must be even", s.len)));
        }
        let step = PI / (s.len as f64 * s.dt);
        Self::new(-((s.len / 2) as f64) * step, step, s.len)
    }
}

/// The grids tying a linear-domain signal, its nonlinear spectrum, and the
/// NFT-domain waveform together.
///
/// `q` is the mirror image of `s` sampled at twice the step, so that the GLM
/// kernel at every quadrature node coincides with a sample of `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NftGrid {
    pub s: TimeGrid,
    pub q: TimeGrid,
    pub lambda: LambdaGrid,
}

impl NftGrid {
    pub fn for_signal(s: TimeGrid) -> Result<Self> {
        let lambda = LambdaGrid::for_signal(&s)?;
        let q = TimeGrid::new(-(s.t0 + (s.len - 1) as f64 * s.dt), 2.0 * s.dt, s.len / 2)?;
        Ok(Self { s, q, lambda })
    }

    /// Largest `|lambda|` whose linear image `omega = -2 lambda` is resolved by
    /// the NFT-domain sampling. Beyond it a sampled `q` only produces images.
    pub fn lambda_nyquist(&self) -> f64 {
        PI / (2.0 * self.q.dt)
    }
}

/// Continuous part of the nonlinear spectrum on a uniform real grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSpectrum {
    lambda: LambdaGrid,
    rho: Vec<C64>,
    a: Option<Vec<C64>>,
    b: Option<Vec<C64>>,
}

impl ContinuousSpectrum {
    pub fn from_rho(lambda: LambdaGrid, rho: Vec<C64>) -> Result<Self> {
        if rho.len() != lambda.len {
            return Err(NfdmError::GridMismatch(format!("{} values for {} lambdas", rho.len(), lambda.len)));
        }
        Ok(Self { lambda, rho, a: None, b: None })
    }

    /// Builds `rho = b / a`.
    pub fn from_scattering(lambda: LambdaGrid, a: Vec<C64>, b: Vec<C64>) -> Result<Self> {
        if a.len() != lambda.len || b.len() != lambda.len {
            return Err(NfdmError::GridMismatch("scattering data length differs from the lambda grid".into()));
        }
        let mut rho = Vec::with_capacity(a.len());
        for i in 0..a.len() {
            if a[i].norm() < SINGULAR_A {
                return Err(NfdmError::SingularSpectrum { lambda: lambda.at(i), abs_a: a[i].norm() });
            }
            rho.push(b[i] / a[i]);
        }
        Ok(Self { lambda, rho, a: Some(a), b: Some(b) })
    }

    pub fn lambda(&self) -> &LambdaGrid {
        &self.lambda
    }

    pub fn rho(&self) -> &[C64] {
        &self.rho
    }

    pub fn a(&self) -> Option<&[C64]> {
        self.a.as_deref()
    }

    pub fn b(&self) -> Option<&[C64]> {
        self.b.as_deref()
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// `max | |a|^2 + |b|^2 - 1 |`, if scattering data is present.
    pub fn unimodularity_defect(&self) -> Option<f64> {
        let (a, b) = (self.a.as_ref()?, self.b.as_ref()?);
        Some(a.iter().zip(b).map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs()).fold(0.0, f64::max))
    }

    /// `(1/pi) * integral ln(1 + |rho|^2) d lambda`, which equals the signal
    /// energy when there is no discrete spectrum.
    pub fn energy(&self) -> f64 {
        self.rho.iter().map(|r| r.norm_sqr().ln_1p()).sum::<f64>() * self.lambda.step / PI
    }

    pub(crate) fn map_rho(&self, f: impl Fn(f64, C64) -> C64) -> Vec<C64> {
        self.rho.iter().enumerate().map(|(i, &r)| f(self.lambda.at(i), r)).collect()
    }

    pub(crate) fn with_parts(lambda: LambdaGrid, rho: Vec<C64>, a: Option<Vec<C64>>, b: Option<Vec<C64>>) -> Self {
        Self { lambda, rho, a, b }
    }
}

/// Below this `|a(lambda)|` the reflection coefficient is treated as undefined.
pub const SINGULAR_A: f64 = 1e-12;

/// Evolution of the continuous spectrum over a normalized distance `z`:
/// `rho(lambda, z) = rho(lambda, 0) exp(4 j lambda^2 z)` for the channel
/// model `i q_z + q_tt + 2 |q|^2 q = 0` and the scattering convention of this
/// crate. Negative `z` runs the evolution backwards.
pub fn propagate_spectrum(spec: &ContinuousSpectrum, z: f64) -> ContinuousSpectrum {
    let phase = |lam: f64| C64::from_polar(1.0, 4.0 * lam * lam * z);
    let rho = spec.map_rho(|lam, r| r * phase(lam));
    let b = spec
        .b
        .as_ref()
        .map(|b| b.iter().enumerate().map(|(i, &v)| v * phase(spec.lambda.at(i))).collect());
    ContinuousSpectrum::with_parts(spec.lambda, rho, spec.a.clone(), b)
}

/// Undo the channel's spectral evolution over a normalized length `L`
/// ahead of time: `rho(lambda) exp(-4 j lambda^2 L)`.
pub fn precompensate(spec: &ContinuousSpectrum, length: f64) -> Result<ContinuousSpectrum> {
    if !(length >= 0.0) {
        return Err(NfdmError::InvalidInput(format!("normalized length must be >= 0, got {length}")));
    }
    Ok(propagate_spectrum(spec, -length))
}
