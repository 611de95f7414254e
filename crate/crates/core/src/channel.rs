//! Fiber channel: symmetric split-step integration of
//! `i q_z = (beta2/2) q_tt - gamma |q|^2 q` with ideal distributed
//! amplification, and the linear and nonlinear inverse channels.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dsp;
use crate::error::{NfdmError, Result};
use crate::framing::{ComplexEnvelope, SystemConfig, Units, PLANCK};
use crate::C64;

/// Fraction of the grid at each end that must stay empty.
const EDGE_FRACTION: f64 = 1.0 / 128.0;
/// Largest tolerated share of the energy inside the edge regions.
const EDGE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Group velocity dispersion (s^2/m).
    pub beta2: f64,
    /// Nonlinear coefficient (1/(W m)).
    pub gamma: f64,
    /// Power attenuation (1/m); only sets the noise level.
    pub alpha: f64,
    /// Link length (m).
    pub length: f64,
    pub eta_sp: f64,
    /// Optical carrier frequency (Hz).
    pub carrier_frequency: f64,
    pub nz: usize,
    pub noise_on: bool,
    pub seed: u64,
    /// Independent noise stream for this propagation (e.g. the frame index).
    pub stream: u64,
}

impl ChannelParams {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        Self {
            beta2: cfg.beta2,
            gamma: cfg.gamma,
            alpha: cfg.alpha,
            length: cfg.link_length,
            eta_sp: cfg.eta_sp,
            carrier_frequency: cfg.carrier_frequency,
            nz: cfg.nz,
            noise_on: cfg.noise_on,
            seed: cfg.seed,
            stream: 0,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.nz == 0 {
            return Err(NfdmError::Config("nz must be at least 1".into()));
        }
        if !(self.length >= 0.0) {
            return Err(NfdmError::Config(format!("link length must be >= 0, got {}", self.length)));
        }
        if self.noise_on && !(self.alpha >= 0.0 && self.eta_sp >= 0.0 && self.carrier_frequency > 0.0) {
            return Err(NfdmError::Config("noise parameters must be non-negative".into()));
        }
        Ok(())
    }

    /// Noise PSD accumulated over the link, `eta_sp h nu alpha L` (W/Hz).
    pub fn noise_psd(&self) -> f64 {
        self.eta_sp * PLANCK * self.carrier_frequency * self.alpha * self.length
    }

    /// Per-sample complex noise variance added in one step of size `dz`.
    pub fn step_variance(&self, dz: f64, dt: f64) -> f64 {
        self.eta_sp * PLANCK * self.carrier_frequency * self.alpha * dz / dt
    }
}

fn require_physical(q: &ComplexEnvelope) -> Result<()> {
    if q.units() != Units::Physical {
        return Err(NfdmError::Usage("the channel operates on physical envelopes".into()));
    }
    Ok(())
}

/// Share of the energy in the outer `EDGE_FRACTION` of the grid on each side.
pub fn edge_energy_fraction(samples: &[C64]) -> f64 {
    let n = samples.len();
    let edge = ((n as f64 * EDGE_FRACTION).ceil() as usize).max(1).min(n / 2);
    let total: f64 = samples.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let outer: f64 = samples[..edge].iter().chain(&samples[n - edge..]).map(|v| v.norm_sqr()).sum();
    outer / total
}

/// The frame repeats periodically, so a burst may spill into the guard on
/// one side of the link; it wraps onto itself only if it is spread at both
/// ends. The far end is predicted by linear dispersion alone.
fn check_guard(input: &ComplexEnvelope, beta2: f64, length: f64) -> Result<()> {
    let near = edge_energy_fraction(input.samples());
    if near <= EDGE_TOLERANCE {
        return Ok(());
    }
    let far = edge_energy_fraction(apply_dispersion(input, beta2, length)?.samples());
    if far > EDGE_TOLERANCE {
        return Err(NfdmError::GuardViolation { edge_fraction: near.min(far) });
    }
    Ok(())
}

/// `exp(j beta2 omega^2 z / 2)` on the DFT bins.
fn dispersion_phase(len: usize, dt: f64, beta2: f64, z: f64) -> Vec<C64> {
    (0..len)
        .map(|k| {
            let w = dsp::angular_frequency(k, len, dt);
            C64::from_polar(1.0, 0.5 * beta2 * w * w * z)
        })
        .collect()
}

fn nonlinear_step(buf: &mut [C64], gamma: f64, dz: f64) {
    if gamma == 0.0 {
        return;
    }
    for v in buf.iter_mut() {
        *v *= C64::from_polar(1.0, gamma * v.norm_sqr() * dz);
    }
}

fn linear_step(buf: &mut [C64], phase: &[C64]) {
    dsp::fft(buf);
    for (v, p) in buf.iter_mut().zip(phase) {
        *v *= p;
    }
    dsp::ifft(buf);
}

fn split_step(q: &ComplexEnvelope, beta2: f64, gamma: f64, length: f64, nz: usize, noise: Option<(f64, u64, u64)>) -> Vec<C64> {
    let dz = length / nz as f64;
    let mut buf = q.samples().to_vec();
    let phase = dispersion_phase(buf.len(), q.dt(), beta2, dz);
    let mut rng = noise.map(|(_, seed, stream)| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    });
    let sigma = noise.map_or(0.0, |(var, _, _)| (0.5 * var).sqrt());
    for _ in 0..nz {
        nonlinear_step(&mut buf, gamma, 0.5 * dz);
        linear_step(&mut buf, &phase);
        nonlinear_step(&mut buf, gamma, 0.5 * dz);
        if let Some(rng) = rng.as_mut() {
            for v in buf.iter_mut() {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                *v += C64::new(re, im) * sigma;
            }
        }
    }
    buf
}

/// Propagate over the link. With `noise_on`, white circular Gaussian noise
/// of per-sample variance `eta_sp h nu alpha dz / dt` is added after every step.
pub fn ssfm_propagate(q: &ComplexEnvelope, p: &ChannelParams) -> Result<ComplexEnvelope> {
    require_physical(q)?;
    p.validate()?;
    check_guard(q, p.beta2, p.length)?;
    let noise = p.noise_on.then(|| (p.step_variance(p.length / p.nz as f64, q.dt()), p.seed, p.stream));
    let out = split_step(q, p.beta2, p.gamma, p.length, p.nz, noise);
    ComplexEnvelope::on_grid(out, q.grid(), Units::Physical)
}

/// Noiseless propagation through the inverse channel (`beta2 -> -beta2`,
/// `gamma -> -gamma`) with the same step layout.
pub fn dbp(q: &ComplexEnvelope, p: &ChannelParams) -> Result<ComplexEnvelope> {
    require_physical(q)?;
    p.validate()?;
    let out = split_step(q, -p.beta2, -p.gamma, p.length, p.nz, None);
    ComplexEnvelope::on_grid(out, q.grid(), Units::Physical)
}

/// Linear dispersion over `length` (negative to undo it).
pub fn apply_dispersion(q: &ComplexEnvelope, beta2: f64, length: f64) -> Result<ComplexEnvelope> {
    let mut buf = q.samples().to_vec();
    let phase = dispersion_phase(buf.len(), q.dt(), beta2, length);
    linear_step(&mut buf, &phase);
    q.with_samples(buf)
}

/// Electronic dispersion compensation: multiply by `exp(-j beta2 omega^2 L / 2)`.
pub fn edc(q: &ComplexEnvelope, p: &ChannelParams) -> Result<ComplexEnvelope> {
    require_physical(q)?;
    apply_dispersion(q, p.beta2, -p.length)
}

/// Brick-wall filter keeping the discrete frequencies with `|f| <= bandwidth`.
/// Filtering an envelope already limited to `bandwidth` or less returns it unchanged.
pub fn ideal_lowpass(q: &ComplexEnvelope, bandwidth: f64) -> Result<ComplexEnvelope> {
    if !(bandwidth > 0.0) {
        return Err(NfdmError::InvalidInput(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if q.band_limit().is_some_and(|b| b <= bandwidth) {
        return Ok(q.clone());
    }
    let n = q.len();
    let df = 1.0 / (n as f64 * q.dt());
    let mut buf = q.samples().to_vec();
    dsp::fft(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        if (dsp::signed_bin(k, n) as f64 * df).abs() > bandwidth {
            *v = C64::new(0.0, 0.0);
        }
    }
    dsp::ifft(&mut buf);
    Ok(q.with_samples(buf)?.with_band_limit(bandwidth))
}
