//! Constellations, pulse shaping, burst framing and unit conversion.
//!
//! Time inside a frame is measured in symbol periods once normalized
//! (the normalization time scale is the symbol time). Symbol `k`
//! (zero-based) is centered at `t = k` and owns the slot `(k - 1/2, k + 1/2)`.
//! The NFT-domain waveform lives on the mirrored axis, where symbol `k`
//! owns the detection window `[-(k + 1/2), -(k - 1/2)]`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{NfdmError, Result};
use crate::C64;

/// Planck constant (J s).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Whether an envelope is expressed in physical (s, sqrt(W)) or normalized NLSE units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Physical,
    Normalized,
}

/// Uniform sampling grid `t0 + n * dt`, `n = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(NfdmError::InvalidInput(format!("time grid needs at least 2 samples, got {len}")));
        }
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(NfdmError::InvalidInput(format!("invalid time grid (t0 = {t0}, dt = {dt})")));
        }
        Ok(Self { t0, dt, len })
    }

    #[inline]
    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn duration(&self) -> f64 {
        self.len as f64 * self.dt
    }

    /// Index of the sample nearest to `t`, if it lies within half a step of the grid.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        let x = ((t - self.t0) / self.dt).round();
        if x < 0.0 || x > (self.len - 1) as f64 {
            None
        } else {
            Some(x as usize)
        }
    }

    pub fn scaled(&self, factor: f64) -> TimeGrid {
        TimeGrid { t0: self.t0 * factor, dt: self.dt * factor, len: self.len }
    }
}

/// Uniformly sampled complex baseband waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    samples: Vec<C64>,
    grid: TimeGrid,
    units: Units,
    /// Set when the envelope is known to contain no energy above this frequency
    /// (same time units as the grid).
    band_limit: Option<f64>,
}

impl ComplexEnvelope {
    pub fn new(samples: Vec<C64>, t0: f64, dt: f64, units: Units) -> Result<Self> {
        let grid = TimeGrid::new(t0, dt, samples.len())?;
        Ok(Self { samples, grid, units, band_limit: None })
    }

    pub fn on_grid(samples: Vec<C64>, grid: TimeGrid, units: Units) -> Result<Self> {
        if samples.len() != grid.len {
            return Err(NfdmError::GridMismatch(format!(
                "{} samples for a grid of {}",
                samples.len(),
                grid.len
            )));
        }
        Self::new(samples, grid.t0, grid.dt, units)
    }

    pub fn zeros(grid: TimeGrid, units: Units) -> Self {
        Self { samples: vec![C64::new(0.0, 0.0); grid.len], grid, units, band_limit: None }
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn t0(&self) -> f64 {
        self.grid.t0
    }

    pub fn dt(&self) -> f64 {
        self.grid.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn band_limit(&self) -> Option<f64> {
        self.band_limit
    }

    pub(crate) fn with_band_limit(mut self, limit: f64) -> Self {
        self.band_limit = Some(limit);
        self
    }

    pub fn time(&self, n: usize) -> f64 {
        self.grid.time(n)
    }

    /// Same grid and units, new samples.
    pub fn with_samples(&self, samples: Vec<C64>) -> Result<Self> {
        Self::on_grid(samples, self.grid, self.units)
    }

    /// `dt * sum |q|^2`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dt
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            samples: self.samples.iter().map(|z| z * factor).collect(),
            grid: self.grid,
            units: self.units,
            band_limit: self.band_limit,
        }
    }
}

/// Square M-QAM constellation with a per-quadrature reflected Gray labeling.
///
/// Point `p = i * L + j` (with `L = sqrt(M)`) has in-phase level index `i`
/// and quadrature level index `j`, amplitudes `2i - L + 1` and `2j - L + 1`
/// before the unit-energy scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct QamAlphabet {
    order: usize,
    points: Vec<C64>,
    labels: Vec<u32>,
    index_of_label: Vec<usize>,
}

impl QamAlphabet {
    pub fn square(order: usize) -> Result<Self> {
        let bits = order.trailing_zeros() as usize;
        if order < 4 || !order.is_power_of_two() || bits % 2 != 0 {
            return Err(NfdmError::InvalidInput(format!("QAM order must be a power of 4, got {order}")));
        }
        let levels = 1usize << (bits / 2);
        let half_bits = bits / 2;
        let mean_energy = 2.0 * ((levels * levels) as f64 - 1.0) / 3.0;
        let scale = 1.0 / mean_energy.sqrt();
        let gray = |i: usize| (i ^ (i >> 1)) as u32;
        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order);
        for i in 0..levels {
            for j in 0..levels {
                let re = (2 * i) as f64 - levels as f64 + 1.0;
                let im = (2 * j) as f64 - levels as f64 + 1.0;
                points.push(C64::new(re, im) * scale);
                labels.push((gray(i) << half_bits) | gray(j));
            }
        }
        let mut index_of_label = vec![0; order];
        for (p, &l) in labels.iter().enumerate() {
            index_of_label[l as usize] = p;
        }
        Ok(Self { order, points, labels, index_of_label })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> C64 {
        self.points[index]
    }

    /// Gray label of point `index`.
    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    pub fn index_of_label(&self, label: u32) -> usize {
        self.index_of_label[label as usize]
    }

    /// Minimum-distance decision; ties go to the lowest index.
    pub fn nearest(&self, z: C64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Smallest distance between two distinct points.
    pub fn min_distance(&self) -> f64 {
        let levels = 1usize << (self.bits_per_symbol() / 2);
        let mean_energy = 2.0 * ((levels * levels) as f64 - 1.0) / 3.0;
        2.0 / mean_energy.sqrt()
    }
}

/// Ordered QAM symbols of one burst.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBurst {
    indices: Vec<usize>,
    symbols: Vec<C64>,
    alphabet: Arc<QamAlphabet>,
}

impl SymbolBurst {
    pub fn from_indices(indices: Vec<usize>, alphabet: Arc<QamAlphabet>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= alphabet.order()) {
            return Err(NfdmError::InvalidInput(format!(
                "symbol index {bad} outside a {}-point alphabet",
                alphabet.order()
            )));
        }
        let symbols = indices.iter().map(|&i| alphabet.point(i)).collect();
        Ok(Self { indices, symbols, alphabet })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn symbols(&self) -> &[C64] {
        &self.symbols
    }

    pub fn alphabet(&self) -> &Arc<QamAlphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// First `n` symbols.
    pub fn prefix(&self, n: usize) -> SymbolBurst {
        SymbolBurst {
            indices: self.indices[..n].to_vec(),
            symbols: self.symbols[..n].to_vec(),
            alphabet: Arc::clone(&self.alphabet),
        }
    }
}

/// Groups of `log2 M` bits (MSB first) become Gray-labeled symbols.
pub fn map_bits_to_burst(bits: &[bool], alphabet: &Arc<QamAlphabet>) -> Result<SymbolBurst> {
    let k = alphabet.bits_per_symbol();
    if bits.len() % k != 0 {
        return Err(NfdmError::InvalidInput(format!(
            "{} bits is not a multiple of {k} bits per symbol",
            bits.len()
        )));
    }
    let indices = bits
        .chunks(k)
        .map(|chunk| {
            let label = chunk.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
            alphabet.index_of_label(label)
        })
        .collect();
    SymbolBurst::from_indices(indices, Arc::clone(alphabet))
}

/// Inverse of [`map_bits_to_burst`] for arbitrary symbol indices.
pub fn demap_indices(indices: &[usize], alphabet: &QamAlphabet) -> Vec<bool> {
    let k = alphabet.bits_per_symbol();
    let mut bits = Vec::with_capacity(indices.len() * k);
    for &i in indices {
        let label = alphabet.label(i);
        for b in (0..k).rev() {
            bits.push((label >> b) & 1 == 1);
        }
    }
    bits
}

/// Time, distance and power scales that map the physical NLSE onto
/// `i q_z + q_tt + 2 |q|^2 q = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationScales {
    /// Time scale (s).
    pub t0: f64,
    /// Distance scale (m), `2 t0^2 / |beta2|`.
    pub z0: f64,
    /// Power scale (W), `2 / (gamma z0) = |beta2| / (gamma t0^2)`.
    pub p0: f64,
}

impl NormalizationScales {
    pub fn new(t0: f64, beta2: f64, gamma: f64) -> Result<Self> {
        if !(t0 > 0.0) || beta2 == 0.0 || !beta2.is_finite() || !(gamma > 0.0) {
            return Err(NfdmError::Config(format!(
                "cannot normalize with t0 = {t0}, beta2 = {beta2}, gamma = {gamma}"
            )));
        }
        let z0 = 2.0 * t0 * t0 / beta2.abs();
        let p0 = 2.0 / (gamma * z0);
        Ok(Self { t0, z0, p0 })
    }

    /// Recompute `z0` and `p0` from the defining relations and compare.
    pub fn is_consistent(&self, beta2: f64, gamma: f64) -> bool {
        let z0 = 2.0 * self.t0 * self.t0 / beta2.abs();
        let p0 = 2.0 / (gamma * z0);
        self.t0 > 0.0
            && self.z0 > 0.0
            && self.p0 > 0.0
            && ((self.z0 - z0) / z0).abs() < 1e-12
            && ((self.p0 - p0) / p0).abs() < 1e-12
    }

    pub fn normalize_length(&self, z: f64) -> f64 {
        z / self.z0
    }
}

/// Physical envelope to normalized units: `t -> t/T0`, `q -> q/sqrt(P0)`.
pub fn normalize(env: &ComplexEnvelope, scales: &NormalizationScales) -> Result<ComplexEnvelope> {
    if env.units() != Units::Physical {
        return Err(NfdmError::Usage("normalize expects a physical envelope".into()));
    }
    let amp = scales.p0.sqrt();
    let samples = env.samples().iter().map(|z| z / amp).collect();
    let mut out = ComplexEnvelope::new(samples, env.t0() / scales.t0, env.dt() / scales.t0, Units::Normalized)?;
    out.band_limit = env.band_limit().map(|b| b * scales.t0);
    Ok(out)
}

/// Inverse of [`normalize`].
pub fn denormalize(env: &ComplexEnvelope, scales: &NormalizationScales) -> Result<ComplexEnvelope> {
    if env.units() != Units::Normalized {
        return Err(NfdmError::Usage("denormalize expects a normalized envelope".into()));
    }
    let amp = scales.p0.sqrt();
    let samples = env.samples().iter().map(|z| z * amp).collect();
    let mut out = ComplexEnvelope::new(samples, env.t0() * scales.t0, env.dt() * scales.t0, Units::Physical)?;
    out.band_limit = env.band_limit().map(|b| b / scales.t0);
    Ok(out)
}

/// Placement of one burst and its guard symbols on the sampling grids.
///
/// The linear-domain grid (`s_grid`) carries the QAM signal with the guard
/// split evenly around the burst. The NFT-domain grid (`q_grid`) is its
/// mirror image at half the sampling rate; `q_grid_fine` is the same frame at
/// the full rate, used for propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub burst_len: usize,
    pub guard_len: usize,
    pub samples_per_symbol: usize,
}

impl FrameLayout {
    pub fn new(burst_len: usize, guard_len: usize, samples_per_symbol: usize) -> Result<Self> {
        if samples_per_symbol < 2 || samples_per_symbol % 2 != 0 {
            return Err(NfdmError::Config(format!(
                "samples_per_symbol must be even and >= 2, got {samples_per_symbol}"
            )));
        }
        if (guard_len * samples_per_symbol) % 4 != 0 {
            return Err(NfdmError::Config(format!(
                "guard_len * samples_per_symbol must be a multiple of 4 (got {guard_len} * {samples_per_symbol})"
            )));
        }
        if burst_len + guard_len < 2 {
            return Err(NfdmError::Config("frame must span at least two symbols".into()));
        }
        Ok(Self { burst_len, guard_len, samples_per_symbol })
    }

    /// Samples on the full-rate grids.
    pub fn len(&self) -> usize {
        (self.burst_len + self.guard_len) * self.samples_per_symbol
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self) -> f64 {
        1.0 / self.samples_per_symbol as f64
    }

    /// Linear-domain grid in symbol units.
    pub fn s_grid(&self) -> TimeGrid {
        let t0 = -(self.guard_len as f64 + 1.0) / 2.0 + self.step();
        TimeGrid { t0, dt: self.step(), len: self.len() }
    }

    fn q_t0(&self) -> f64 {
        -(self.burst_len as f64) - self.guard_len as f64 / 2.0 + 0.5
    }

    /// NFT-domain grid in symbol units (half rate, mirror of `s_grid`).
    pub fn q_grid(&self) -> TimeGrid {
        TimeGrid { t0: self.q_t0(), dt: 2.0 * self.step(), len: self.len() / 2 }
    }

    /// NFT-domain frame at the full sampling rate.
    pub fn q_grid_fine(&self) -> TimeGrid {
        TimeGrid { t0: self.q_t0(), dt: self.step(), len: self.len() }
    }

    /// `s_grid` index of the center of symbol `k` (zero-based).
    pub fn symbol_center_index(&self, k: usize) -> usize {
        k * self.samples_per_symbol + (self.guard_len + 1) * self.samples_per_symbol / 2 - 1
    }

    /// Inclusive `q_grid` index range of the detection window of symbol `k`
    /// (zero-based), i.e. `[-(k + 1/2), -(k - 1/2)]`.
    pub fn window_indices(&self, k: usize) -> Result<(usize, usize)> {
        if k >= self.burst_len {
            return Err(NfdmError::Framing(format!("symbol {k} outside a burst of {}", self.burst_len)));
        }
        let half = self.samples_per_symbol / 2;
        let start = (self.burst_len - k - 1) * half + self.guard_len * self.samples_per_symbol / 4;
        let end = start + half;
        if end >= self.len() / 2 {
            return Err(NfdmError::Framing(format!("window of symbol {k} leaves the received grid")));
        }
        Ok((start, end))
    }
}

/// Unit-energy Gaussian pulse with RMS width `rms_width` (symbol units),
/// confined to its own symbol slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    rms_width: f64,
    samples_per_symbol: usize,
    /// Taps at offsets `-(sps/2 - 1) ..= sps/2 - 1`.
    taps: Vec<f64>,
}

impl PulseShape {
    pub fn gaussian(rms_width: f64, samples_per_symbol: usize) -> Result<Self> {
        if !(rms_width > 0.0) {
            return Err(NfdmError::Config(format!("pulse width must be positive, got {rms_width}")));
        }
        if samples_per_symbol < 2 || samples_per_symbol % 2 != 0 {
            return Err(NfdmError::Config(format!(
                "samples_per_symbol must be even and >= 2, got {samples_per_symbol}"
            )));
        }
        let half = (samples_per_symbol / 2) as i64;
        let dt = 1.0 / samples_per_symbol as f64;
        let mut taps: Vec<f64> = (-(half - 1)..half)
            .map(|m| {
                let t = m as f64 * dt;
                (-t * t / (2.0 * rms_width * rms_width)).exp()
            })
            .collect();
        let energy: f64 = taps.iter().map(|g| g * g).sum::<f64>() * dt;
        let norm = 1.0 / energy.sqrt();
        taps.iter_mut().for_each(|g| *g *= norm);
        Ok(Self { rms_width, samples_per_symbol, taps })
    }

    pub fn rms_width(&self) -> f64 {
        self.rms_width
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Offset of the first tap from the pulse center, in samples.
    pub fn first_offset(&self) -> i64 {
        -((self.samples_per_symbol / 2) as i64 - 1)
    }

    /// Continuous-time value of the truncated, normalized pulse.
    pub fn value(&self, t: f64) -> f64 {
        if t.abs() >= 0.5 {
            return 0.0;
        }
        let dt = 1.0 / self.samples_per_symbol as f64;
        let energy: f64 = self.taps.iter().map(|g| g * g).sum::<f64>() * dt;
        debug_assert!((energy - 1.0).abs() < 1e-12);
        let peak = self.taps[self.taps.len() / 2];
        peak * (-t * t / (2.0 * self.rms_width * self.rms_width)).exp()
    }
}

/// Physical and numerical parameters of the system (SI units).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Symbol rate (Hz).
    pub symbol_rate: f64,
    /// Link length (m).
    pub link_length: f64,
    /// Group velocity dispersion (s^2/m); negative for anomalous dispersion.
    pub beta2: f64,
    /// Power attenuation (1/m).
    pub alpha: f64,
    /// Nonlinear coefficient (1/(W m)).
    pub gamma: f64,
    pub eta_sp: f64,
    /// Optical carrier frequency (Hz).
    pub carrier_frequency: f64,
    /// DAC and ADC bandwidth (Hz).
    pub dac_bandwidth: f64,
    pub burst_len: usize,
    pub guard_len: usize,
    pub samples_per_symbol: usize,
    /// Split-step count over the whole link.
    pub nz: usize,
    /// Launch power (dBm), average over the burst.
    pub power_dbm: f64,
    pub seed: u64,
    /// RMS width of the Gaussian pulse in symbol periods.
    pub pulse_rms_width: f64,
    pub qam_order: usize,
    pub noise_on: bool,
}

/// dB/km to 1/m for power attenuation.
pub fn db_per_km_to_per_m(db_per_km: f64) -> f64 {
    db_per_km * 10f64.ln() / 10.0 / 1e3
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::long_haul()
    }
}

impl SystemConfig {
    /// 2000 km link with 2000 guard symbols.
    pub fn long_haul() -> Self {
        Self {
            symbol_rate: 50e9,
            link_length: 2000e3,
            beta2: -20.39e-27,
            alpha: db_per_km_to_per_m(0.2),
            gamma: 1.22e-3,
            eta_sp: 4.0,
            carrier_frequency: 193.41e12,
            dac_bandwidth: 100e9,
            burst_len: 248,
            guard_len: 2000,
            samples_per_symbol: 16,
            nz: 6000,
            power_dbm: -2.0,
            seed: 1,
            pulse_rms_width: 0.2,
            qam_order: 16,
            noise_on: true,
        }
    }

    /// Scaled-down profile used by the shipped experiments.
    pub fn desk_scale() -> Self {
        Self {
            link_length: 400e3,
            guard_len: 400,
            burst_len: 16,
            nz: 1200,
            ..Self::long_haul()
        }
    }

    pub fn symbol_time(&self) -> f64 {
        1.0 / self.symbol_rate
    }

    pub fn scales(&self) -> Result<NormalizationScales> {
        NormalizationScales::new(self.symbol_time(), self.beta2, self.gamma)
    }

    pub fn layout(&self) -> Result<FrameLayout> {
        FrameLayout::new(self.burst_len, self.guard_len, self.samples_per_symbol)
    }

    pub fn launch_power(&self) -> f64 {
        dbm_to_watt(self.power_dbm)
    }

    /// Normalized symbol amplitude scale `sqrt(P / P0)`.
    pub fn normalized_amplitude(&self) -> Result<f64> {
        Ok((self.launch_power() / self.scales()?.p0).sqrt())
    }

    /// Dispersion memory `2 pi B |beta2| L` (s).
    pub fn dispersion_memory(&self) -> f64 {
        2.0 * PI * self.dac_bandwidth * self.beta2.abs() * self.link_length
    }

    /// Rate efficiency `Nb / (Ng + Nb)`.
    pub fn rate_efficiency(&self) -> f64 {
        crate::metrics::rate_efficiency(self.burst_len, self.guard_len)
    }

    /// Check the invariants; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        let positive = [
            ("symbol_rate", self.symbol_rate),
            ("link_length", self.link_length),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("eta_sp", self.eta_sp),
            ("carrier_frequency", self.carrier_frequency),
            ("dac_bandwidth", self.dac_bandwidth),
            ("pulse_rms_width", self.pulse_rms_width),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(NfdmError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.beta2 < 0.0) {
            return Err(NfdmError::Config(format!(
                "beta2 must be negative (anomalous dispersion), got {}",
                self.beta2
            )));
        }
        if self.burst_len == 0 {
            return Err(NfdmError::Config("burst_len must be at least 1".into()));
        }
        if self.nz == 0 {
            return Err(NfdmError::Config("nz must be at least 1".into()));
        }
        if !self.power_dbm.is_finite() {
            return Err(NfdmError::Config("power_dbm must be finite".into()));
        }
        QamAlphabet::square(self.qam_order).map_err(|e| NfdmError::Config(e.to_string()))?;
        self.layout()?;
        let fs = self.samples_per_symbol as f64 * self.symbol_rate;
        if fs < 2.0 * self.dac_bandwidth {
            return Err(NfdmError::Config(format!(
                "sampling rate {fs:e} Hz below twice the DAC bandwidth {:e} Hz",
                self.dac_bandwidth
            )));
        }
        // the NFT grid runs at half the simulation rate
        if fs / 2.0 < 2.0 * self.dac_bandwidth {
            warnings.push(format!(
                "NFT grid rate {:e} Hz is below twice the DAC bandwidth; received waveforms alias",
                fs / 2.0
            ));
        }
        let guard_time = self.guard_len as f64 * self.symbol_time();
        if guard_time < self.dispersion_memory() {
            warnings.push(format!(
                "guard interval {guard_time:e} s shorter than the dispersion memory {:e} s",
                self.dispersion_memory()
            ));
        }
        Ok(warnings)
    }
}

/// `s(t) = sum_k x_k g(t - k)` on the linear-domain grid of the frame.
///
/// Time is in symbol periods; amplitudes are the raw alphabet values.
pub fn shape_pulses(burst: &SymbolBurst, cfg: &SystemConfig) -> Result<ComplexEnvelope> {
    let layout = FrameLayout::new(burst.len(), cfg.guard_len, cfg.samples_per_symbol)?;
    let pulse = PulseShape::gaussian(cfg.pulse_rms_width, cfg.samples_per_symbol)?;
    shape_on_layout(burst.symbols(), &pulse, &layout)
}

/// Pulse train for `symbols` (which may be shorter than the layout's burst).
pub fn shape_on_layout(symbols: &[C64], pulse: &PulseShape, layout: &FrameLayout) -> Result<ComplexEnvelope> {
    if symbols.is_empty() {
        return Err(NfdmError::InvalidInput("cannot shape an empty burst".into()));
    }
    if symbols.len() > layout.burst_len {
        return Err(NfdmError::Config(format!(
            "{} symbols do not fit a frame of {} burst symbols",
            symbols.len(),
            layout.burst_len
        )));
    }
    if pulse.samples_per_symbol != layout.samples_per_symbol {
        return Err(NfdmError::Config("pulse and frame sampling rates differ".into()));
    }
    let grid = layout.s_grid();
    let mut samples = vec![C64::new(0.0, 0.0); grid.len];
    let first = pulse.first_offset();
    for (k, &x) in symbols.iter().enumerate() {
        let center = layout.symbol_center_index(k) as i64;
        for (m, &g) in pulse.taps().iter().enumerate() {
            let n = center + first + m as i64;
            if n < 0 || n >= grid.len as i64 {
                return Err(NfdmError::Config("grid too short for burst and guard".into()));
            }
            samples[n as usize] += x * g;
        }
    }
    ComplexEnvelope::on_grid(samples, grid, Units::Normalized)
}
