//! Transmitter and analog front-end chains shared by the experiments and by
//! the decision-feedback receiver's trial waveforms.

use std::sync::Arc;

use crate::channel::ideal_lowpass;
use crate::dsp;
use crate::error::{NfdmError, Result};
use crate::framing::{
    denormalize, normalize, shape_on_layout, ComplexEnvelope, FrameLayout, NormalizationScales, PulseShape,
    QamAlphabet, SystemConfig, TimeGrid, Units,
};
use crate::nft::{nis_encode, precompensate, ContinuousSpectrum, GlmSolver, NftGrid};
use crate::C64;

/// Everything derived from a [`SystemConfig`] that the transmitters and
/// receivers need, computed once.
#[derive(Debug)]
pub struct Link {
    cfg: SystemConfig,
    layout: FrameLayout,
    grid: NftGrid,
    scales: NormalizationScales,
    pulse: PulseShape,
    alphabet: Arc<QamAlphabet>,
    amplitude: f64,
    solver: GlmSolver,
}

impl Link {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let layout = cfg.layout()?;
        let grid = NftGrid::for_signal(layout.s_grid())?;
        Ok(Self {
            cfg: cfg.clone(),
            layout,
            grid,
            scales: cfg.scales()?,
            pulse: PulseShape::gaussian(cfg.pulse_rms_width, cfg.samples_per_symbol)?,
            alphabet: Arc::new(QamAlphabet::square(cfg.qam_order)?),
            amplitude: cfg.normalized_amplitude()?,
            solver: GlmSolver::new(),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn grid(&self) -> &NftGrid {
        &self.grid
    }

    pub fn scales(&self) -> &NormalizationScales {
        &self.scales
    }

    pub fn pulse(&self) -> &PulseShape {
        &self.pulse
    }

    pub fn alphabet(&self) -> &Arc<QamAlphabet> {
        &self.alphabet
    }

    /// Normalized symbol amplitude `sqrt(P / P0)`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn solver(&self) -> &GlmSolver {
        &self.solver
    }

    /// Normalized link length `L / Z0`.
    pub fn normalized_length(&self) -> f64 {
        self.scales.normalize_length(self.cfg.link_length)
    }

    /// Physical grid of the channel simulation (full rate).
    pub fn channel_grid(&self) -> TimeGrid {
        self.layout.q_grid_fine().scaled(self.scales.t0)
    }

    pub fn symbols(&self, indices: &[usize]) -> Vec<C64> {
        indices.iter().map(|&i| self.alphabet.point(i)).collect()
    }

    /// Linear-domain signal `A sum_k x_k g(t - k)` on the frame's `s` grid.
    pub fn linear_signal(&self, indices: &[usize]) -> Result<ComplexEnvelope> {
        let symbols: Vec<C64> = indices.iter().map(|&i| self.alphabet.point(i) * self.amplitude).collect();
        let s = shape_on_layout(&symbols, &self.pulse, &self.layout)?;
        ComplexEnvelope::on_grid(s.into_samples(), self.grid.s, Units::Normalized)
    }

    /// Nonlinear spectrum of a symbol sequence, precompensated over `length` (normalized).
    pub fn spectrum(&self, indices: &[usize], length: f64) -> Result<ContinuousSpectrum> {
        let spec = nis_encode(&self.linear_signal(indices)?)?;
        if length == 0.0 {
            Ok(spec)
        } else {
            precompensate(&spec, length)
        }
    }

    /// NFDM waveform on the NFT grid (normalized, half rate), precompensated
    /// for the full link.
    pub fn nfdm_waveform(&self, indices: &[usize]) -> Result<ComplexEnvelope> {
        let spec = self.spectrum(indices, self.normalized_length())?;
        self.solver.bnft(&spec, &self.grid.q)
    }

    /// Channel input for the NFDM system: interpolate to the full rate,
    /// convert to physical units and apply the DAC filter.
    pub fn nfdm_transmit(&self, indices: &[usize]) -> Result<ComplexEnvelope> {
        let q = self.nfdm_waveform(indices)?;
        self.to_channel(q.samples(), 2)
    }

    /// Channel input for the conventional system: the linear-domain signal itself.
    pub fn conventional_transmit(&self, indices: &[usize]) -> Result<ComplexEnvelope> {
        let s = self.linear_signal(indices)?;
        self.to_channel(s.samples(), 1)
    }

    fn to_channel(&self, samples: &[C64], factor: usize) -> Result<ComplexEnvelope> {
        let fine = dsp::upsample(samples, factor);
        let grid = self.layout.q_grid_fine();
        let env = ComplexEnvelope::on_grid(fine, grid, Units::Normalized)?;
        let phys = denormalize(&env, &self.scales)?;
        ideal_lowpass(&phys, self.cfg.dac_bandwidth)
    }

    /// ADC filter and conversion to a normalized envelope on the full-rate grid.
    pub fn adc(&self, rx: &ComplexEnvelope) -> Result<ComplexEnvelope> {
        if rx.len() != self.layout.len() {
            return Err(NfdmError::GridMismatch(format!(
                "received frame has {} samples, expected {}",
                rx.len(),
                self.layout.len()
            )));
        }
        normalize(&ideal_lowpass(rx, self.cfg.dac_bandwidth)?, &self.scales)
    }

    /// ADC output decimated onto the NFT grid.
    pub fn nfdm_receive(&self, rx: &ComplexEnvelope) -> Result<ComplexEnvelope> {
        let fine = self.adc(rx)?;
        ComplexEnvelope::on_grid(dsp::decimate(fine.samples(), 2), self.grid.q, Units::Normalized)
    }

    /// A normalized full-rate envelope placed on the linear-domain grid.
    pub fn on_s_grid(&self, fine: &ComplexEnvelope) -> Result<ComplexEnvelope> {
        ComplexEnvelope::on_grid(fine.samples().to_vec(), self.grid.s, Units::Normalized)
    }
}
