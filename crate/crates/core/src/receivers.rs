//! Symbol detection: matched filtering of a linear-domain estimate, the
//! forward-NFT receiver, and the decision-feedback BNFT receiver.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{NfdmError, Result};
use crate::framing::{ComplexEnvelope, Units};
use crate::link::Link;
use crate::nft::{fnft_with, nis_decode, FnftScheme, GlmKernel};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Alphabet index of every decided symbol.
    pub decided: Vec<usize>,
    /// Metric of the winning candidate per symbol.
    pub metrics: Vec<f64>,
    /// Metric of every candidate per symbol (DF-BNFT only; empty otherwise).
    pub candidate_metrics: Vec<Vec<f64>>,
    pub elapsed: Duration,
}

/// Index of the smallest value; ties go to the lowest index.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Correlate with the transmit pulse at every symbol center and pick the
/// nearest alphabet point (after removing the known symbol amplitude).
pub fn matched_filter_decide(s_hat: &ComplexEnvelope, link: &Link) -> Result<DetectionResult> {
    let start = Instant::now();
    let layout = link.layout();
    if s_hat.len() != layout.len() {
        return Err(NfdmError::GridMismatch(format!(
            "estimate has {} samples, frame has {}",
            s_hat.len(),
            layout.len()
        )));
    }
    let pulse = link.pulse();
    let dt = layout.step();
    let samples = s_hat.samples();
    let alphabet = link.alphabet();
    let mut decided = Vec::with_capacity(layout.burst_len);
    let mut metrics = Vec::with_capacity(layout.burst_len);
    for k in 0..layout.burst_len {
        let first = layout.symbol_center_index(k) as i64 + pulse.first_offset();
        let y: C64 = pulse
            .taps()
            .iter()
            .enumerate()
            .map(|(m, &g)| samples[(first + m as i64) as usize] * g)
            .sum::<C64>()
            * dt
            / link.amplitude();
        let idx = alphabet.nearest(y);
        decided.push(idx);
        metrics.push((y - alphabet.point(idx)).norm_sqr());
    }
    Ok(DetectionResult { decided, metrics, candidate_metrics: Vec::new(), elapsed: start.elapsed() })
}

/// Forward NFT of the received NFT-grid frame, inverse NIS and matched filtering.
pub fn fnft_receiver(q_rx: &ComplexEnvelope, link: &Link) -> Result<DetectionResult> {
    let start = Instant::now();
    check_rx(q_rx, link)?;
    let grid = link.grid();
    let spec = fnft_with(q_rx, &grid.lambda, FnftScheme::Magnus4, grid.lambda_nyquist())?;
    let s_hat = nis_decode(&spec, &grid.s)?;
    let mut out = matched_filter_decide(&s_hat, link)?;
    out.elapsed = start.elapsed();
    Ok(out)
}

fn check_rx(q_rx: &ComplexEnvelope, link: &Link) -> Result<()> {
    if q_rx.units() != Units::Normalized {
        return Err(NfdmError::Usage("receivers expect a normalized frame".into()));
    }
    let g = link.grid().q;
    if q_rx.len() != g.len || (q_rx.dt() - g.dt).abs() > 1e-12 * g.dt || (q_rx.t0() - g.t0).abs() > 1e-9 * g.dt {
        return Err(NfdmError::GridMismatch("received frame is not on the NFT grid".into()));
    }
    Ok(())
}

/// Decision-feedback detection by windowed inverse NFTs.
pub fn df_bnft_receiver(q_rx: &ComplexEnvelope, link: &Link) -> Result<DetectionResult> {
    df_bnft_receiver_forced(q_rx, link, &[])
}

/// As [`df_bnft_receiver`], but `forced[k] = Some(i)` feeds back symbol `i`
/// at step `k` regardless of the decision.
pub fn df_bnft_receiver_forced(q_rx: &ComplexEnvelope, link: &Link, forced: &[Option<usize>]) -> Result<DetectionResult> {
    let start = Instant::now();
    check_rx(q_rx, link)?;
    let layout = link.layout();
    let order = link.alphabet().order();
    let grid = link.grid();
    let h = grid.q.dt;
    let rx = q_rx.samples();
    let mut prefix: Vec<usize> = Vec::with_capacity(layout.burst_len);
    let mut decided = Vec::with_capacity(layout.burst_len);
    let mut metrics = Vec::with_capacity(layout.burst_len);
    let mut candidate_metrics = Vec::with_capacity(layout.burst_len);
    for k in 0..layout.burst_len {
        let (first, last) = layout.window_indices(k)?;
        let trial_metrics: Vec<f64> = (0..order)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let mut trial = prefix.clone();
                trial.push(i);
                let spec = link.spectrum(&trial, 0.0)?;
                let kernel = GlmKernel::new(&spec, &grid.q)?;
                let q = link.solver().solve_range(&kernel, first, last)?;
                Ok(window_distance(&rx[first..=last], &q, h))
            })
            .collect::<Result<_>>()?;
        let best = argmin(&trial_metrics);
        decided.push(best);
        metrics.push(trial_metrics[best]);
        candidate_metrics.push(trial_metrics);
        prefix.push(forced.get(k).copied().flatten().unwrap_or(best));
    }
    Ok(DetectionResult { decided, metrics, candidate_metrics, elapsed: start.elapsed() })
}

/// Trapezoidal `integral |a - b|^2 dt` over one window.
pub fn window_distance(a: &[C64], b: &[C64], h: f64) -> f64 {
    let n = a.len();
    let sum: f64 = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| {
            let w = if n > 1 && (i == 0 || i == n - 1) { 0.5 } else { 1.0 };
            w * (x - y).norm_sqr()
        })
        .sum();
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmin_prefers_lowest_index() {
        assert_eq!(argmin(&[3.0, 1.0, 1.0, 2.0]), 1);
        assert_eq!(argmin(&[0.0, 0.0]), 0);
        assert_eq!(argmin(&[5.0]), 0);
    }

    #[test]
    fn trapezoid_weights() {
        let a = vec![C64::new(1.0, 0.0); 5];
        let b = vec![C64::new(0.0, 0.0); 5];
        assert!((window_distance(&a, &b, 0.5) - 2.0).abs() < 1e-15);
        assert!((window_distance(&a[..1], &b[..1], 0.5) - 0.5).abs() < 1e-15);
    }
}
