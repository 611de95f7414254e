//! Causality of the inverse NFT: the waveform of a burst after `-t_k`
//! depends only on its first `k` symbols.

use std::fmt::Write as _;

use crate::error::{NfdmError, Result};
use crate::framing::SystemConfig;
use crate::harness::experiment::frame_symbols;
use crate::link::Link;
use crate::C64;

#[derive(Debug, Clone)]
pub struct CausalityDemo {
    pub time: Vec<f64>,
    pub long: Vec<C64>,
    pub short: Vec<C64>,
    /// Symbols in the long and short sequences.
    pub lengths: (usize, usize),
    /// `-t_k` of the short sequence (symbol periods).
    pub boundary: f64,
    /// Max `|q_long - q_short|` for `t >= boundary`, relative to max `|q_long|`.
    pub deviation_after: f64,
    /// The same for `t < boundary`.
    pub deviation_before: f64,
}

impl CausalityDemo {
    pub fn to_csv(&self) -> String {
        let (a, b) = self.lengths;
        let mut s = format!("time,abs_q{a},abs_q{b}\n");
        for ((t, x), y) in self.time.iter().zip(&self.long).zip(&self.short) {
            let _ = writeln!(s, "{t:.6},{:.9e},{:.9e}", x.norm(), y.norm());
        }
        s
    }
}

/// Inverse NFT (no precompensation) of `long` random symbols and of the
/// first `short` of them, on the same frame.
pub fn causality_waveforms(cfg: &SystemConfig, long: usize, short: usize) -> Result<CausalityDemo> {
    if short == 0 || short > long {
        return Err(NfdmError::InvalidInput(format!("need 0 < short <= long, got {short} and {long}")));
    }
    let cfg = SystemConfig { burst_len: long, ..cfg.clone() };
    let link = Link::new(&cfg)?;
    let symbols = frame_symbols(cfg.seed, long, 0, link.alphabet().order());
    let wave = |n: usize| link.solver().bnft(&link.spectrum(&symbols[..n], 0.0)?, &link.grid().q);
    let (ql, qs) = (wave(long)?, wave(short)?);
    let grid = link.grid().q;
    // symbol k (1-based) is centred at k - 1, so t_k = k - 1/2
    let boundary = -(short as f64 - 0.5);
    let peak = ql.samples().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (mut after, mut before) = (0.0f64, 0.0f64);
    let time: Vec<f64> = (0..grid.len).map(|n| grid.time(n)).collect();
    for (n, &t) in time.iter().enumerate() {
        let d = (ql.samples()[n] - qs.samples()[n]).norm();
        if t >= boundary - 1e-9 {
            after = after.max(d);
        } else {
            before = before.max(d);
        }
    }
    Ok(CausalityDemo {
        time,
        long: ql.into_samples(),
        short: qs.into_samples(),
        lengths: (long, short),
        boundary,
        deviation_after: after / peak,
        deviation_before: before / peak,
    })
}

/// The 8-versus-6 symbol example.
pub fn demo_causality(cfg: &SystemConfig) -> Result<CausalityDemo> {
    causality_waveforms(cfg, 8, 6)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SystemConfig {
        SystemConfig { guard_len: 40, power_dbm: 0.0, ..SystemConfig::desk_scale() }
    }

    #[test]
    fn identical_sequences_do_not_deviate() {
        let d = causality_waveforms(&small(), 4, 4).unwrap();
        assert_eq!(d.deviation_after, 0.0);
        assert_eq!(d.deviation_before, 0.0);
        assert!(d.to_csv().starts_with("time,abs_q4,abs_q4\n"));
    }

    #[test]
    fn prefix_waveform_matches_after_boundary() {
        let d = causality_waveforms(&small(), 4, 3).unwrap();
        assert!(d.deviation_after < 1e-10, "{}", d.deviation_after);
        assert!(d.deviation_before > 1e-2, "{}", d.deviation_before);
        assert!(causality_waveforms(&small(), 3, 4).is_err());
    }
}
