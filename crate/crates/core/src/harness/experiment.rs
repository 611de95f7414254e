//! Monte-Carlo sweeps over power, burst length and receiver.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{dbp, edc, ssfm_propagate, ChannelParams};
use crate::error::{NfdmError, Result};
use crate::harness::config::{ExperimentConfig, ReceiverKind};
use crate::link::Link;
use crate::metrics::{count_bit_errors, write_csv, write_timing, ErrorTally, ExperimentRecord, StopReason};
use crate::receivers::{df_bnft_receiver, fnft_receiver, matched_filter_decide, DetectionResult};

/// Symbols of frame `frame` in a cell with `burst_len` symbols. Independent
/// of the launch power, so every power and receiver sees the same data.
pub fn frame_symbols(seed: u64, burst_len: usize, frame: u64, order: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame_stream(burst_len, frame) << 1);
    (0..burst_len).map(|_| rng.gen_range(0..order)).collect()
}

/// Noise stream of a frame; shared by all receivers and powers.
pub fn noise_stream(burst_len: usize, frame: u64) -> u64 {
    (frame_stream(burst_len, frame) << 1) | 1
}

fn frame_stream(burst_len: usize, frame: u64) -> u64 {
    ((burst_len as u64) << 40) | frame
}

struct Tracker {
    kind: ReceiverKind,
    tally: ErrorTally,
    elapsed: Duration,
    stop: Option<StopReason>,
}

impl Tracker {
    fn record(&mut self, tx: &[usize], rx: std::result::Result<DetectionResult, NfdmError>, link: &Link) -> Result<()> {
        let (errors, bits) = match rx {
            Ok(d) => {
                self.elapsed += d.elapsed;
                count_bit_errors(tx, &d.decided, link.alphabet())?
            }
            // a failed detection is scored as a coin flip per bit
            Err(e @ (NfdmError::SingularSpectrum { .. } | NfdmError::NumericalFailure { .. })) => {
                log::warn!("{} detection failed: {e}", self.kind);
                let bits = (tx.len() * link.alphabet().bits_per_symbol()) as u64;
                (bits / 2, bits)
            }
            Err(e) => return Err(e),
        };
        self.tally.add_frame(errors, bits);
        Ok(())
    }

    fn active(&self) -> bool {
        self.stop.is_none()
    }
}

/// Simulate one `(Nb, power)` cell for every configured receiver.
pub fn run_cell(cfg: &ExperimentConfig, burst_len: usize, power_dbm: f64) -> Result<Vec<ExperimentRecord>> {
    let sys = cfg.cell(burst_len, power_dbm);
    let link = Link::new(&sys)?;
    let channel = ChannelParams::from_config(&sys);
    let order = link.alphabet().order();
    let mut trackers: Vec<Tracker> = cfg
        .receivers
        .iter()
        .map(|&kind| Tracker { kind, tally: ErrorTally::default(), elapsed: Duration::ZERO, stop: None })
        .collect();
    let mut frame = 0u64;
    while trackers.iter().any(Tracker::active) {
        if frame >= cfg.frame_cap {
            for t in trackers.iter_mut().filter(|t| t.active()) {
                t.stop = Some(StopReason::FrameCap);
            }
            break;
        }
        let tx = frame_symbols(sys.seed, burst_len, frame, order);
        let ch = channel.clone().with_stream(noise_stream(burst_len, frame));
        for nfdm in [true, false] {
            if !trackers.iter().any(|t| t.active() && t.kind.is_nfdm() == nfdm) {
                continue;
            }
            let start = Instant::now();
            let signal = if nfdm { link.nfdm_transmit(&tx)? } else { link.conventional_transmit(&tx)? };
            let rx = match ssfm_propagate(&signal, &ch) {
                Ok(rx) => rx,
                Err(e @ NfdmError::GuardViolation { .. }) => {
                    log::warn!("Nb = {burst_len}, {power_dbm} dBm: {e}");
                    for t in trackers.iter_mut().filter(|t| t.active() && t.kind.is_nfdm() == nfdm) {
                        t.stop = Some(StopReason::Invalid);
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            let shared = start.elapsed();
            let q_rx = if nfdm { Some(link.nfdm_receive(&rx)?) } else { None };
            for t in trackers.iter_mut().filter(|t| t.active() && t.kind.is_nfdm() == nfdm) {
                t.elapsed += shared;
                let decision = match t.kind {
                    ReceiverKind::Fnft => fnft_receiver(q_rx.as_ref().unwrap(), &link),
                    ReceiverKind::DfBnft => df_bnft_receiver(q_rx.as_ref().unwrap(), &link),
                    ReceiverKind::Edc => linear_receiver(&link, &edc(&rx, &ch)?),
                    ReceiverKind::Dbp => linear_receiver(&link, &dbp(&rx, &ch)?),
                };
                t.record(&tx, decision, &link)?;
            }
        }
        frame += 1;
        for t in trackers.iter_mut().filter(|t| t.active() && t.tally.bit_errors >= cfg.min_errors) {
            t.stop = Some(StopReason::Errors);
        }
    }
    let records: Vec<ExperimentRecord> = trackers
        .into_iter()
        .map(|t| {
            ExperimentRecord::new(
                power_dbm,
                burst_len,
                sys.guard_len,
                t.kind.tag(),
                t.tally,
                sys.seed,
                t.elapsed.as_secs_f64(),
                t.stop.unwrap_or(StopReason::Errors),
            )
        })
        .collect();
    for r in &records {
        log::info!(
            "{:>8} Nb = {:<3} {:>6.2} dBm: {} errors / {} bits in {} frames ({})",
            r.receiver,
            r.burst_len,
            r.power_dbm,
            r.bit_errors,
            r.bits_total,
            r.frames,
            r.stop.as_str()
        );
    }
    Ok(records)
}

fn linear_receiver(link: &Link, rx: &crate::framing::ComplexEnvelope) -> Result<DetectionResult> {
    let s = link.on_s_grid(&link.adc(rx)?)?;
    matched_filter_decide(&s, link)
}

/// Best launch power of one `(receiver, Nb)` curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub receiver: String,
    pub burst_len: usize,
    pub guard_len: usize,
    pub eta: f64,
    /// `None` when no cell of the curve has a measurable Q.
    pub best: Option<(f64, f64)>,
}

pub const OPTIMUM_HEADER: &str = "receiver,Nb,Ng,eta,best_power_dbm,Q_db2_max";

impl Optimum {
    pub fn csv_row(&self) -> String {
        let (p, q) = match self.best {
            Some((p, q)) => (format!("{p:.3}"), format!("{q:.6}")),
            None => ("unmeasurable".into(), "unmeasurable".into()),
        };
        format!("{},{},{},{:.6},{p},{q}", self.receiver, self.burst_len, self.guard_len, self.eta)
    }
}

/// Maximum Q over the power sweep for each `(receiver, Nb)`, skipping
/// invalid and unmeasurable cells.
pub fn optimum_summary(records: &[ExperimentRecord]) -> Vec<Optimum> {
    let mut out: Vec<Optimum> = Vec::new();
    for r in records {
        let idx = match out.iter().position(|o| o.receiver == r.receiver && o.burst_len == r.burst_len) {
            Some(i) => i,
            None => {
                out.push(Optimum {
                    receiver: r.receiver.clone(),
                    burst_len: r.burst_len,
                    guard_len: r.guard_len,
                    eta: r.eta,
                    best: None,
                });
                out.len() - 1
            }
        };
        if let (Some(q), true) = (r.q_db2, r.stop != StopReason::Invalid) {
            let o = &mut out[idx];
            if o.best.map_or(true, |(_, b)| q > b) {
                o.best = Some((r.power_dbm, q));
            }
        }
    }
    out.sort_by(|a, b| (&a.receiver, a.burst_len).cmp(&(&b.receiver, b.burst_len)));
    out
}

pub fn optimum_csv(summary: &[Optimum]) -> String {
    let mut s = format!("{OPTIMUM_HEADER}\n");
    for o in summary {
        let _ = writeln!(s, "{}", o.csv_row());
    }
    s
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// Sorted by receiver, burst length and power.
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<Optimum>,
}

impl ExperimentOutput {
    /// Write `results.csv`, `timing.csv` and `optimum.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_csv(&dir.join("results.csv"), &self.records)?;
        write_timing(&dir.join("timing.csv"), &self.records)?;
        std::fs::write(dir.join("optimum.csv"), optimum_csv(&self.summary))?;
        Ok(())
    }
}

/// Run every cell of the sweep. Cells run concurrently; the output order
/// does not depend on completion order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    for w in cfg.validate()? {
        log::warn!("{w}");
    }
    let cells: Vec<(usize, f64)> =
        cfg.burst_lens.iter().flat_map(|&nb| cfg.powers_dbm.iter().map(move |&p| (nb, p))).collect();
    let per_cell: Vec<Vec<ExperimentRecord>> =
        cells.par_iter().map(|&(nb, p)| run_cell(cfg, nb, p)).collect::<Result<_>>()?;
    let mut records: Vec<ExperimentRecord> = per_cell.into_iter().flatten().collect();
    records.sort_by_key(ExperimentRecord::sort_key);
    let summary = optimum_summary(&records);
    Ok(ExperimentOutput { records, summary })
}
