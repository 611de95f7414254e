//! Bit error counting, Q-factor and experiment records.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{NfdmError, Result};
use crate::framing::{demap_indices, QamAlphabet};

/// `Q^2 = 20 log10(sqrt(2) erfc^-1(2 Pb))` in dB, defined for `0 < Pb < 0.5`.
pub fn qfactor_db2(pb: f64) -> Result<f64> {
    if !(pb > 0.0 && pb < 0.5) {
        return Err(NfdmError::OutOfDomain(pb));
    }
    let x = inverse_erfc(2.0 * pb);
    Ok(20.0 * (std::f64::consts::SQRT_2 * x).log10())
}

/// `erfc^-1(y)` for `0 < y < 2`, polished by Newton steps on `erfc`.
pub fn inverse_erfc(y: f64) -> f64 {
    let mut x = erfc_inv(y);
    let slope = 2.0 / std::f64::consts::PI.sqrt();
    for _ in 0..3 {
        let d = (erfc(x) - y) / (-slope * (-x * x).exp());
        if !d.is_finite() {
            break;
        }
        x -= d;
    }
    x
}

/// `Nb / (Ng + Nb)`; zero for an empty frame.
pub fn rate_efficiency(burst_len: usize, guard_len: usize) -> f64 {
    if burst_len + guard_len == 0 {
        0.0
    } else {
        burst_len as f64 / (burst_len + guard_len) as f64
    }
}

/// Gray-demaps both index sequences and counts differing bits. Returns `(errors, bits)`.
pub fn count_bit_errors(tx: &[usize], rx: &[usize], alphabet: &QamAlphabet) -> Result<(u64, u64)> {
    if tx.len() != rx.len() {
        return Err(NfdmError::InvalidInput(format!("{} transmitted vs {} detected symbols", tx.len(), rx.len())));
    }
    if let Some(&bad) = tx.iter().chain(rx).find(|&&i| i >= alphabet.order()) {
        return Err(NfdmError::InvalidInput(format!("symbol index {bad} outside the alphabet")));
    }
    let a = demap_indices(tx, alphabet);
    let b = demap_indices(rx, alphabet);
    let errors = a.iter().zip(&b).filter(|(x, y)| x != y).count() as u64;
    Ok((errors, a.len() as u64))
}

/// Error counts merged across frames.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ErrorTally {
    pub frames: u64,
    pub bit_errors: u64,
    pub bits: u64,
}

impl ErrorTally {
    pub fn add_frame(&mut self, errors: u64, bits: u64) {
        self.frames += 1;
        self.bit_errors += errors;
        self.bits += bits;
    }

    pub fn merge(self, other: ErrorTally) -> ErrorTally {
        ErrorTally {
            frames: self.frames + other.frames,
            bit_errors: self.bit_errors + other.bit_errors,
            bits: self.bits + other.bits,
        }
    }

    /// Bit error probability folded into `[0, 0.5]`.
    pub fn pb(&self) -> f64 {
        if self.bits == 0 {
            return 0.0;
        }
        let p = self.bit_errors as f64 / self.bits as f64;
        p.min(1.0 - p)
    }
}

/// Why a Monte-Carlo cell stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StopReason {
    Errors,
    FrameCap,
    Invalid,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::Errors => "errors",
            StopReason::FrameCap => "frame_cap",
            StopReason::Invalid => "invalid",
        }
    }
}

/// One `(power, Nb, receiver)` cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub power_dbm: f64,
    pub burst_len: usize,
    pub guard_len: usize,
    pub receiver: String,
    pub frames: u64,
    pub bit_errors: u64,
    pub bits_total: u64,
    pub pb: f64,
    /// `None` when the error count makes Q unmeasurable.
    pub q_db2: Option<f64>,
    pub eta: f64,
    pub seed: u64,
    pub wall_time: f64,
    pub stop: StopReason,
}

pub const CSV_HEADER: &str = "power_dbm,Nb,Ng,receiver,frames,bit_errors,bits_total,Pb,Q_db2,eta,seed,stop";
pub const TIMING_HEADER: &str = "power_dbm,Nb,Ng,receiver,wall_time";

impl ExperimentRecord {
    pub fn new(
        power_dbm: f64,
        burst_len: usize,
        guard_len: usize,
        receiver: &str,
        tally: ErrorTally,
        seed: u64,
        wall_time: f64,
        stop: StopReason,
    ) -> Self {
        let pb = tally.pb();
        Self {
            power_dbm,
            burst_len,
            guard_len,
            receiver: receiver.to_string(),
            frames: tally.frames,
            bit_errors: tally.bit_errors,
            bits_total: tally.bits,
            pb,
            q_db2: if stop == StopReason::Invalid { None } else { qfactor_db2(pb).ok() },
            eta: rate_efficiency(burst_len, guard_len),
            seed,
            wall_time,
            stop,
        }
    }

    pub fn csv_row(&self) -> String {
        let q = self.q_db2.map_or_else(|| "unmeasurable".to_string(), |q| format!("{q:.6}"));
        format!(
            "{:.3},{},{},{},{},{},{},{:.6e},{},{:.6},{},{}",
            self.power_dbm,
            self.burst_len,
            self.guard_len,
            self.receiver,
            self.frames,
            self.bit_errors,
            self.bits_total,
            self.pb,
            q,
            self.eta,
            self.seed,
            self.stop.as_str()
        )
    }

    pub fn timing_row(&self) -> String {
        format!(
            "{:.3},{},{},{},{:.3}",
            self.power_dbm, self.burst_len, self.guard_len, self.receiver, self.wall_time
        )
    }

    /// Canonical ordering key: receiver, Nb, power.
    pub fn sort_key(&self) -> (String, usize, i64) {
        (self.receiver.clone(), self.burst_len, (self.power_dbm * 1000.0).round() as i64)
    }
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

pub fn write_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(records_to_csv(records).as_bytes())?;
    Ok(())
}

pub fn write_timing(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut out = String::from(TIMING_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.timing_row());
    }
    std::fs::write(path, out)?;
    Ok(())
}
