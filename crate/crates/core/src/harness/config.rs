//! Experiment configuration: flat `key = value` text grouped by `[section]`.
//!
//! ```text
//! [link]
//! link_length = 400e3      # m
//! noise_on = on
//!
//! [sweep]
//! power_dbm = -8:1:0       # inclusive range start:step:end
//! burst_len = 8, 16, 32, 64
//! receivers = fnft, df-bnft, edc, dbp
//! ```
//!
//! Every key is addressed as `section.key` on the command line. Quantities
//! are in SI units unless the key name says otherwise.

use std::fmt;
use std::path::Path;

use crate::error::{NfdmError, Result};
use crate::framing::SystemConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReceiverKind {
    Fnft,
    DfBnft,
    Edc,
    Dbp,
}

impl ReceiverKind {
    pub const ALL: [ReceiverKind; 4] = [ReceiverKind::Fnft, ReceiverKind::DfBnft, ReceiverKind::Edc, ReceiverKind::Dbp];

    pub fn tag(&self) -> &'static str {
        match self {
            ReceiverKind::Fnft => "fnft",
            ReceiverKind::DfBnft => "df-bnft",
            ReceiverKind::Edc => "edc",
            ReceiverKind::Dbp => "dbp",
        }
    }

    /// Whether the receiver works on the NFDM transmit chain.
    pub fn is_nfdm(&self) -> bool {
        matches!(self, ReceiverKind::Fnft | ReceiverKind::DfBnft)
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.tag() == s)
    }
}

impl fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub powers_dbm: Vec<f64>,
    pub burst_lens: Vec<usize>,
    pub receivers: Vec<ReceiverKind>,
    /// Bit errors after which a cell stops.
    pub min_errors: u64,
    pub frame_cap: u64,
}

impl ExperimentConfig {
    /// The shipped desk-scale sweep.
    pub fn desk_scale() -> Self {
        Self {
            system: SystemConfig::desk_scale(),
            powers_dbm: (-8..=0).map(f64::from).collect(),
            burst_lens: vec![8, 16, 32, 64],
            receivers: ReceiverKind::ALL.to_vec(),
            min_errors: 100,
            frame_cap: 2000,
        }
    }

    /// System parameters of one sweep cell.
    pub fn cell(&self, burst_len: usize, power_dbm: f64) -> SystemConfig {
        SystemConfig { burst_len, power_dbm, ..self.system.clone() }
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        if self.powers_dbm.is_empty() || self.burst_lens.is_empty() || self.receivers.is_empty() {
            return Err(NfdmError::Config("sweep needs at least one power, burst length and receiver".into()));
        }
        if self.frame_cap == 0 {
            return Err(NfdmError::Config("frame_cap must be at least 1".into()));
        }
        let mut warnings = Vec::new();
        for &nb in &self.burst_lens {
            for &p in &self.powers_dbm {
                for w in self.cell(nb, p).validate()? {
                    if !warnings.contains(&w) {
                        warnings.push(w);
                    }
                }
            }
        }
        Ok(warnings)
    }

    pub fn from_file(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NfdmError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string(), overrides)
    }

    /// Parse `text` on top of the desk-scale defaults, then apply
    /// `section.key=value` overrides. `origin` prefixes the diagnostics.
    pub fn parse(text: &str, origin: &str, overrides: &[String]) -> Result<Self> {
        let mut cfg = Self::desk_scale();
        let mut seen: Vec<String> = Vec::new();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let at = |msg: String| NfdmError::Config(format!("{origin}:{}: {msg}", n + 1));
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| at(format!("malformed section header `{line}`")))?;
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(at(format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            if section.is_empty() {
                return Err(at("key outside of any section".into()));
            }
            let full = format!("{section}.{}", key.trim());
            if seen.contains(&full) {
                return Err(at(format!("duplicate key `{full}`")));
            }
            cfg.set(&full, value.trim()).map_err(|e| at(e))?;
            seen.push(full);
        }
        for o in overrides {
            let (key, value) =
                o.split_once('=').ok_or_else(|| NfdmError::Config(format!("--set {o}: expected section.key=value")))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| NfdmError::Config(format!("--set {o}: {e}")))?;
        }
        Ok(cfg)
    }

    /// Assign one `section.key`.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let s = &mut self.system;
        match key {
            "link.symbol_rate" => s.symbol_rate = float(value)?,
            "link.link_length" => s.link_length = float(value)?,
            "link.beta2" => s.beta2 = float(value)?,
            "link.alpha" => s.alpha = float(value)?,
            "link.gamma" => s.gamma = float(value)?,
            "link.eta_sp" => s.eta_sp = float(value)?,
            "link.carrier_frequency" => s.carrier_frequency = float(value)?,
            "link.dac_bandwidth" => s.dac_bandwidth = float(value)?,
            "link.nz" => s.nz = int(value)?,
            "link.noise_on" => s.noise_on = boolean(value)?,
            "frame.burst_len" => {
                s.burst_len = int(value)?;
                self.burst_lens = vec![s.burst_len];
            }
            "frame.guard_len" => s.guard_len = int(value)?,
            "frame.samples_per_symbol" => s.samples_per_symbol = int(value)?,
            "frame.pulse_rms_width" => s.pulse_rms_width = float(value)?,
            "frame.qam_order" => s.qam_order = int(value)?,
            "frame.power_dbm" => {
                s.power_dbm = float(value)?;
                self.powers_dbm = vec![s.power_dbm];
            }
            "run.seed" => s.seed = int(value)?,
            "run.min_errors" => self.min_errors = int(value)?,
            "run.frame_cap" => self.frame_cap = int(value)?,
            "sweep.power_dbm" => self.powers_dbm = float_list(value)?,
            "sweep.burst_len" => {
                self.burst_lens = float_list(value)?
                    .into_iter()
                    .map(|v| if v >= 1.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(format!("invalid burst length {v}")) })
                    .collect::<std::result::Result<_, _>>()?
            }
            "sweep.receivers" => {
                self.receivers = value
                    .split(',')
                    .map(|r| ReceiverKind::parse(r.trim()).ok_or_else(|| format!("unknown receiver `{}`", r.trim())))
                    .collect::<std::result::Result<_, _>>()?
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }
}

const SECTIONS: [&str; 4] = ["link", "frame", "run", "sweep"];

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn float(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("expected a number, got `{v}`"))
}

fn int<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

fn boolean(v: &str) -> std::result::Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "on" | "true" | "yes" => Ok(true),
        "0" | "off" | "false" | "no" => Ok(false),
        _ => Err(format!("expected on/off, got `{v}`")),
    }
}

/// Comma-separated numbers and inclusive `start:step:end` ranges.
fn float_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(float(x)?),
            [a, step, b] => {
                let (a, step, b) = (float(a)?, float(step)?, float(b)?);
                if !(step > 0.0) || b < a {
                    return Err(format!("invalid range `{item}`"));
                }
                let n = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=n).map(|i| a + i as f64 * step));
            }
            _ => return Err(format!("invalid list item `{item}`")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
# desk run
[link]
link_length = 200e3   ; shorter
noise_on = off

[sweep]
power_dbm = -6:2:0, 1.5
burst_len = 8, 16
receivers = fnft, dbp

[run]
seed = 7
";

    #[test]
    fn parses_sections_lists_and_ranges() {
        let c = ExperimentConfig::parse(SAMPLE, "t", &[]).unwrap();
        assert_eq!(c.system.link_length, 200e3);
        assert!(!c.system.noise_on);
        assert_eq!(c.powers_dbm, vec![-6.0, -4.0, -2.0, 0.0, 1.5]);
        assert_eq!(c.burst_lens, vec![8, 16]);
        assert_eq!(c.receivers, vec![ReceiverKind::Fnft, ReceiverKind::Dbp]);
        assert_eq!(c.system.seed, 7);
        assert_eq!(c.system.guard_len, 400);
    }

    #[test]
    fn overrides_take_precedence() {
        let c = ExperimentConfig::parse(SAMPLE, "t", &["run.seed=9".into(), "sweep.burst_len = 64".into()]).unwrap();
        assert_eq!(c.system.seed, 9);
        assert_eq!(c.burst_lens, vec![64]);
    }

    #[test]
    fn diagnostics_name_the_line() {
        let bad = "[link]\nnz = 10\nbogus = 3\n";
        let e = ExperimentConfig::parse(bad, "x.conf", &[]).unwrap_err().to_string();
        assert!(e.contains("x.conf:3"), "{e}");
        let e = ExperimentConfig::parse("[link]\nnz = ten\n", "x.conf", &[]).unwrap_err().to_string();
        assert!(e.contains("x.conf:2"), "{e}");
        assert!(ExperimentConfig::parse("nz = 1\n", "x", &[]).is_err());
        assert!(ExperimentConfig::parse("[nope]\n", "x", &[]).is_err());
        assert!(ExperimentConfig::parse("[link]\nnz=1\nnz=2\n", "x", &[]).is_err());
        assert!(ExperimentConfig::parse("", "x", &["link.nz".into()]).is_err());
        assert!(ExperimentConfig::parse("[sweep]\nreceivers = fnft, magic\n", "x", &[]).is_err());
    }

    #[test]
    fn defaults_are_the_desk_sweep() {
        let c = ExperimentConfig::parse("", "x", &[]).unwrap();
        assert_eq!(c, ExperimentConfig::desk_scale());
        assert_eq!(c.powers_dbm.len(), 9);
        assert!(c.validate().is_ok());
    }
}
