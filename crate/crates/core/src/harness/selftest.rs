//! Fast invariant checks runnable from the command line.

use std::time::Instant;

use crate::channel::{dbp, ssfm_propagate, ChannelParams};
use crate::dsp::relative_l2;
use crate::error::Result;
use crate::framing::{ComplexEnvelope, QamAlphabet, SystemConfig, TimeGrid, Units};
use crate::harness::causality::causality_waveforms;
use crate::link::Link;
use crate::metrics::{count_bit_errors, qfactor_db2};
use crate::nft::{fnft_continuous, fnft_with, nis_decode, nis_encode, precompensate, propagate_spectrum, FnftScheme, LambdaGrid};
use crate::C64;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 9] = [
    ("qfactor erfc oracle", qfactor),
    ("gray neighbours differ in one bit", gray),
    ("rectangle scattering closed form", rectangle),
    ("unimodularity on the real axis", unimodular),
    ("nis encode/decode round trip", nis_round_trip),
    ("precompensation inverse", precompensation),
    ("spm phase exact for beta2 = 0", spm),
    ("dbp inverts noiseless ssfm", backpropagation),
    ("inverse nft causality", causality),
];

/// Run every check, timing each one. Errors count as failures.
pub fn run_selftest() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, check)| {
            let start = Instant::now();
            let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckOutcome { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

fn qfactor() -> Result<(bool, String)> {
    let q0 = qfactor_db2(0.158_655_253_931_457_05)?;
    let q6 = qfactor_db2(0.022_750_131_948_179_21)?;
    let err = q0.abs().max((q6 - 20.0 * 2f64.log10()).abs());
    Ok((err < 1e-6, format!("max error {err:.2e} dB")))
}

fn gray() -> Result<(bool, String)> {
    let a = QamAlphabet::square(16)?;
    let d = a.min_distance();
    let mut pairs = 0;
    for i in 0..16 {
        for j in 0..16 {
            if i != j && ((a.point(i) - a.point(j)).norm() - d).abs() < 1e-9 {
                pairs += 1;
                if count_bit_errors(&[i], &[j], &a)?.0 != 1 {
                    return Ok((false, format!("symbols {i} and {j}")));
                }
            }
        }
    }
    Ok((pairs == 48, format!("{pairs} ordered neighbour pairs")))
}

fn gaussian_burst(dt: f64, n: usize, amp: f64) -> Result<ComplexEnvelope> {
    let g = TimeGrid::new(-(n as f64) * dt / 2.0, dt, n)?;
    let s = (0..n)
        .map(|k| {
            let t = g.time(k);
            C64::new(amp, 0.3 * amp * t) * (-t * t / 2.0).exp()
        })
        .collect();
    ComplexEnvelope::on_grid(s, g, Units::Normalized)
}

fn rectangle() -> Result<(bool, String)> {
    let (amp, width, n) = (0.3, 2.0, 200);
    let dt = width / n as f64;
    let g = TimeGrid::new(0.5 * dt, dt, n)?;
    let q = ComplexEnvelope::on_grid(vec![C64::new(amp, 0.0); n], g, Units::Normalized)?;
    let lam = LambdaGrid::new(-3.0, 0.1, 61)?;
    let spec = fnft_continuous(&q, &lam)?;
    let mut err = 0.0f64;
    for i in 0..lam.len {
        let l = lam.at(i);
        let w = (l * l + amp * amp).sqrt();
        let a = C64::new((w * width).cos(), -l * (w * width).sin() / w) * C64::from_polar(1.0, l * width);
        let b = -amp * (w * width).sin() / w * C64::from_polar(1.0, -l * width);
        err = err.max((spec.rho()[i] - b / a).norm());
    }
    Ok((err < 1e-10, format!("max |rho error| {err:.2e}")))
}

fn unimodular() -> Result<(bool, String)> {
    let q = gaussian_burst(0.05, 400, 1.2)?;
    let spec = fnft_with(&q, &LambdaGrid::new(-8.0, 0.05, 321)?, FnftScheme::Magnus4, f64::INFINITY)?;
    let d = spec.unimodularity_defect().unwrap_or(f64::INFINITY);
    Ok((d < 1e-12, format!("max defect {d:.2e}")))
}

fn nis_round_trip() -> Result<(bool, String)> {
    let s = gaussian_burst(0.1, 256, 0.5)?;
    let spec = nis_encode(&s)?;
    let back = nis_decode(&spec, &s.grid())?;
    let e = relative_l2(back.samples(), s.samples());
    Ok((e < 1e-12, format!("relative error {e:.2e}")))
}

fn precompensation() -> Result<(bool, String)> {
    let spec = nis_encode(&gaussian_burst(0.1, 256, 0.5)?)?;
    let back = propagate_spectrum(&precompensate(&spec, 3.7)?, 3.7);
    let e = relative_l2(back.rho(), spec.rho());
    Ok((e < 1e-14, format!("relative error {e:.2e}")))
}

fn spm() -> Result<(bool, String)> {
    let g = TimeGrid::new(-50e-12, 0.5e-12, 200)?;
    let q0: Vec<C64> = (0..g.len).map(|n| C64::new(0.03 * (-(g.time(n) / 10e-12).powi(2)).exp(), 0.0)).collect();
    let q = ComplexEnvelope::on_grid(q0.clone(), g, Units::Physical)?;
    let cfg = SystemConfig { link_length: 100e3, nz: 50, noise_on: false, ..SystemConfig::desk_scale() };
    let p = ChannelParams { beta2: 0.0, ..ChannelParams::from_config(&cfg) };
    let out = ssfm_propagate(&q, &p)?;
    let exact: Vec<C64> = q0.iter().map(|v| v * C64::from_polar(1.0, p.gamma * v.norm_sqr() * p.length)).collect();
    let e = out.samples().iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok((e < 1e-12, format!("max error {e:.2e} sqrt(W)")))
}

fn backpropagation() -> Result<(bool, String)> {
    let cfg = SystemConfig { burst_len: 4, guard_len: 40, link_length: 40e3, nz: 40, noise_on: false, ..SystemConfig::desk_scale() };
    let link = Link::new(&cfg)?;
    let tx = link.conventional_transmit(&[1, 6, 11, 12])?;
    let p = ChannelParams::from_config(&cfg);
    let back = dbp(&ssfm_propagate(&tx, &p)?, &p)?;
    let e = relative_l2(back.samples(), tx.samples()).powi(2);
    Ok((e < 1e-4, format!("nmse {e:.2e}")))
}

fn causality() -> Result<(bool, String)> {
    let cfg = SystemConfig { guard_len: 40, power_dbm: 0.0, ..SystemConfig::desk_scale() };
    let d = causality_waveforms(&cfg, 4, 3)?;
    Ok((
        d.deviation_after < 1e-3 && d.deviation_before > 1e-2,
        format!("after {:.2e}, before {:.2e}", d.deviation_after, d.deviation_before),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
