//! Oracles shared by the integration tests. Nothing here calls into the
//! code under test except for grid and envelope construction.
#![allow(dead_code)]

use std::f64::consts::PI;

use nfdm::framing::{ComplexEnvelope, SystemConfig, TimeGrid, Units};
use nfdm::link::Link;
use nfdm::C64;

/// Complex Gamma function (Lanczos, g = 7, n = 9), ~1e-15 relative.
pub fn gamma(z: C64) -> C64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z.re < 0.5 {
        // reflection
        return PI / ((C64::new(PI, 0.0) * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = C64::new(COEF[0], 0.0);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// Scattering data of `q = amp sech(t)` for `v_t = [[-j l, q], [-q*, j l]] v`
/// (Satsuma and Yajima), without discrete spectrum for `amp < 1/2`.
pub fn sech_scattering(amp: f64, lambda: f64) -> (C64, C64) {
    let z = C64::new(0.5, -lambda);
    let a = gamma(z) * gamma(z) / (gamma(z - amp) * gamma(z + amp));
    let b = C64::new(-(PI * amp).sin() / (PI * lambda).cosh(), 0.0);
    (a, b)
}

/// `erfc` by its Maclaurin series (|x| <= 3) or continued fraction.
pub fn erfc(x: f64) -> f64 {
    if x.abs() <= 3.0 {
        // erf(x) = 2/sqrt(pi) sum (-1)^n x^(2n+1) / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        1.0 - 2.0 / PI.sqrt() * sum
    } else if x > 0.0 {
        // Lentz evaluation of exp(x^2) sqrt(pi) erfc(x) = 1/(x+ 1/2/(x+ 1/(x+ 3/2/(x+ ...
        let mut f = x;
        for n in (1..200).rev() {
            f = x + 0.5 * n as f64 / f;
        }
        (-x * x).exp() / PI.sqrt() / f
    } else {
        2.0 - erfc(-x)
    }
}

/// Unit-energy Gaussian of RMS width `sigma`, not truncated.
pub fn gaussian_pulse(t: f64, sigma: f64) -> f64 {
    (PI * sigma * sigma).powf(-0.25) * (-t * t / (2.0 * sigma * sigma)).exp()
}

/// `amp sum_k x_k g(t - direction k)` with smooth Gaussian pulses, sampled
/// on `grid`. Linear-domain bursts run forward in time (`direction = 1`),
/// NFT-domain bursts backward (`-1`).
pub fn smooth_burst(grid: TimeGrid, symbols: &[C64], sigma: f64, amp: f64, direction: f64) -> ComplexEnvelope {
    let s = (0..grid.len)
        .map(|n| {
            let t = grid.time(n);
            symbols
                .iter()
                .enumerate()
                .map(|(k, &x)| x * gaussian_pulse(t - direction * k as f64, sigma))
                .sum::<C64>()
                * amp
        })
        .collect();
    ComplexEnvelope::on_grid(s, grid, Units::Normalized).unwrap()
}

/// Deterministic pseudo-random alphabet indices.
pub fn indices(n: usize, order: usize, seed: u64) -> Vec<usize> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % order as u64) as usize
        })
        .collect()
}

/// Desk-scale link with a short guard, for tests that do not need the full frame.
pub fn short_link(burst_len: usize, guard_len: usize, power_dbm: f64) -> Link {
    let cfg = SystemConfig { burst_len, guard_len, power_dbm, noise_on: false, ..SystemConfig::desk_scale() };
    Link::new(&cfg).unwrap()
}

pub fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
