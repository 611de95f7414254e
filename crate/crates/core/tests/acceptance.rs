//! Acceptance criteria. Each prints one `criterion N: PASS|FAIL` line.
//!
//! Criteria 1-9 and 11 run in sequence inside one test so that the wall-time
//! fit of criterion 11 is not disturbed by concurrent work. Criterion 10 is a
//! multi-hour Monte-Carlo sweep and only runs with `-- --ignored`.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use nfdm::channel::{dbp, ssfm_propagate, ChannelParams};
use nfdm::framing::{ComplexEnvelope, SystemConfig, TimeGrid, Units, PLANCK};
use nfdm::harness::{demo_causality, frame_symbols, run_experiment, ExperimentConfig, Optimum};
use nfdm::link::Link;
use nfdm::metrics::qfactor_db2;
use nfdm::nft::*;
use nfdm::receivers::{df_bnft_receiver, fnft_receiver};
use nfdm::C64;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn report(n: usize, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|e| outcome(false, format!("panicked: {}", panic_text(&e))));
    line(&format!(
        "criterion {n}: {} ({}; {:.1} s)",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed().as_secs_f64()
    ));
    o.passed
}

/// Written to the process stdout directly so the line survives output capture.
fn line(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

fn panic_text(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
}

fn quiet(cfg: &SystemConfig) -> ChannelParams {
    ChannelParams { noise_on: false, ..ChannelParams::from_config(cfg) }
}

fn physical(grid: TimeGrid, f: impl Fn(f64) -> C64) -> ComplexEnvelope {
    ComplexEnvelope::on_grid((0..grid.len).map(|n| f(grid.time(n))).collect(), grid, Units::Physical).unwrap()
}

fn receiver_spectrum(link: &Link, q: &ComplexEnvelope) -> ContinuousSpectrum {
    let g = link.grid();
    fnft_with(q, &g.lambda, FnftScheme::Magnus4, g.lambda_nyquist()).unwrap()
}

fn c1_satsuma_yajima() -> Outcome {
    let start = Instant::now();
    let dt = 0.01;
    let n = 8000;
    let g = TimeGrid::new(-40.0 + 0.5 * dt, dt, n).unwrap();
    let q = ComplexEnvelope::on_grid(
        (0..n).map(|k| C64::new(0.4 / g.time(k).cosh(), 0.0)).collect(),
        g,
        Units::Normalized,
    )
    .unwrap();
    let lam = LambdaGrid::new(-5.0, 0.05, 201).unwrap();
    let spec = fnft_with(&q, &lam, FnftScheme::Magnus4, f64::INFINITY).unwrap();
    let mut err: f64 = 0.0;
    for i in 0..lam.len {
        let (a, b) = sech_scattering(0.4, lam.at(i));
        err = err.max((spec.a().unwrap()[i] - a).norm());
        err = err.max((spec.rho()[i].norm() - (b / a).norm()).abs());
    }
    let t = start.elapsed().as_secs_f64();
    outcome(err < 1e-4 && t < 10.0, format!("max |error| {err:.2e} on |lambda| <= 5, {t:.2} s"))
}

fn c2_unimodularity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..10u64 {
        let power = -8.0 + 0.8 * case as f64;
        let link = short_link(16, 200, power);
        let symbols = link.symbols(&indices(16, 16, 100 + case));
        let q = smooth_burst(link.grid().q, &symbols, 0.2, link.amplitude(), -1.0);
        worst = worst.max(receiver_spectrum(&link, &q).unimodularity_defect().unwrap());
    }
    let t = start.elapsed().as_secs_f64();
    outcome(worst < 1e-6 && t < 30.0, format!("worst defect {worst:.2e} over 10 bursts, {t:.1} s"))
}

fn c3_c4_round_trip_and_energy() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut rt: Vec<String> = Vec::new();
    let mut en: Vec<String> = Vec::new();
    let (mut rt_ok, mut en_ok) = (true, true);
    for p in [-6.0, -4.0, -2.0] {
        let link = short_link(16, 200, p);
        let symbols = link.symbols(&indices(16, 16, 5));
        let q = smooth_burst(link.grid().q, &symbols, 0.2, link.amplitude(), -1.0);
        let spec = receiver_spectrum(&link, &q);
        let back = bnft_glm(&spec, &link.grid().q).unwrap();
        let e = rel_l2(back.samples(), q.samples());
        rt_ok &= e < 1e-3;
        rt.push(format!("{p} dBm {e:.2e}"));
        let d = (spec.energy() / q.energy() - 1.0).abs();
        en_ok &= d < 5e-3;
        en.push(format!("{p} dBm {:.3}%", 100.0 * d));
    }
    let t = start.elapsed().as_secs_f64();
    (
        outcome(rt_ok && t < 300.0, format!("relative L2 {}, {t:.1} s", rt.join(", "))),
        outcome(en_ok, format!("energy mismatch {}", en.join(", "))),
    )
}

fn c5_causality() -> Outcome {
    let start = Instant::now();
    let demo = demo_causality(&SystemConfig::desk_scale()).unwrap();
    let t = start.elapsed().as_secs_f64();
    outcome(
        demo.deviation_after < 1e-3 && demo.deviation_before > 1e-2 && t < 60.0,
        format!(
            "after -t6 = {}: {:.2e}, before: {:.2e}",
            demo.boundary, demo.deviation_after, demo.deviation_before
        ),
    )
}

fn c6_channel_oracles() -> Outcome {
    let start = Instant::now();
    let desk = SystemConfig::desk_scale();

    // (a) linear Gaussian dispersion
    let p = ChannelParams { gamma: 0.0, nz: 10, ..quiet(&desk) };
    let t0 = 20e-12;
    let grid = TimeGrid::new(-4096e-12, 1e-12, 8192).unwrap();
    let q0 = physical(grid, |t| C64::new((-t * t / (2.0 * t0 * t0)).exp(), 0.0));
    let out = ssfm_propagate(&q0, &p).unwrap();
    let c = C64::new(t0 * t0, -p.beta2 * p.length);
    let exact: Vec<C64> =
        (0..grid.len).map(|n| (C64::new(t0 * t0, 0.0) / c).sqrt() * (-(grid.time(n).powi(2)) / (2.0 * c)).exp()).collect();
    let a = rel_l2(out.samples(), &exact);

    // (b) pure self-phase modulation
    let p = ChannelParams { beta2: 0.0, nz: 37, ..quiet(&desk) };
    let grid = TimeGrid::new(-100e-12, 1e-12, 200).unwrap();
    let q0 = physical(grid, |t| C64::new(0.1 * (-(t / 20e-12).powi(2)).exp(), 0.0));
    let out = ssfm_propagate(&q0, &p).unwrap();
    let b = out
        .samples()
        .iter()
        .zip(q0.samples())
        .map(|(x, y)| (x - y * C64::from_polar(1.0, p.gamma * y.norm_sqr() * p.length)).norm())
        .fold(0.0, f64::max);

    // (c) fundamental soliton over the long-haul link
    let long = SystemConfig::long_haul();
    let p = quiet(&long);
    let t0 = 50e-12;
    let peak = (p.beta2.abs() / (p.gamma * t0 * t0)).sqrt();
    let grid = TimeGrid::new(-2048e-12, 4e-12, 1024).unwrap();
    let q0 = physical(grid, |t| C64::new(peak / (t / t0).cosh(), 0.0));
    let out = ssfm_propagate(&q0, &p).unwrap();
    let mags = |q: &ComplexEnvelope| q.samples().iter().map(|v| C64::new(v.norm(), 0.0)).collect::<Vec<_>>();
    let soliton = rel_l2(&mags(&out), &mags(&q0));

    // (d) backpropagation of a noiseless 16-QAM frame
    let cfg = SystemConfig { power_dbm: 0.0, noise_on: false, ..desk };
    let link = Link::new(&cfg).unwrap();
    let tx = link.conventional_transmit(&indices(16, 16, 9)).unwrap();
    let p = quiet(&cfg);
    let back = dbp(&ssfm_propagate(&tx, &p).unwrap(), &p).unwrap();
    let nmse = rel_l2(back.samples(), tx.samples()).powi(2);

    let t = start.elapsed().as_secs_f64();
    outcome(
        a < 1e-6 && b < 1e-12 && soliton < 1e-3 && nmse < 1e-4 && t < 300.0,
        format!("(a) {a:.1e} (b) {b:.1e} (c) {soliton:.1e} (d) NMSE {nmse:.1e}"),
    )
}

fn c7_noise() -> Outcome {
    let cfg = SystemConfig::desk_scale();
    let p = ChannelParams { nz: 50, seed: 11, ..ChannelParams::from_config(&cfg) };
    let dt = 1.25e-12;
    let grid = TimeGrid::new(0.0, dt, 1 << 16).unwrap();
    let out = ssfm_propagate(&ComplexEnvelope::zeros(grid, Units::Physical), &p).unwrap();
    let var = out.samples().iter().map(|v| v.norm_sqr()).sum::<f64>() / grid.len as f64;
    let expect = p.eta_sp * PLANCK * cfg.carrier_frequency * p.alpha * p.length / dt;
    let d = var / expect - 1.0;
    outcome(d.abs() < 0.02, format!("variance off by {:+.2}% over {} samples", 100.0 * d, grid.len))
}

fn c8_loopback() -> Outcome {
    let start = Instant::now();
    let cfg = SystemConfig { burst_len: 16, power_dbm: -4.0, noise_on: false, ..SystemConfig::desk_scale() };
    let link = Link::new(&cfg).unwrap();
    let idx = frame_symbols(cfg.seed, 16, 0, 16);
    let rx = ssfm_propagate(&link.nfdm_transmit(&idx).unwrap(), &quiet(&cfg)).unwrap();
    let q = link.nfdm_receive(&rx).unwrap();
    let count = |d: &[usize]| d.iter().zip(&idx).filter(|(a, b)| a != b).count();
    let f = count(&fnft_receiver(&q, &link).unwrap().decided);
    let d = count(&df_bnft_receiver(&q, &link).unwrap().decided);
    let t = start.elapsed().as_secs_f64();
    outcome(f == 0 && d == 0 && t < 600.0, format!("symbol errors: FNFT {f}, DF-BNFT {d} over {} km", cfg.link_length / 1e3))
}

fn c9_qfactor() -> Outcome {
    // oracle: bisection of the series/continued-fraction erfc
    let oracle = |pb: f64| {
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if erfc(mid) > 2.0 * pb {
                lo = mid
            } else {
                hi = mid
            }
        }
        20.0 * (std::f64::consts::SQRT_2 * lo).log10()
    };
    let mut worst: f64 = 0.0;
    let mut vals = Vec::new();
    for pb in [0.158655, 0.022750] {
        let q = qfactor_db2(pb).unwrap();
        worst = worst.max((q - oracle(pb)).abs());
        vals.push(format!("Pb {pb} -> {q:.6} dB"));
    }
    outcome(worst < 1e-6, format!("{}; max deviation {worst:.1e} dB", vals.join(", ")))
}

fn c11_complexity() -> Outcome {
    let mut counts_ok = true;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for nb in [8usize, 16, 32, 64] {
        let cfg = SystemConfig { burst_len: nb, power_dbm: -4.0, noise_on: false, ..SystemConfig::desk_scale() };
        let link = Link::new(&cfg).unwrap();
        let q = bnft_glm(&link.spectrum(&frame_symbols(1, nb, 0, 16), 0.0).unwrap(), &link.grid().q).unwrap();
        let points: usize = (0..nb)
            .map(|k| {
                let (a, b) = link.layout().window_indices(k).unwrap();
                b - a + 1
            })
            .sum();
        link.solver().reset_counter();
        let d = df_bnft_receiver(&q, &link).unwrap();
        let expected = (16 * points) as f64;
        counts_ok &= (link.solver().point_solves() as f64 / expected - 1.0).abs() <= 0.05;
        xs.push(nb as f64);
        ys.push(d.elapsed.as_secs_f64());
    }
    let r2 = r_squared(&xs, &ys);
    let times: Vec<String> = xs.iter().zip(&ys).map(|(x, y)| format!("Nb {x}: {y:.2} s")).collect();
    outcome(counts_ok && r2 > 0.95, format!("solve counts exact: {counts_ok}; {}; R^2 {r2:.4}", times.join(", ")))
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

#[test]
fn acceptance() {
    let mut all = true;
    all &= report(1, c1_satsuma_yajima);
    all &= report(2, c2_unimodularity);
    let (rt, en) = c3_c4_round_trip_and_energy();
    all &= report(3, || rt);
    all &= report(4, || en);
    all &= report(5, c5_causality);
    all &= report(6, c6_channel_oracles);
    all &= report(7, c7_noise);
    all &= report(8, c8_loopback);
    all &= report(9, c9_qfactor);
    line("criterion 10: NOT RUN (multi-hour sweep; cargo test --release --test acceptance -- --ignored criterion_10)");
    all &= report(11, c11_complexity);
    assert!(all, "acceptance criteria failed");
}

fn best(summary: &[Optimum], receiver: &str, nb: usize) -> Option<f64> {
    summary.iter().find(|o| o.receiver == receiver && o.burst_len == nb).and_then(|o| o.best.map(|(_, q)| q))
}

#[test]
#[ignore = "desk-scale Monte-Carlo sweep over three seeds; hours of CPU time"]
fn criterion_10_trend() {
    let passed = report(10, || {
        let mut notes = Vec::new();
        let mut ok = true;
        for seed in [1u64, 2, 3] {
            let mut cfg = ExperimentConfig::desk_scale();
            cfg.system.seed = seed;
            let out = run_experiment(&cfg).unwrap();
            let get = |rx: &str, nb: usize| best(&out.summary, rx, nb);
            let (df64, f64_) = (get("df-bnft", 64), get("fnft", 64));
            let ordering = matches!((df64, f64_), (Some(a), Some(b)) if a > b);
            let degrade = ["fnft", "df-bnft"]
                .iter()
                .all(|rx| matches!((get(rx, 64), get(rx, 8)), (Some(a), Some(b)) if a < b));
            ok &= ordering && degrade;
            notes.push(format!(
                "seed {seed}: Q64 df-bnft {df64:?} fnft {f64_:?}, Q8 df-bnft {:?} fnft {:?}",
                get("df-bnft", 8),
                get("fnft", 8)
            ));
        }
        outcome(ok, notes.join("; "))
    });
    assert!(passed);
}
