//! Backward NFT through the right-sided Gelfand-Levitan-Marchenko equation.
//!
//! With the kernel `F(y) = (1/2 pi) integral rho(l) exp(j l y) dl`, the
//! potential at `x` follows from `K(x, .)` on `[x, inf)`:
//!
//! ```text
//! u(y) + integral_x^inf integral_x^inf u(z) conj(F(z + s)) F(s + y) ds dz = conj(F(x + y))
//! q(x) = -2 u(x)
//! ```
//!
//! so `q(x)` only sees `F` on `[2x, inf)`. Each point is one Hermitian
//! positive definite system `(I + B^H B) v = f` on the quadrature nodes
//! `x, x + h, ...`, where `B` is a Hankel matrix built from samples of `F`.
//! The systems are solved independently by conjugate gradients, with
//! FFT-based Hankel products for long tails.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::Fft;

use crate::dsp;
use crate::error::{NfdmError, Result};
use crate::framing::{ComplexEnvelope, TimeGrid, Units};
use crate::nft::spectrum::ContinuousSpectrum;
use crate::C64;

/// Kernel values below this fraction of the peak are treated as zero when
/// trimming the integration range.
const KERNEL_FLOOR: f64 = 1e-13;
/// Above this system size the Hankel products go through the FFT.
const DIRECT_LIMIT: usize = 48;

/// Samples `F(2 t0 + m h)`, `m = 0 .. 2N - 1`, for an NFT-domain grid of `N` points.
#[derive(Debug, Clone)]
pub struct GlmKernel {
    grid: TimeGrid,
    f: Vec<C64>,
    /// Last index with a kernel value above the floor, if any.
    support_end: Option<usize>,
}

impl GlmKernel {
    pub fn new(spec: &ContinuousSpectrum, q_grid: &TimeGrid) -> Result<Self> {
        let lam = spec.lambda();
        let h = q_grid.dt;
        let period = 2.0 * std::f64::consts::PI / (lam.step * h);
        let p = period.round() as usize;
        if ((period - p as f64) / period).abs() > 1e-9 {
            return Err(NfdmError::GridMismatch(format!(
                "lambda step {} and time step {h} are not commensurate",
                lam.step
            )));
        }
        let n_f = 2 * q_grid.len - 1;
        if p < n_f {
            return Err(NfdmError::GridMismatch(format!(
                "lambda step {} too coarse for a {}-point time grid",
                lam.step, q_grid.len
            )));
        }
        let edge = spec.rho()[0].norm().max(spec.rho()[spec.len() - 1].norm());
        let peak = spec.rho().iter().map(|r| r.norm()).fold(0.0, f64::max);
        if edge > 1e-3 * peak {
            log::debug!("reflection coefficient does not decay at the grid edges ({edge:e} of peak {peak:e})");
        }
        let y0 = 2.0 * q_grid.t0;
        let mut buf = vec![C64::new(0.0, 0.0); p];
        for (i, &r) in spec.rho().iter().enumerate() {
            buf[i % p] += r * C64::from_polar(1.0, lam.at(i) * y0);
        }
        dsp::inverse_plan(p).process(&mut buf);
        let scale = lam.step / (2.0 * std::f64::consts::PI);
        let f: Vec<C64> = (0..n_f)
            .map(|m| buf[m] * C64::from_polar(scale, lam.min * m as f64 * h))
            .collect();
        Ok(Self::from_samples(*q_grid, f))
    }

    /// Kernel from precomputed samples `F(2 t0 + m h)`; missing tail samples are zero.
    pub fn from_samples(grid: TimeGrid, mut f: Vec<C64>) -> Self {
        f.resize(2 * grid.len - 1, C64::new(0.0, 0.0));
        let peak = dsp::max_abs(&f);
        let support_end = if peak == 0.0 { None } else { f.iter().rposition(|v| v.norm() > KERNEL_FLOOR * peak) };
        Self { grid, f, support_end }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.f
    }
}

/// GLM point solver with a running count of solved points.
#[derive(Debug)]
pub struct GlmSolver {
    tol: f64,
    max_iter: usize,
    point_solves: AtomicU64,
}

impl Default for GlmSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl GlmSolver {
    pub fn new() -> Self {
        Self { tol: 1e-13, max_iter: 1000, point_solves: AtomicU64::new(0) }
    }

    pub fn with_tolerance(tol: f64, max_iter: usize) -> Self {
        Self { tol, max_iter, point_solves: AtomicU64::new(0) }
    }

    /// Number of point solves since construction or the last reset.
    pub fn point_solves(&self) -> u64 {
        self.point_solves.load(Ordering::Relaxed)
    }

    pub fn reset_counter(&self) {
        self.point_solves.store(0, Ordering::Relaxed);
    }

    /// `q` at grid indices `first ..= last`.
    pub fn solve_range(&self, kernel: &GlmKernel, first: usize, last: usize) -> Result<Vec<C64>> {
        if first > last || last >= kernel.grid.len {
            return Err(NfdmError::InvalidInput(format!(
                "index range {first}..={last} outside a grid of {}",
                kernel.grid.len
            )));
        }
        let out = (first..=last).into_par_iter().map(|n| self.solve_point(kernel, n)).collect();
        self.point_solves.fetch_add((last - first + 1) as u64, Ordering::Relaxed);
        out
    }

    /// Full inverse transform onto `q_grid`.
    pub fn bnft(&self, spec: &ContinuousSpectrum, q_grid: &TimeGrid) -> Result<ComplexEnvelope> {
        let kernel = GlmKernel::new(spec, q_grid)?;
        let q = self.solve_range(&kernel, 0, q_grid.len - 1)?;
        ComplexEnvelope::on_grid(q, *q_grid, Units::Normalized)
    }

    /// `q` on the grid points nearest to `[t_start, t_end]`; returns the
    /// index of the first point and the samples.
    pub fn bnft_window(
        &self,
        spec: &ContinuousSpectrum,
        q_grid: &TimeGrid,
        t_start: f64,
        t_end: f64,
    ) -> Result<(usize, Vec<C64>)> {
        if !(t_start <= t_end) {
            return Err(NfdmError::InvalidInput(format!("empty window [{t_start}, {t_end}]")));
        }
        let (first, last) = match (q_grid.nearest_index(t_start), q_grid.nearest_index(t_end)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(NfdmError::InvalidInput(format!(
                    "window [{t_start}, {t_end}] outside the grid [{}, {}]",
                    q_grid.t0,
                    q_grid.end()
                )))
            }
        };
        let kernel = GlmKernel::new(spec, q_grid)?;
        Ok((first, self.solve_range(&kernel, first, last)?))
    }

    fn solve_point(&self, kernel: &GlmKernel, n: usize) -> Result<C64> {
        let grid = &kernel.grid;
        let t = grid.time(n);
        let tail = grid.len - 1 - n;
        let end = match kernel.support_end {
            Some(e) if e >= 2 * n => e,
            _ => return Ok(C64::new(0.0, 0.0)),
        };
        if tail == 0 {
            // zero-length history
            return Ok(-2.0 * kernel.f[2 * n].conj());
        }
        // nodes x_n .. x_{n+j_max}; the kernel vanishes beyond
        let j_max = (end - 2 * n).min(tail);
        let size = j_max + 1;
        let sqw: Vec<f64> = quadrature_weights(size, j_max == tail).into_iter().map(f64::sqrt).collect();
        let g = &kernel.f[2 * n..2 * n + 2 * size - 1];
        let rhs: Vec<C64> = (0..size).map(|i| g[i].conj() * sqw[i]).collect();
        let op = HankelOp::new(g, &sqw, grid.dt);
        let v = conjugate_gradient(&op, &rhs, self.tol, self.max_iter)
            .ok_or_else(|| NfdmError::NumericalFailure { t, reason: "GLM system did not converge".into() })?;
        let q = -2.0 * v[0] / sqw[0];
        if !q.re.is_finite() || !q.im.is_finite() {
            return Err(NfdmError::NumericalFailure { t, reason: "non-finite potential".into() });
        }
        Ok(q)
    }
}

/// Weights of the history integral over `size` nodes: trapezoid with
/// fourth-order Gregory end corrections. The right end is only corrected
/// when it is the grid edge; otherwise the kernel has already vanished there.
fn quadrature_weights(size: usize, closed_right: bool) -> Vec<f64> {
    const GREGORY: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    let mut w = vec![1.0; size];
    if size >= 2 * GREGORY.len() {
        w[..3].copy_from_slice(&GREGORY);
        if closed_right {
            for (i, &g) in GREGORY.iter().enumerate() {
                w[size - 1 - i] = g;
            }
        }
    } else if size > 1 {
        w[0] = 0.5;
        if closed_right {
            w[size - 1] = 0.5;
        }
    }
    w
}

/// `(B z)_i = h sqw_i sum_j g_{i+j} sqw_j z_j`.
struct HankelOp<'a> {
    g: &'a [C64],
    sqw: &'a [f64],
    h: f64,
    fft: Option<FftHankel>,
}

struct FftHankel {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    g_hat: Vec<C64>,
}

impl<'a> HankelOp<'a> {
    fn new(g: &'a [C64], sqw: &'a [f64], h: f64) -> Self {
        let size = sqw.len();
        let fft = (size > DIRECT_LIMIT).then(|| {
            let p = (2 * size - 1).next_power_of_two();
            let forward = dsp::forward_plan(p);
            let inverse = dsp::inverse_plan(p);
            let mut g_hat = vec![C64::new(0.0, 0.0); p];
            g_hat[..g.len()].copy_from_slice(g);
            forward.process(&mut g_hat);
            FftHankel { forward, inverse, g_hat }
        });
        Self { g, sqw, h, fft }
    }

    fn len(&self) -> usize {
        self.sqw.len()
    }

    fn apply(&self, z: &[C64], out: &mut [C64]) {
        let size = self.len();
        match &self.fft {
            None => {
                for i in 0..size {
                    let acc: C64 = (0..size).map(|j| self.g[i + j] * (self.sqw[j] * z[j])).sum();
                    out[i] = acc * (self.h * self.sqw[i]);
                }
            }
            Some(f) => {
                let p = f.g_hat.len();
                let mut buf = vec![C64::new(0.0, 0.0); p];
                for k in 0..size {
                    buf[k] = z[size - 1 - k] * self.sqw[size - 1 - k];
                }
                f.forward.process(&mut buf);
                for (b, gh) in buf.iter_mut().zip(&f.g_hat) {
                    *b *= gh;
                }
                f.inverse.process(&mut buf);
                let scale = self.h / p as f64;
                for i in 0..size {
                    out[i] = buf[i + size - 1] * (scale * self.sqw[i]);
                }
            }
        }
    }

    /// `(I + B^H B) z`; `B` is symmetric, so `B^H y = conj(B conj(y))`.
    fn normal(&self, z: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        self.apply(z, scratch);
        for v in scratch.iter_mut() {
            *v = v.conj();
        }
        self.apply(scratch, out);
        for (o, zi) in out.iter_mut().zip(z) {
            *o = o.conj() + zi;
        }
    }
}

fn conjugate_gradient(op: &HankelOp<'_>, rhs: &[C64], tol: f64, max_iter: usize) -> Option<Vec<C64>> {
    let size = rhs.len();
    let norm = |v: &[C64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>();
    let b2 = norm(rhs);
    if b2 == 0.0 {
        return Some(vec![C64::new(0.0, 0.0); size]);
    }
    let mut scratch = vec![C64::new(0.0, 0.0); size];
    let mut ap = vec![C64::new(0.0, 0.0); size];
    let mut x = rhs.to_vec();
    op.normal(&x, &mut ap, &mut scratch);
    let mut r: Vec<C64> = rhs.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut r2 = norm(&r);
    let target = tol * tol * b2;
    for _ in 0..max_iter {
        if r2 <= target {
            return Some(x);
        }
        op.normal(&p, &mut ap, &mut scratch);
        let pap: f64 = p.iter().zip(&ap).map(|(pi, ai)| (pi.conj() * ai).re).sum();
        if !(pap > 0.0) {
            return None;
        }
        let alpha = r2 / pap;
        for i in 0..size {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let r2_new = norm(&r);
        let beta = r2_new / r2;
        r2 = r2_new;
        for i in 0..size {
            p[i] = r[i] + p[i] * beta;
        }
    }
    (r2 <= target).then_some(x)
}

/// Inverse transform of `spec` onto `q_grid` with a fresh solver.
pub fn bnft_glm(spec: &ContinuousSpectrum, q_grid: &TimeGrid) -> Result<ComplexEnvelope> {
    GlmSolver::new().bnft(spec, q_grid)
}

/// Windowed inverse transform with a fresh solver.
pub fn bnft_windowed(
    spec: &ContinuousSpectrum,
    q_grid: &TimeGrid,
    t_start: f64,
    t_end: f64,
) -> Result<(usize, Vec<C64>)> {
    GlmSolver::new().bnft_window(spec, q_grid, t_start, t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_op(size: usize, seed: u64) -> (Vec<C64>, Vec<f64>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = (0..2 * size - 1).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut w = vec![1.0; size];
        w[0] = 0.5f64.sqrt();
        (g, w)
    }

    #[test]
    fn fft_hankel_matches_direct() {
        for size in [DIRECT_LIMIT + 1, 77, 130] {
            let (g, w) = random_op(size, size as u64);
            let z: Vec<C64> = (0..size).map(|i| C64::new((i as f64).cos(), 0.5)).collect();
            let fast = HankelOp::new(&g, &w, 0.3);
            assert!(fast.fft.is_some());
            let direct = HankelOp { g: &g, sqw: &w, h: 0.3, fft: None };
            let (mut a, mut b) = (vec![C64::new(0.0, 0.0); size], vec![C64::new(0.0, 0.0); size]);
            fast.apply(&z, &mut a);
            direct.apply(&z, &mut b);
            assert!(dsp::relative_l2(&a, &b) < 1e-13);
        }
    }

    #[test]
    fn cg_solves_normal_system() {
        let size = 60;
        let (g, w) = random_op(size, 3);
        let op = HankelOp::new(&g, &w, 0.05);
        let rhs: Vec<C64> = (0..size).map(|i| C64::new(1.0, i as f64 * 0.01)).collect();
        let x = conjugate_gradient(&op, &rhs, 1e-14, 500).unwrap();
        let (mut ax, mut s) = (vec![C64::new(0.0, 0.0); size], vec![C64::new(0.0, 0.0); size]);
        op.normal(&x, &mut ax, &mut s);
        assert!(dsp::relative_l2(&ax, &rhs) < 1e-12);
    }

    #[test]
    fn zero_kernel_gives_zero_and_counts() {
        let grid = TimeGrid::new(-2.0, 0.1, 40).unwrap();
        let kernel = GlmKernel::from_samples(grid, vec![]);
        let solver = GlmSolver::new();
        let q = solver.solve_range(&kernel, 0, 39).unwrap();
        assert!(q.iter().all(|v| v.norm() == 0.0));
        assert_eq!(solver.point_solves(), 40);
        solver.reset_counter();
        assert_eq!(solver.point_solves(), 0);
        assert!(solver.solve_range(&kernel, 5, 40).is_err());
        assert!(solver.solve_range(&kernel, 6, 5).is_err());
    }

    #[test]
    fn last_point_is_linear() {
        let grid = TimeGrid::new(0.0, 0.5, 8).unwrap();
        let f: Vec<C64> = (0..15).map(|m| C64::new(0.1 * m as f64, -0.2)).collect();
        let kernel = GlmKernel::from_samples(grid, f.clone());
        let q = GlmSolver::new().solve_range(&kernel, 7, 7).unwrap()[0];
        assert!((q + 2.0 * f[14].conj()).norm() < 1e-15);
    }
}
