//! VEGAS adaptive importance sampling over low-dimensional boxes.
//!
//! Each iteration draws a fixed number of points through a separable grid
//! map, estimates the integral and its variance, and refines the grid from
//! the per-bin mean of `(f·J)²`. Iteration estimates are combined by inverse
//! variance weighting and their mutual consistency is reported as `χ²/dof`.
//!
//! Every iteration is split into [`VegasConfig::chunks`] chunks. Chunk `c` of
//! iteration `i` draws from its own ChaCha8 stream `i·chunks + c`, and chunk
//! results are reduced in index order, so estimates depend only on the seed
//! and the configuration, never on how many workers ran the chunks.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const MAX_DIMS: usize = 4;
const MAX_NONFINITE_FRACTION: f64 = 1e-3;
const FLAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub chi2_per_dof: f64,
    pub n_evals: usize,
}

impl McEstimate {
    pub fn relative_error(&self) -> f64 {
        self.std_error / self.value.abs()
    }

    /// `|value - other| / std_error`, combining both errors in quadrature.
    pub fn pull(&self, other: f64, other_err: f64) -> f64 {
        let s = (self.std_error * self.std_error + other_err * other_err).sqrt();
        if s == 0.0 {
            if self.value == other { 0.0 } else { f64::INFINITY }
        } else {
            (self.value - other).abs() / s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VegasConfig {
    pub iterations: usize,
    pub evals_per_iter: usize,
    pub bins: usize,
    /// Grid compression exponent α ∈ (0, 2].
    pub damping: f64,
    pub seed: u64,
    pub chunks: usize,
    /// Leading iterations that only train the grid.
    pub warmup: usize,
}

impl Default for VegasConfig {
    fn default() -> Self {
        VegasConfig { iterations: 10, evals_per_iter: 10_000, bins: 64, damping: 1.5, seed: 0, chunks: 16, warmup: 0 }
    }
}

impl VegasConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        VegasConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations <= self.warmup {
            return Err(Error::InvalidConfig("need at least one iteration after warmup"));
        }
        if self.chunks == 0 || self.evals_per_iter < 2 * self.chunks {
            return Err(Error::InvalidConfig("need at least two evaluations per chunk"));
        }
        if self.bins < 2 {
            return Err(Error::InvalidConfig("need at least two grid bins"));
        }
        if !(self.damping > 0.0 && self.damping <= 2.0) {
            return Err(Error::InvalidConfig("damping must lie in (0, 2]"));
        }
        Ok(())
    }

    pub fn total_evals(&self) -> usize {
        self.iterations * self.evals_per_iter
    }
}

/// Runs independent chunks of work and returns their results in index order.
pub trait ChunkRunner {
    fn run_chunks<T, F>(&self, n_chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl ChunkRunner for Serial {
    fn run_chunks<T, F>(&self, n_chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..n_chunks).map(job).collect()
    }
}

/// Separable piecewise-linear map of `[0, 1]^d` onto itself.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveGrid {
    edges: Vec<Vec<f64>>,
    damping: f64,
}

impl AdaptiveGrid {
    pub fn uniform(dims: usize, bins: usize, damping: f64) -> Self {
        let axis: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
        AdaptiveGrid { edges: vec![axis; dims], damping }
    }

    pub fn dims(&self) -> usize {
        self.edges.len()
    }

    pub fn bins(&self) -> usize {
        self.edges[0].len() - 1
    }

    pub fn edges(&self, axis: usize) -> &[f64] {
        &self.edges[axis]
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    /// Maps `u` to `x` in place, records the bin of every axis and returns
    /// the Jacobian.
    fn map(&self, u: &[f64], x: &mut [f64], bins: &mut [usize]) -> f64 {
        let nb = self.bins();
        let mut jac = 1.0;
        for (axis, e) in self.edges.iter().enumerate() {
            let scaled = u[axis] * nb as f64;
            let i = (scaled as usize).min(nb - 1);
            let width = e[i + 1] - e[i];
            x[axis] = e[i] + (scaled - i as f64) * width;
            bins[axis] = i;
            jac *= nb as f64 * width;
        }
        jac
    }

    /// Moves the edges so that each bin carries an equal share of the
    /// smoothed, compressed importance `d`. Axes whose importance is flat or
    /// empty are left unchanged.
    pub fn refine(&mut self, importance: &[Vec<f64>]) {
        let alpha = self.damping;
        for (axis, d) in importance.iter().enumerate() {
            let nb = d.len();
            let mut s = vec![0.0; nb];
            s[0] = (7.0 * d[0] + d[1]) / 8.0;
            s[nb - 1] = (d[nb - 2] + 7.0 * d[nb - 1]) / 8.0;
            for i in 1..nb - 1 {
                s[i] = (d[i - 1] + 6.0 * d[i] + d[i + 1]) / 8.0;
            }
            let total: f64 = s.iter().sum();
            let (lo, hi) = s.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if !(total > 0.0) || !total.is_finite() || hi - lo <= FLAT_TOL * hi {
                continue;
            }
            let r: Vec<f64> = s
                .iter()
                .map(|&v| {
                    let x = v / total;
                    if x <= 0.0 {
                        0.0
                    } else if x >= 1.0 {
                        1.0
                    } else {
                        ((x - 1.0) / x.ln()).powf(alpha)
                    }
                })
                .collect();
            if let Some(new) = redistribute(&self.edges[axis], &r) {
                self.edges[axis] = new;
            }
        }
    }
}

fn redistribute(old: &[f64], r: &[f64]) -> Option<Vec<f64>> {
    let nb = r.len();
    let total: f64 = r.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut new = Vec::with_capacity(nb + 1);
    new.push(0.0);
    let (mut acc, mut j) = (0.0, 0);
    for k in 1..nb {
        let target = total * k as f64 / nb as f64;
        while j < nb - 1 && acc + r[j] < target {
            acc += r[j];
            j += 1;
        }
        let frac = if r[j] > 0.0 { ((target - acc) / r[j]).clamp(0.0, 1.0) } else { 0.0 };
        new.push(old[j] + frac * (old[j + 1] - old[j]));
    }
    new.push(1.0);
    if new.windows(2).all(|w| w[1] > w[0]) {
        Some(new)
    } else {
        None
    }
}

/// Multi-component estimate with the covariance of the component means.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiEstimate {
    pub components: Vec<McEstimate>,
    /// Row-major covariance of the combined component means.
    pub covariance: Vec<f64>,
    pub n_evals: usize,
}

impl MultiEstimate {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.covariance[i * self.len() + j]
    }

    /// `I_num / I_den` with a first-order propagated standard error.
    pub fn ratio(&self, num: usize, den: usize) -> McEstimate {
        let (n, d) = (self.components[num].value, self.components[den].value);
        let r = n / d;
        let var = (self.cov(num, num) - 2.0 * r * self.cov(num, den) + r * r * self.cov(den, den)) / (d * d);
        McEstimate {
            value: r,
            std_error: var.max(0.0).sqrt(),
            chi2_per_dof: self.components[num].chi2_per_dof,
            n_evals: self.n_evals,
        }
    }
}

struct ChunkStats {
    n: usize,
    mean: Vec<f64>,
    comoment: Vec<f64>,
    bin_sum: Vec<f64>,
    bin_count: Vec<usize>,
    nonfinite: usize,
}

impl ChunkStats {
    fn new(n_out: usize, cells: usize) -> Self {
        ChunkStats {
            n: 0,
            mean: vec![0.0; n_out],
            comoment: vec![0.0; n_out * n_out],
            bin_sum: vec![0.0; cells],
            bin_count: vec![0; cells],
            nonfinite: 0,
        }
    }

    fn push(&mut self, v: &[f64], delta: &mut [f64]) {
        let k = v.len();
        self.n += 1;
        let n = self.n as f64;
        for i in 0..k {
            delta[i] = v[i] - self.mean[i];
            self.mean[i] += delta[i] / n;
        }
        for i in 0..k {
            for j in 0..k {
                self.comoment[i * k + j] += delta[i] * (v[j] - self.mean[j]);
            }
        }
    }

    fn merge(&mut self, other: &ChunkStats) {
        let k = self.mean.len();
        if other.n > 0 {
            let (na, nb) = (self.n as f64, other.n as f64);
            let n = na + nb;
            let delta: Vec<f64> = (0..k).map(|i| other.mean[i] - self.mean[i]).collect();
            for i in 0..k {
                for j in 0..k {
                    self.comoment[i * k + j] += other.comoment[i * k + j] + delta[i] * delta[j] * na * nb / n;
                }
            }
            for i in 0..k {
                self.mean[i] += delta[i] * nb / n;
            }
            self.n += other.n;
        }
        for (a, b) in self.bin_sum.iter_mut().zip(&other.bin_sum) {
            *a += b;
        }
        for (a, b) in self.bin_count.iter_mut().zip(&other.bin_count) {
            *a += b;
        }
        self.nonfinite += other.nonfinite;
    }
}

fn check_bounds(bounds: &[(f64, f64)]) -> Result<f64> {
    if bounds.is_empty() || bounds.len() > MAX_DIMS {
        return Err(Error::InvalidConfig("integration supports 1 to 4 dimensions"));
    }
    if bounds.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && hi > lo)) {
        return Err(Error::InvalidConfig("integration bounds must be finite with high > low"));
    }
    Ok(bounds.iter().map(|&(lo, hi)| hi - lo).product())
}

#[allow(clippy::too_many_arguments)]
fn run_chunk<F>(
    f: &F,
    n_out: usize,
    grid: &AdaptiveGrid,
    bounds: &[(f64, f64)],
    volume: f64,
    seed: u64,
    stream: u64,
    count: usize,
) -> ChunkStats
where
    F: Fn(&[f64], &mut [f64]),
{
    let dims = bounds.len();
    let nb = grid.bins();
    let mut stats = ChunkStats::new(n_out, dims * nb);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut u = [0.0; MAX_DIMS];
    let mut y = [0.0; MAX_DIMS];
    let mut x = [0.0; MAX_DIMS];
    let mut bins = [0usize; MAX_DIMS];
    let mut out = vec![0.0; n_out];
    let mut delta = vec![0.0; n_out];
    for _ in 0..count {
        for ui in u.iter_mut().take(dims) {
            *ui = rng.random::<f64>();
        }
        let jac = grid.map(&u[..dims], &mut y[..dims], &mut bins[..dims]) * volume;
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            x[axis] = lo + y[axis] * (hi - lo);
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        f(&x[..dims], &mut out);
        if out.iter().any(|o| !o.is_finite()) {
            stats.nonfinite += 1;
            out.iter_mut().for_each(|o| *o = 0.0);
        } else {
            out.iter_mut().for_each(|o| *o *= jac);
        }
        let w = out[0] * out[0];
        for (axis, &b) in bins.iter().take(dims).enumerate() {
            stats.bin_sum[axis * nb + b] += w;
            stats.bin_count[axis * nb + b] += 1;
        }
        stats.push(&out, &mut delta);
    }
    stats
}

struct IterationResult {
    mean: Vec<f64>,
    cov: Vec<f64>,
}

/// Inverse-variance combination weighted by component 0, so that ratios of
/// components share the same weights.
fn combine(iters: &[IterationResult], n_out: usize, n_evals: usize) -> MultiEstimate {
    let exact: Vec<&IterationResult> = iters.iter().filter(|it| it.cov[0] == 0.0).collect();
    let (weights, used): (Vec<f64>, Vec<&IterationResult>) = if exact.is_empty() {
        (iters.iter().map(|it| 1.0 / it.cov[0]).collect(), iters.iter().collect())
    } else {
        (vec![1.0; exact.len()], exact)
    };
    let wsum: f64 = weights.iter().sum();
    let mut mean = vec![0.0; n_out];
    let mut cov = vec![0.0; n_out * n_out];
    for (w, it) in weights.iter().zip(&used) {
        for i in 0..n_out {
            mean[i] += w * it.mean[i];
        }
        for (c, ic) in cov.iter_mut().zip(&it.cov) {
            *c += w * w * ic;
        }
    }
    mean.iter_mut().for_each(|m| *m /= wsum);
    cov.iter_mut().for_each(|c| *c /= wsum * wsum);
    let dof = used.len().saturating_sub(1);
    let components = (0..n_out)
        .map(|i| {
            let chi2 = if dof == 0 {
                0.0
            } else {
                let s: f64 = used
                    .iter()
                    .map(|it| {
                        let var = it.cov[i * n_out + i];
                        let d = it.mean[i] - mean[i];
                        if var > 0.0 { d * d / var } else { 0.0 }
                    })
                    .sum();
                s / dof as f64
            };
            McEstimate { value: mean[i], std_error: cov[i * n_out + i].max(0.0).sqrt(), chi2_per_dof: chi2, n_evals }
        })
        .collect();
    MultiEstimate { components, covariance: cov, n_evals }
}

/// Integrates the `n_out` components written by `f` over the box `bounds`.
/// The grid adapts to component 0.
pub fn vegas_integrate_multi<F, R>(
    f: F,
    n_out: usize,
    bounds: &[(f64, f64)],
    config: &VegasConfig,
    runner: &R,
) -> Result<MultiEstimate>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
    R: ChunkRunner,
{
    config.validate()?;
    if n_out == 0 {
        return Err(Error::InvalidConfig("integrand needs at least one component"));
    }
    let volume = check_bounds(bounds)?;
    let dims = bounds.len();
    let nb = config.bins;
    let mut grid = AdaptiveGrid::uniform(dims, nb, config.damping);
    let chunks = config.chunks;
    let (base, extra) = (config.evals_per_iter / chunks, config.evals_per_iter % chunks);
    let mut results = Vec::with_capacity(config.iterations);
    let (mut total, mut nonfinite) = (0usize, 0usize);
    for iteration in 0..config.iterations {
        let g = &grid;
        let f = &f;
        let parts = runner.run_chunks(chunks, |c| {
            let count = base + usize::from(c < extra);
            let stream = (iteration * chunks + c) as u64;
            run_chunk(f, n_out, g, bounds, volume, config.seed, stream, count)
        });
        let mut acc = ChunkStats::new(n_out, dims * nb);
        for p in &parts {
            acc.merge(p);
        }
        total += acc.n;
        nonfinite += acc.nonfinite;
        if nonfinite as f64 > MAX_NONFINITE_FRACTION * total as f64 {
            return Err(Error::NonFiniteIntegrand { rejected: nonfinite, total });
        }
        let n = acc.n as f64;
        let cov = acc.comoment.iter().map(|m| m / (n * (n - 1.0))).collect();
        if iteration >= config.warmup {
            results.push(IterationResult { mean: acc.mean.clone(), cov });
        }
        if iteration + 1 < config.iterations {
            let importance: Vec<Vec<f64>> = (0..dims)
                .map(|axis| {
                    (0..nb)
                        .map(|b| {
                            let k = axis * nb + b;
                            if acc.bin_count[k] > 0 { acc.bin_sum[k] / acc.bin_count[k] as f64 } else { 0.0 }
                        })
                        .collect()
                })
                .collect();
            grid.refine(&importance);
        }
    }
    Ok(combine(&results, n_out, total))
}

/// Single-component [`vegas_integrate_multi`].
pub fn vegas_integrate_with<F, R>(f: F, bounds: &[(f64, f64)], config: &VegasConfig, runner: &R) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: ChunkRunner,
{
    let multi = vegas_integrate_multi(|x, out: &mut [f64]| out[0] = f(x), 1, bounds, config, runner)?;
    Ok(multi.components[0])
}

/// [`vegas_integrate_with`] on the calling thread.
pub fn vegas_integrate<F>(f: F, bounds: &[(f64, f64)], config: &VegasConfig) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    vegas_integrate_with(f, bounds, config, &Serial)
}

/// Uniform sampling over the box with `n` points.
pub fn plain_integrate<F>(f: F, bounds: &[(f64, f64)], n: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    let volume = check_bounds(bounds)?;
    if n < 2 {
        return Err(Error::InvalidConfig("need at least two evaluations"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = [0.0; MAX_DIMS];
    let dims = bounds.len();
    let (mut mean, mut m2, mut nonfinite) = (0.0, 0.0, 0usize);
    for k in 0..n {
        for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *xi = lo + rng.random::<f64>() * (hi - lo);
        }
        let mut v = f(&x[..dims]);
        if !v.is_finite() {
            nonfinite += 1;
            v = 0.0;
        }
        v *= volume;
        let d = v - mean;
        mean += d / (k + 1) as f64;
        m2 += d * (v - mean);
    }
    if nonfinite as f64 > MAX_NONFINITE_FRACTION * n as f64 {
        return Err(Error::NonFiniteIntegrand { rejected: nonfinite, total: n });
    }
    let var = m2 / (n as f64 * (n as f64 - 1.0));
    Ok(McEstimate { value: mean, std_error: var.max(0.0).sqrt(), chi2_per_dof: 0.0, n_evals: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit2() -> [(f64, f64); 2] {
        [(0.0, 1.0), (0.0, 1.0)]
    }

    #[test]
    fn constant_is_exact() {
        let est = vegas_integrate(|_| 2.5, &unit2(), &VegasConfig::default()).unwrap();
        assert_eq!(est.value, 2.5);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.n_evals, 100_000);
        let plain = plain_integrate(|_| 1.0, &unit2(), 1000, 3).unwrap();
        assert_eq!(plain.value, 1.0);
        assert_eq!(plain.std_error, 0.0);
    }

    #[test]
    fn affine_domain_scales_constant_by_volume() {
        let est = vegas_integrate(|_| 1.0, &[(-1.0, 3.0), (2.0, 2.5)], &VegasConfig::default()).unwrap();
        assert_eq!(est.value, 2.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn separable_polynomial() {
        // ∫∫ (3x² + 1)(2y) = 2 · 1.
        let est = vegas_integrate(|x| (3.0 * x[0] * x[0] + 1.0) * 2.0 * x[1], &unit2(), &VegasConfig::default()).unwrap();
        assert!(est.pull(2.0, 0.0) < 3.0, "{est:?}");
        assert!(est.chi2_per_dof < 2.0);
    }

    #[test]
    fn peaked_integrand_beats_plain() {
        let w = 0.02;
        let f = |x: &[f64]| (-((x[0] - 0.4) / w).powi(2)).exp() * (1.0 + x[1]);
        let exact = w * core::f64::consts::PI.sqrt() * 1.5;
        let cfg = VegasConfig::default();
        let v = vegas_integrate(f, &unit2(), &cfg).unwrap();
        let p = plain_integrate(f, &unit2(), cfg.total_evals(), 1).unwrap();
        assert!(v.pull(exact, 0.0) < 3.0, "{v:?} vs {exact}");
        assert!(p.std_error * p.std_error > 5.0 * v.std_error * v.std_error);
    }

    #[test]
    fn reproducible_and_chunk_independent() {
        let f = |x: &[f64]| (x[0] * 5.0).sin().abs() + x[1];
        let cfg = VegasConfig { seed: 42, ..VegasConfig::default() };
        let a = vegas_integrate(f, &unit2(), &cfg).unwrap();
        let b = vegas_integrate(f, &unit2(), &cfg).unwrap();
        assert_eq!(a, b);
        let c = vegas_integrate(f, &unit2(), &cfg.with_seed(43)).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn grid_stays_monotone_with_fixed_ends() {
        let mut grid = AdaptiveGrid::uniform(1, 8, 1.5);
        grid.refine(&[vec![0.0, 0.0, 5.0, 1.0, 0.0, 0.0, 0.0, 9.0]]);
        let e = grid.edges(0);
        assert_eq!(e[0], 0.0);
        assert_eq!(e[8], 1.0);
        assert!(e.windows(2).all(|w| w[1] > w[0]));
        let before = grid.clone();
        grid.refine(&[vec![1.0; 8]]);
        assert_eq!(grid, before);
    }

    #[test]
    fn identical_components_have_exact_ratio() {
        let f = |x: &[f64], out: &mut [f64]| {
            out[0] = x[0] * x[1] + 0.1;
            out[1] = out[0];
            out[2] = 0.5 * out[0];
        };
        let m = vegas_integrate_multi(f, 3, &unit2(), &VegasConfig::default(), &Serial).unwrap();
        let r = m.ratio(1, 0);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.std_error, 0.0);
        let h = m.ratio(2, 0);
        assert!((h.value - 0.5).abs() < 1e-15);
        assert!(h.std_error < 1e-15);
    }

    #[test]
    fn nonfinite_values_abort() {
        let err = vegas_integrate(|x| if x[0] < 0.01 { f64::NAN } else { 1.0 }, &unit2(), &VegasConfig::default());
        assert!(matches!(err, Err(Error::NonFiniteIntegrand { .. })));
        // A null set of bad points is tolerated.
        let ok = vegas_integrate(|x| if x[0] < 1e-7 { f64::INFINITY } else { 1.0 }, &unit2(), &VegasConfig::default());
        assert!(ok.is_ok());
    }

    #[test]
    fn invalid_configs() {
        let cfg = VegasConfig::default();
        assert!(vegas_integrate(|_| 1.0, &[], &cfg).is_err());
        assert!(vegas_integrate(|_| 1.0, &[(0.0, 1.0); 5], &cfg).is_err());
        assert!(vegas_integrate(|_| 1.0, &[(1.0, 0.0)], &cfg).is_err());
        assert!(vegas_integrate(|_| 1.0, &unit2(), &VegasConfig { damping: 0.0, ..cfg }).is_err());
        assert!(vegas_integrate(|_| 1.0, &unit2(), &VegasConfig { warmup: 10, ..cfg }).is_err());
    }
}
