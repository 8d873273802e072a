//! Typical correlations of two-mode Gaussian states.
//!
//! At fixed global and marginal purities the Hilbert–Schmidt measure is
//! uniform in the seralian `Δ` over the interval returned by
//! [`delta_bounds`], and the local-group factor is common to numerator and
//! denominator of every average. Averages over that interval need only a
//! one-dimensional integral in `Δ`.
//!
//! Under the energy constraint `½ tr Σ = E` the local group integral leaves
//! the weight [`energy_weight`] on the marginal purities. The outer integral
//! is carried out in the coordinates `a = 1/μ_A` and
//! `t ∈ [0, 1]`, where `b = 1/μ_B = b_lo(a) + t (b_hi(a) - b_lo(a))`
//! sweeps the physical range at fixed `a`. This keeps the support a
//! rectangle even when it collapses onto the diagonal as `μ → 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlations::{
    classify_region, delta_bounds, entangled_width, proportion_entangled, steerability, DeltaInterval, RegionClass,
};
use crate::covariance::CovMat;
use crate::error::{Error, Result};
use crate::linalg::{direct_sum, rotation, squeezer};
use crate::mcint::{vegas_integrate_multi, ChunkRunner, McEstimate, Serial, VegasConfig};
use crate::quad::integrate;
use crate::standard_form::{cm_from_invariants, InvariantCoords};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Proposals after which the sampler checks its acceptance rate.
const EFFICIENCY_CHECK: usize = 10_000_000;
const MIN_EFFICIENCY: f64 = 1e-6;
const ENVELOPE_MARGIN: f64 = 1.25;

/// `E_N` from `(μ, a, b, Δ)` with the discriminant clamped at zero, which
/// only matters for rounding at the edges of the seralian interval.
fn log_neg_at(d: f64, a: f64, b: f64, delta: f64) -> f64 {
    let dt = 2.0 * a * a + 2.0 * b * b - delta;
    let det = d * d;
    let plus_sq = 0.5 * (dt + (dt * dt - 4.0 * det).max(0.0).sqrt());
    (-0.5 * (det / plus_sq).log2()).max(0.0)
}

/// `∫ E_N dΔ` over the seralian interval. `E_N` vanishes beyond the
/// entanglement threshold, so only `[Δ_min, Δ_thr]` is integrated.
fn logneg_integral(mu: f64, mu_a: f64, mu_b: f64, bounds: &DeltaInterval, tol: f64) -> Result<f64> {
    let w = entangled_width(mu, mu_a, mu_b, bounds);
    if w <= 0.0 {
        return Ok(0.0);
    }
    let (a, b, d) = (1.0 / mu_a, 1.0 / mu_b, 1.0 / mu);
    let f = |t: f64| log_neg_at(d, a, b, bounds.min + t);
    Ok(integrate(f, 0.0, w, tol)?.value)
}

/// Mean logarithmic negativity over the seralian interval at fixed purities.
pub fn mean_logneg_fixed_purities(mu: f64, mu_a: f64, mu_b: f64, quad_tol: f64) -> Result<f64> {
    let bounds = delta_bounds(mu, mu_a, mu_b).ok_or(Error::Domain("purities admit no physical state"))?;
    if bounds.width <= 0.0 {
        return Ok(log_neg_at(1.0 / mu, 1.0 / mu_a, 1.0 / mu_b, bounds.min));
    }
    Ok(logneg_integral(mu, mu_a, mu_b, &bounds, quad_tol * bounds.width)? / bounds.width)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneRow {
    pub mu_a: f64,
    pub mu_b: f64,
    pub class: RegionClass,
    pub prop_entangled: Option<f64>,
    pub mean_en: Option<f64>,
}

fn grid_axis(n: usize) -> impl Iterator<Item = f64> + Clone {
    (1..=n).map(move |i| i as f64 / n as f64)
}

fn plane_row(mu: f64, mu_a: f64, mu_b: f64, quad_tol: f64) -> Result<PlaneRow> {
    let summary = classify_region(mu, mu_a, mu_b);
    let mean_en = match summary.class {
        RegionClass::Unphysical => None,
        RegionClass::AllSeparable => Some(0.0),
        _ => Some(mean_logneg_fixed_purities(mu, mu_a, mu_b, quad_tol)?),
    };
    Ok(PlaneRow { mu_a, mu_b, class: summary.class, prop_entangled: summary.proportion_entangled, mean_en })
}

/// Region class, proportion entangled and mean `E_N` on the grid
/// `μ_A, μ_B ∈ {1/n, 2/n, ..., 1}`, row by row in `μ_A`.
pub fn scan_purity_plane(mu: f64, grid_size: usize, quad_tol: f64) -> Result<Vec<PlaneRow>> {
    check_mu(mu)?;
    let mut rows = Vec::with_capacity(grid_size * grid_size);
    for mu_a in grid_axis(grid_size) {
        for mu_b in grid_axis(grid_size) {
            rows.push(plane_row(mu, mu_a, mu_b, quad_tol)?);
        }
    }
    Ok(rows)
}

/// The diagonal `μ_A = μ_B` of [`scan_purity_plane`].
pub fn scan_purity_cut(mu: f64, grid_size: usize, quad_tol: f64) -> Result<Vec<PlaneRow>> {
    check_mu(mu)?;
    grid_axis(grid_size).map(|m| plane_row(mu, m, m, quad_tol)).collect()
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain("global purity must lie in (0, 1]"))
    }
}

/// `μ⁷/(μ_A² μ_B²) · (E - 1/μ_A - 1/μ_B)₊`, the marginal-purity weight left
/// by the local group integral over the energy shell. Multiplying by the
/// seralian interval length gives the density of `(μ_A, μ_B)`.
pub fn energy_weight(mu: f64, mu_a: f64, mu_b: f64, energy: f64) -> f64 {
    let excess = energy - 1.0 / mu_a - 1.0 / mu_b;
    if excess <= 0.0 {
        return 0.0;
    }
    mu.powi(7) / (mu_a * mu_a * mu_b * mu_b) * excess
}

/// Unnormalized density of `(μ_A, μ_B)` under the energy-constrained
/// measure: [`energy_weight`] times the seralian interval length.
pub fn marginal_purity_density(mu: f64, mu_a: f64, mu_b: f64, energy: f64) -> f64 {
    let w = energy_weight(mu, mu_a, mu_b, energy);
    if w == 0.0 {
        return 0.0;
    }
    delta_bounds(mu, mu_a, mu_b).map_or(0.0, |b| w * b.width)
}

/// Support of the energy-constrained measure in `a = 1/μ_A` and the range of
/// `b = 1/μ_B` at each `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySupport {
    pub mu: f64,
    pub energy: f64,
    pub a_min: f64,
    pub a_max: f64,
}

impl EnergySupport {
    /// Requires `E > 2` and `4/E² < μ < 1`.
    pub fn new(mu: f64, energy: f64) -> Result<Self> {
        if !(energy > 2.0) {
            return Err(Error::Domain("energy must exceed 2"));
        }
        if !(mu < 1.0) {
            return Err(Error::Domain("global purity must be below 1; use the pure-state endpoint"));
        }
        if !(mu > 4.0 / (energy * energy)) {
            return Err(Error::Domain("energy shell is empty for global purity at or below 4/E²"));
        }
        let d = 1.0 / mu;
        let root = (energy * energy - 4.0 * d).sqrt();
        let a_min = (0.5 * (energy - root)).max(1.0);
        let a_max = (0.5 * (energy + root)).min(energy - 1.0).min(0.5 * (energy + d - 1.0));
        if !(a_max > a_min) {
            return Err(Error::Domain("energy shell is empty"));
        }
        Ok(EnergySupport { mu, energy, a_min, a_max })
    }

    /// `[b_lo, b_hi]` at fixed `a`; empty when `b_hi ≤ b_lo`.
    pub fn b_range(&self, a: f64) -> (f64, f64) {
        let d = 1.0 / self.mu;
        let lo = 1.0f64.max(d / a).max(a - (d - 1.0));
        let hi = (a + d - 1.0).min(self.energy - a);
        (lo, hi)
    }

    /// Range of `μ_A` (and by symmetry `μ_B`) over the support.
    pub fn purity_range(&self) -> (f64, f64) {
        (1.0 / self.a_max, (1.0 / self.a_min).min(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Unit,
    Entangled,
    LogNegativity,
    Steerable,
    Steering,
}

/// `∫ f dΔ` over the seralian interval for each observable.
fn seralian_integrals(mu: f64, mu_a: f64, mu_b: f64, observables: &[Observable], tol: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    let Some(bounds) = delta_bounds(mu, mu_a, mu_b) else {
        return;
    };
    let len = bounds.width;
    let g = steerability(&InvariantCoords { mu, mu_a, mu_b, delta: bounds.min });
    for (o, obs) in out.iter_mut().zip(observables) {
        *o = match obs {
            Observable::Unit => len,
            Observable::Entangled => proportion_entangled(mu, mu_a, mu_b, &bounds) * len,
            Observable::LogNegativity => logneg_integral(mu, mu_a, mu_b, &bounds, tol * len).unwrap_or(f64::NAN),
            Observable::Steerable => {
                if g > 0.0 { len } else { 0.0 }
            }
            Observable::Steering => g * len,
        };
    }
}

/// Energy-shell integrand at `(a, t)`: measure weight times the seralian
/// integrals of `observables`.
fn shell_integrand(support: &EnergySupport, observables: &[Observable], tol: f64, a: f64, t: f64, out: &mut [f64]) {
    let (lo, hi) = support.b_range(a);
    if !(hi > lo) {
        out.iter_mut().for_each(|o| *o = 0.0);
        return;
    }
    let b = lo + t * (hi - lo);
    let excess = support.energy - a - b;
    if excess <= 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
        return;
    }
    // dμ_A dμ_B = da db / (a²b²) cancels the 1/(μ_A²μ_B²) of the weight.
    let weight = support.mu.powi(7) * excess * (hi - lo);
    seralian_integrals(support.mu, 1.0 / a, 1.0 / b, observables, tol, out);
    out.iter_mut().for_each(|o| *o *= weight);
}

/// Energy-constrained averages `∫ f dν / ∫ dν` of each observable, with
/// standard errors propagated from the joint VEGAS estimate.
pub fn energy_constrained_ratios_with<R: ChunkRunner>(
    mu: f64,
    energy: f64,
    observables: &[Observable],
    config: &VegasConfig,
    runner: &R,
) -> Result<Vec<McEstimate>> {
    let support = EnergySupport::new(mu, energy)?;
    let mut all = vec![Observable::Unit];
    all.extend_from_slice(observables);
    let n = all.len();
    let f = |x: &[f64], out: &mut [f64]| shell_integrand(&support, &all, DEFAULT_QUAD_TOL, x[0], x[1], out);
    let est = vegas_integrate_multi(f, n, &[(support.a_min, support.a_max), (0.0, 1.0)], config, runner)?;
    Ok((1..n).map(|k| est.ratio(k, 0)).collect())
}

pub fn energy_constrained_ratios(
    mu: f64,
    energy: f64,
    observables: &[Observable],
    config: &VegasConfig,
) -> Result<Vec<McEstimate>> {
    energy_constrained_ratios_with(mu, energy, observables, config, &Serial)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyStats {
    pub prop_entangled: McEstimate,
    pub mean_en: McEstimate,
    pub prop_steerable: McEstimate,
    pub mean_g: McEstimate,
}

const STATS: [Observable; 4] =
    [Observable::Entangled, Observable::LogNegativity, Observable::Steerable, Observable::Steering];

pub fn energy_constrained_stats_with<R: ChunkRunner>(
    mu: f64,
    energy: f64,
    config: &VegasConfig,
    runner: &R,
) -> Result<EnergyStats> {
    let r = energy_constrained_ratios_with(mu, energy, &STATS, config, runner)?;
    Ok(EnergyStats { prop_entangled: r[0], mean_en: r[1], prop_steerable: r[2], mean_g: r[3] })
}

/// Proportions of entangled and steerable states and mean `E_N` and `G`
/// over the energy shell `½ tr Σ = E` at global purity `μ`.
pub fn energy_constrained_stats(mu: f64, energy: f64, config: &VegasConfig) -> Result<EnergyStats> {
    energy_constrained_stats_with(mu, energy, config, &Serial)
}

/// Deterministic counterpart of [`energy_constrained_stats`] by nested
/// adaptive quadrature over `(a, t)`, returned as
/// `[prop_entangled, mean_en, prop_steerable, mean_g]`.
pub fn energy_constrained_stats_quadrature(mu: f64, energy: f64, tol: f64) -> Result<[f64; 4]> {
    let support = EnergySupport::new(mu, energy)?;
    let mut all = vec![Observable::Unit];
    all.extend_from_slice(&STATS);
    let mut totals = [0.0; 5];
    for (k, total) in totals.iter_mut().enumerate() {
        let inner = |a: f64| {
            let mut out = [0.0; 5];
            let g = |t: f64| {
                shell_integrand(&support, &all, DEFAULT_QUAD_TOL, a, t, &mut out);
                out[k]
            };
            integrate(g, 0.0, 1.0, tol).map_or(f64::NAN, |r| r.value)
        };
        *total = integrate(inner, support.a_min, support.a_max, tol)?.value;
    }
    Ok([totals[1] / totals[0], totals[2] / totals[0], totals[3] / totals[0], totals[4] / totals[0]])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointStats {
    pub prop_entangled: f64,
    pub mean_en: f64,
    pub prop_steerable: f64,
    pub mean_g: f64,
}

impl From<EndpointStats> for EnergyStats {
    /// Quadrature values as estimates with zero error.
    fn from(p: EndpointStats) -> Self {
        let exact = |value| McEstimate { value, std_error: 0.0, chi2_per_dof: 0.0, n_evals: 0 };
        EnergyStats {
            prop_entangled: exact(p.prop_entangled),
            mean_en: exact(p.mean_en),
            prop_steerable: exact(p.prop_steerable),
            mean_g: exact(p.mean_g),
        }
    }
}

/// Pure two-mode states on the energy shell, parametrized by the Schmidt
/// parameter `ν ∈ [1, E/2]` with weight `E - 2ν`.
pub fn pure_state_endpoint(energy: f64, quad_tol: f64) -> Result<EndpointStats> {
    if !(energy >= 2.0) {
        return Err(Error::Domain("energy must be at least 2"));
    }
    let hi = 0.5 * energy;
    let norm = (hi - 1.0) * (hi - 1.0);
    if norm <= 0.0 {
        return Ok(EndpointStats { prop_entangled: 0.0, mean_en: 0.0, prop_steerable: 0.0, mean_g: 0.0 });
    }
    let en = |nu: f64| (energy - 2.0 * nu) * -(nu - (nu * nu - 1.0).max(0.0).sqrt()).log2();
    let g = |nu: f64| (energy - 2.0 * nu) * nu.ln();
    let tol = quad_tol * norm;
    Ok(EndpointStats {
        prop_entangled: 1.0,
        mean_en: integrate(en, 1.0, hi, tol)?.value / norm,
        prop_steerable: 1.0,
        mean_g: integrate(g, 1.0, hi, tol)?.value / norm,
    })
}

/// Local symplectic data of a sampled state: `S_X = R(θ) W(w) R(φ)` with
/// `λ = ½(w² + 1/w²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSympSample {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub angles: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySample {
    pub sigma: CovMat,
    pub coords: InvariantCoords,
    pub local: LocalSympSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<EnergySample>,
    pub proposals: usize,
    /// Proposals whose density exceeded the envelope; zero for an exact draw.
    pub envelope_violations: u64,
}

impl SampleSet {
    pub fn acceptance_rate(&self) -> f64 {
        self.samples.len() as f64 / self.proposals as f64
    }
}

/// Maximum of `f` over a box: the best points of a regular grid polished by
/// a shrinking compass search.
fn box_maximum<F: Fn(f64, f64) -> f64>(f: F, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) -> f64 {
    const N: usize = 120;
    let (hx, hy) = ((x1 - x0) / N as f64, (y1 - y0) / N as f64);
    let mut pts: Vec<(f64, f64, f64)> = Vec::with_capacity((N + 1) * (N + 1));
    for i in 0..=N {
        for j in 0..=N {
            let (x, y) = (x0 + i as f64 * hx, y0 + j as f64 * hy);
            pts.push((f(x, y), x, y));
        }
    }
    pts.sort_by(|p, q| q.0.partial_cmp(&p.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut best = pts[0].0;
    for &(v0, xs, ys) in pts.iter().take(8) {
        let (mut v, mut x, mut y) = (v0, xs, ys);
        let (mut sx, mut sy) = (hx, hy);
        while sx > 1e-9 * (x1 - x0) {
            let mut moved = false;
            for (dx, dy) in [(sx, 0.0), (-sx, 0.0), (0.0, sy), (0.0, -sy)] {
                let (nx, ny) = ((x + dx).clamp(x0, x1), (y + dy).clamp(y0, y1));
                let nv = f(nx, ny);
                if nv > v {
                    (v, x, y) = (nv, nx, ny);
                    moved = true;
                }
            }
            if !moved {
                sx *= 0.5;
                sy *= 0.5;
            }
        }
        best = best.max(v);
    }
    best
}

/// Exact draws from the energy-constrained Hilbert–Schmidt ensemble at
/// global purity `μ`.
///
/// `(μ_A, μ_B)` come from rejection against a uniform envelope on the
/// support's bounding box, `Δ` is uniform on its interval, `λ_A` is uniform
/// on the energy segment and the four local rotation angles are uniform.
pub fn sample_energy_constrained(mu: f64, energy: f64, count: usize, seed: u64) -> Result<SampleSet> {
    let support = EnergySupport::new(mu, energy)?;
    let (p_lo, p_hi) = support.purity_range();
    let density = |x: f64, y: f64| marginal_purity_density(mu, x, y, energy);
    let envelope = ENVELOPE_MARGIN * box_maximum(density, (p_lo, p_hi), (p_lo, p_hi));
    if !(envelope > 0.0) {
        return Err(Error::Domain("energy shell carries no weight"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    let (mut proposals, mut violations) = (0usize, 0u64);
    while samples.len() < count {
        proposals += 1;
        if proposals >= EFFICIENCY_CHECK && (samples.len() as f64) < MIN_EFFICIENCY * proposals as f64 {
            return Err(Error::LowEfficiency { accepted: samples.len(), proposed: proposals });
        }
        let mu_a = p_lo + rng.random::<f64>() * (p_hi - p_lo);
        let mu_b = p_lo + rng.random::<f64>() * (p_hi - p_lo);
        let w = density(mu_a, mu_b);
        if w > envelope {
            violations += 1;
        }
        if rng.random::<f64>() * envelope >= w {
            continue;
        }
        let bounds = delta_bounds(mu, mu_a, mu_b).expect("positive density implies a physical interval");
        let coords = InvariantCoords { mu, mu_a, mu_b, delta: bounds.lerp(rng.random::<f64>()) };
        let (a, b) = (1.0 / mu_a, 1.0 / mu_b);
        let lambda_max = mu_a * (energy - b);
        let lambda_a = 1.0 + rng.random::<f64>() * (lambda_max - 1.0);
        let lambda_b = (mu_b * (energy - a * lambda_a)).max(1.0);
        let angles: [f64; 4] = core::array::from_fn(|_| 2.0 * PI * rng.random::<f64>());
        let local = LocalSympSample { lambda_a, lambda_b, angles };
        let sigma = assemble(&coords, &local)?;
        samples.push(EnergySample { sigma, coords, local });
    }
    Ok(SampleSet { samples, proposals, envelope_violations: violations })
}

fn local_symplectic(lambda: f64, theta: f64, phi: f64) -> nalgebra::Matrix2<f64> {
    let w = (lambda + (lambda * lambda - 1.0).max(0.0).sqrt()).sqrt();
    rotation(theta) * squeezer(w) * rotation(phi)
}

/// `Σ = (S_A ⊕ S_B)ᵀ σ_std (S_A ⊕ S_B)`.
fn assemble(coords: &InvariantCoords, local: &LocalSympSample) -> Result<CovMat> {
    let std = cm_from_invariants(coords)?.to_covmat();
    let [t1, t2, t3, t4] = local.angles;
    let s = direct_sum(&local_symplectic(local.lambda_a, t1, t2), &local_symplectic(local.lambda_b, t3, t4));
    CovMat::new(s.transpose() * std.entries() * s)
}
