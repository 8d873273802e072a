//! Entanglement and steering of two-mode states.
//!
//! Separability of `1x1`-mode Gaussian states is decided by the partial
//! transpose: the state is entangled iff the smallest symplectic eigenvalue
//! `ν̃₋` of `ΛΣΛ`, `Λ = diag(1, 1, 1, -1)`, is below one.

#[allow(unused_imports)]
use num_traits::Float;

use crate::covariance::CovMat;
use crate::error::{Error, Result};
use crate::standard_form::InvariantCoords;

/// Which expression for the partially transposed seralian `Δ̃` to use.
///
/// `Corrected` is `2/μ_A² + 2/μ_B² - Δ` and agrees with the symplectic
/// spectrum of `ΛΣΛ`. `AsPrinted` is `2/μ_A + 2/μ_B - Δ`, kept only for
/// comparison; it is not dimensionally consistent with `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PptConvention {
    #[default]
    Corrected,
    AsPrinted,
}

/// Symplectic eigenvalues of the partially transposed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptSpectrum {
    pub nu_tilde_minus: f64,
    pub nu_tilde_plus: f64,
}

impl PptSpectrum {
    pub fn is_entangled(&self) -> bool {
        self.nu_tilde_minus < 1.0
    }
}

/// Directional Gaussian steering measures `G^{A→B}` and `G^{B→A}` (natural log).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Steering {
    pub a_to_b: f64,
    pub b_to_a: f64,
}

impl Steering {
    pub fn max(&self) -> f64 {
        self.a_to_b.max(self.b_to_a)
    }

    pub fn is_steerable(&self) -> bool {
        self.max() > 0.0
    }
}

/// Closed interval of admissible seralian values at fixed purities.
///
/// `width` is evaluated in factored form rather than as `max - min`, which
/// loses all precision near pure states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaInterval {
    pub min: f64,
    pub max: f64,
    pub width: f64,
}

impl DeltaInterval {
    pub fn contains(&self, delta: f64) -> bool {
        delta >= self.min && delta <= self.max
    }

    /// Point at fraction `t ∈ [0, 1]` of the interval.
    pub fn lerp(&self, t: f64) -> f64 {
        self.min + t * self.width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionClass {
    Unphysical,
    AllSeparable,
    Coexistence,
    AllEntangled,
}

impl RegionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionClass::Unphysical => "unphysical",
            RegionClass::AllSeparable => "separable",
            RegionClass::Coexistence => "coexistence",
            RegionClass::AllEntangled => "entangled",
        }
    }
}

/// Classification of a point `(μ, μ_A, μ_B)` of the purity space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSummary {
    pub class: RegionClass,
    /// Fraction of the seralian interval on which states are entangled;
    /// `None` when no physical state exists.
    pub proportion_entangled: Option<f64>,
    pub bounds: Option<DeltaInterval>,
}

/// `ΛΣΛ` with `Λ = diag(1, 1, 1, -1)`. An exact involution.
pub fn partial_transpose(sigma: &CovMat) -> Result<CovMat> {
    if sigma.n_modes() != 2 {
        return Err(Error::ModeCount { expected: 2, found: sigma.n_modes() });
    }
    let mut m = sigma.entries().clone();
    for k in 0..4 {
        if k != 3 {
            m[(3, k)] = -m[(3, k)];
            m[(k, 3)] = -m[(k, 3)];
        }
    }
    CovMat::new(m)
}

fn pt_seralian(coords: &InvariantCoords, convention: PptConvention) -> f64 {
    let InvariantCoords { mu_a, mu_b, delta, .. } = *coords;
    match convention {
        PptConvention::Corrected => 2.0 / (mu_a * mu_a) + 2.0 / (mu_b * mu_b) - delta,
        PptConvention::AsPrinted => 2.0 / mu_a + 2.0 / mu_b - delta,
    }
}

pub fn ppt_spectrum(coords: &InvariantCoords) -> Result<PptSpectrum> {
    ppt_spectrum_with(coords, PptConvention::Corrected)
}

/// `2ν̃±² = Δ̃ ± √(Δ̃² - 4/μ²)`. The smaller root is taken from
/// `ν̃₊ν̃₋ = 1/μ` to avoid cancellation.
pub fn ppt_spectrum_with(coords: &InvariantCoords, convention: PptConvention) -> Result<PptSpectrum> {
    let dt = pt_seralian(coords, convention);
    let det = 1.0 / (coords.mu * coords.mu);
    let disc = dt * dt - 4.0 * det;
    if !(dt > 0.0) || disc < -1e-10 * dt * dt {
        return Err(Error::Domain("partially transposed spectrum is not real; coordinates are unphysical"));
    }
    let plus_sq = 0.5 * (dt + disc.max(0.0).sqrt());
    let minus_sq = det / plus_sq;
    Ok(PptSpectrum { nu_tilde_minus: minus_sq.sqrt(), nu_tilde_plus: plus_sq.sqrt() })
}

/// `E_N = max(0, -log₂ ν̃₋)`.
pub fn log_negativity(coords: &InvariantCoords) -> Result<f64> {
    let pt = ppt_spectrum(coords)?;
    Ok((-pt.nu_tilde_minus.log2()).max(0.0))
}

pub fn steering(coords: &InvariantCoords) -> Steering {
    Steering {
        a_to_b: (coords.mu / coords.mu_a).ln().max(0.0),
        b_to_a: (coords.mu / coords.mu_b).ln().max(0.0),
    }
}

/// `G = max(0, ln(μ/μ_A), ln(μ/μ_B))`.
pub fn steerability(coords: &InvariantCoords) -> f64 {
    steering(coords).max()
}

fn in_unit_interval(x: f64) -> bool {
    x > 0.0 && x <= 1.0
}

/// Seralian interval allowed by the bona fide condition at fixed purities.
///
/// Real correlations `c±` with `c±² < ab` exist iff
/// `(a - b)² + 2/μ ≤ Δ ≤ (a + b)² - 2/μ`, and the smaller symplectic
/// eigenvalue is at least one iff `2/μ ≤ Δ ≤ 1 + 1/μ²`. Returns `None` when
/// the intersection is empty.
pub fn delta_bounds(mu: f64, mu_a: f64, mu_b: f64) -> Option<DeltaInterval> {
    if !(in_unit_interval(mu) && in_unit_interval(mu_a) && in_unit_interval(mu_b)) {
        return None;
    }
    let (a, b, d) = (1.0 / mu_a, 1.0 / mu_b, 1.0 / mu);
    let gap = (a - b).abs();
    let width = (4.0 * (a * b - d)).min((d - 1.0 - gap) * (d - 1.0 + gap));
    let scale = a * a + b * b + d * d;
    if width < -1e-13 * scale {
        return None;
    }
    let min = gap * gap + 2.0 * d;
    let max = ((a + b) * (a + b) - 2.0 * d).min(1.0 + d * d).max(min);
    Some(DeltaInterval { min, max, width: width.max(0.0) })
}

/// `Δ_thr = 2/μ_A² + 2/μ_B² - 1 - 1/μ²`; states with `Δ < Δ_thr` are entangled.
pub fn entanglement_threshold(mu: f64, mu_a: f64, mu_b: f64) -> f64 {
    let (a, b, d) = (1.0 / mu_a, 1.0 / mu_b, 1.0 / mu);
    2.0 * a * a + 2.0 * b * b - 1.0 - d * d
}

/// Length of the entangled part `[Δ_min, min(Δ_max, Δ_thr))` of the seralian
/// interval, using `Δ_thr - Δ_min = (a + b)² - (1 + 1/μ)²`.
pub fn entangled_width(mu: f64, mu_a: f64, mu_b: f64, bounds: &DeltaInterval) -> f64 {
    let (a, b, d) = (1.0 / mu_a, 1.0 / mu_b, 1.0 / mu);
    let past_min = (a + b - 1.0 - d) * (a + b + 1.0 + d);
    past_min.clamp(0.0, bounds.width)
}

pub fn proportion_entangled(mu: f64, mu_a: f64, mu_b: f64, bounds: &DeltaInterval) -> f64 {
    let (a, b, d) = (1.0 / mu_a, 1.0 / mu_b, 1.0 / mu);
    if bounds.width > 0.0 {
        entangled_width(mu, mu_a, mu_b, bounds) / bounds.width
    } else if a + b - 1.0 - d > 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn classify_region(mu: f64, mu_a: f64, mu_b: f64) -> RegionSummary {
    let Some(bounds) = delta_bounds(mu, mu_a, mu_b) else {
        return RegionSummary { class: RegionClass::Unphysical, proportion_entangled: None, bounds: None };
    };
    let p = proportion_entangled(mu, mu_a, mu_b, &bounds);
    let class = if p <= 0.0 {
        RegionClass::AllSeparable
    } else if p >= 1.0 {
        RegionClass::AllEntangled
    } else {
        RegionClass::Coexistence
    };
    RegionSummary { class, proportion_entangled: Some(p), bounds: Some(bounds) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard_form::StdForm;
    use approx::assert_abs_diff_eq;

    const SQUEEZED: InvariantCoords = InvariantCoords { mu: 1.0, mu_a: 0.8, mu_b: 0.8, delta: 2.0 };

    #[test]
    fn partial_transpose_flips_c_minus() {
        let f = StdForm::new(2.0, 1.5, 0.8, 0.3);
        let pt = partial_transpose(&f.to_covmat()).unwrap();
        assert_eq!(pt, f.partial_transpose().to_covmat());
        let back = partial_transpose(&pt).unwrap();
        assert_eq!(back, f.to_covmat());
        let diag = CovMat::thermal(&[2.0, 3.0]);
        assert_eq!(partial_transpose(&diag).unwrap(), diag);
    }

    #[test]
    fn ppt_spectrum_examples() {
        let s = ppt_spectrum(&SQUEEZED).unwrap();
        assert_abs_diff_eq!(s.nu_tilde_minus, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.nu_tilde_plus, 2.0, epsilon = 1e-14);

        let th = InvariantCoords { mu: 1.0 / 6.0, mu_a: 0.5, mu_b: 1.0 / 3.0, delta: 13.0 };
        let s = ppt_spectrum(&th).unwrap();
        assert_abs_diff_eq!(s.nu_tilde_minus, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.nu_tilde_plus, 3.0, epsilon = 1e-12);

        let vac = InvariantCoords { mu: 1.0, mu_a: 1.0, mu_b: 1.0, delta: 2.0 };
        let s = ppt_spectrum(&vac).unwrap();
        assert_eq!((s.nu_tilde_minus, s.nu_tilde_plus), (1.0, 1.0));
    }

    #[test]
    fn printed_convention_disagrees_with_matrix() {
        // 2/0.8 + 2/0.8 - 2 = 3, so ν̃₋² = (3 - √5)/2 instead of 1/4.
        let s = ppt_spectrum_with(&SQUEEZED, PptConvention::AsPrinted).unwrap();
        assert_abs_diff_eq!(s.nu_tilde_minus * s.nu_tilde_minus, (3.0 - 5.0f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert!((s.nu_tilde_minus - 0.5).abs() > 0.1);
    }

    #[test]
    fn log_negativity_examples() {
        assert_abs_diff_eq!(log_negativity(&SQUEEZED).unwrap(), 1.0, epsilon = 1e-14);
        let th = StdForm::thermal(2.0, 1.5).invariants();
        assert_eq!(log_negativity(&th).unwrap(), 0.0);
        for k in 1..=10 {
            let r = 0.1 * k as f64;
            let coords = StdForm::two_mode_squeezed(r).invariants();
            assert_abs_diff_eq!(log_negativity(&coords).unwrap(), 2.0 * r / core::f64::consts::LN_2, epsilon = 1e-9);
        }
    }

    #[test]
    fn steering_examples() {
        let c = InvariantCoords { mu: 0.5, mu_a: 0.4, mu_b: 0.6, delta: 0.0 };
        assert_abs_diff_eq!(steerability(&c), 1.25f64.ln(), epsilon = 1e-15);
        let st = steering(&c);
        assert_eq!(st.b_to_a, 0.0);
        let none = InvariantCoords { mu: 0.3, mu_a: 0.4, mu_b: 0.6, delta: 0.0 };
        assert_eq!(steerability(&none), 0.0);
        let pure = InvariantCoords { mu: 1.0, mu_a: 0.5, mu_b: 0.5, delta: 0.0 };
        assert_abs_diff_eq!(steerability(&pure), 2.0f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn delta_bounds_examples() {
        let vac = delta_bounds(1.0, 1.0, 1.0).unwrap();
        assert_eq!((vac.min, vac.max, vac.width), (2.0, 2.0, 0.0));
        assert!(delta_bounds(0.5, 0.75, 0.75).is_none());
        let b = delta_bounds(0.5, 0.6, 0.6).unwrap();
        assert_abs_diff_eq!(b.min, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.max, 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.width, 1.0, epsilon = 1e-14);
        assert!(delta_bounds(0.0, 0.5, 0.5).is_none());
        assert!(delta_bounds(0.5, 1.2, 0.5).is_none());
    }

    #[test]
    fn region_examples() {
        assert_eq!(classify_region(0.5, 0.75, 0.75).class, RegionClass::Unphysical);
        let pure = classify_region(1.0, 0.8, 0.8);
        assert_eq!(pure.class, RegionClass::AllEntangled);
        assert_eq!(pure.proportion_entangled, Some(1.0));
        assert_eq!(classify_region(1.0, 1.0, 1.0).class, RegionClass::AllSeparable);
        // a = b = 1/0.65: Δ ∈ [4, 5], threshold 4a² - 5.
        let c = classify_region(0.5, 0.65, 0.65);
        assert_eq!(c.class, RegionClass::Coexistence);
        let a = 1.0 / 0.65;
        assert_abs_diff_eq!(c.proportion_entangled.unwrap(), 4.0 * a * a - 9.0, epsilon = 1e-12);
        assert_eq!(classify_region(0.5, 0.68, 0.68).class, RegionClass::AllSeparable);
    }

    #[test]
    fn threshold_matches_ppt_spectrum() {
        let (mu, ma, mb) = (0.4, 0.55, 0.6);
        let thr = entanglement_threshold(mu, ma, mb);
        let at = |delta| ppt_spectrum(&InvariantCoords { mu, mu_a: ma, mu_b: mb, delta }).unwrap().nu_tilde_minus;
        assert_abs_diff_eq!(at(thr), 1.0, epsilon = 1e-12);
        assert!(at(thr - 0.01) < 1.0);
        assert!(at(thr + 0.01) > 1.0);
    }
}
