//! Invariant measures on mixed Gaussian states.
//!
//! Every unitarily invariant volume element factorizes as
//! `P(ν₁, ..., ν_N) dμ(S) dν₁ ... dν_N` with `dμ(S)` the Haar measure on
//! `Sp(2N)`. The densities implemented here share the repulsion factor
//! `∏_{l>m} (ν_l² - ν_m²)²` and differ only by a power of `∏ ν_k`, i.e. of
//! the purity. Normalization constants are dropped; only shapes and ratios
//! are meaningful.
//!
//! The closed-form densities can be checked against the metrics they come
//! from with [`numeric_metric_density`] and [`numeric_hs_density_std_form`],
//! which assemble the Gram matrix of a line element over an explicit chart by
//! central differences and polarization.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::covariance::{CovMat, SympSpectrum};
use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::standard_form::{InvariantCoords, StdForm};

/// Step of the central differences that produce chart tangents.
pub const CHART_STEP: f64 = 1e-5;

const DOMAIN_TOL: f64 = 1e-12;
const SURFACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureKind {
    HilbertSchmidt,
    FisherRao,
    /// Reduced states of Haar-random pure states on twice as many modes.
    ReducedPure,
    /// The measure restricted to the surface `∏ 1/ν_k = μ`.
    FixedPurity(f64),
}

impl MeasureKind {
    /// Power of `∏ ν_k` multiplying the repulsion factor.
    pub fn purity_exponent(&self, n_modes: usize) -> f64 {
        let n = n_modes as f64;
        match self {
            MeasureKind::HilbertSchmidt => -n * (n + 2.5) + 1.0,
            MeasureKind::FisherRao => -2.0 * n + 1.0,
            MeasureKind::ReducedPure => 2.0,
            MeasureKind::FixedPurity(_) => 0.0,
        }
    }

    pub fn density(&self, spectrum: &SympSpectrum) -> Result<f64> {
        check_physical(spectrum)?;
        self.check_surface(spectrum)?;
        let exponent = self.purity_exponent(spectrum.n_modes());
        Ok(spectrum.product().powf(exponent) * spectrum.repulsion())
    }

    fn check_surface(&self, spectrum: &SympSpectrum) -> Result<()> {
        if let MeasureKind::FixedPurity(mu) = *self {
            if !(mu > 0.0 && mu <= 1.0) {
                return Err(Error::Domain("fixed purity must lie in (0, 1]"));
            }
            if (spectrum.purity() - mu).abs() > SURFACE_TOL * mu {
                return Err(Error::Domain("spectrum is not on the fixed-purity surface"));
            }
        }
        Ok(())
    }
}

fn check_physical(spectrum: &SympSpectrum) -> Result<()> {
    if spectrum.min() < 1.0 - DOMAIN_TOL {
        return Err(Error::Domain("symplectic eigenvalues must be at least one"));
    }
    Ok(())
}

/// `(∏ν_k)^(-N(N+5/2)+1) ∏_{l>m} (ν_l² - ν_m²)²`.
pub fn density_hs(spectrum: &SympSpectrum) -> Result<f64> {
    MeasureKind::HilbertSchmidt.density(spectrum)
}

/// `(∏ν_k)^(-2N+1) ∏_{l>m} (ν_l² - ν_m²)²`.
pub fn density_fr(spectrum: &SympSpectrum) -> Result<f64> {
    MeasureKind::FisherRao.density(spectrum)
}

/// `(∏ν_k)² ∏_{l>m} (ν_l² - ν_m²)²`, with the exponent independent of `N`.
pub fn density_reduced_pure(spectrum: &SympSpectrum) -> Result<f64> {
    MeasureKind::ReducedPure.density(spectrum)
}

/// `P_a / P_b` at the same spectrum. The repulsion factor cancels, so the
/// ratio is a pure power of `∏ ν_k` and stays finite on degenerate spectra.
pub fn density_ratio(kind_a: MeasureKind, kind_b: MeasureKind, spectrum: &SympSpectrum) -> Result<f64> {
    check_physical(spectrum)?;
    kind_a.check_surface(spectrum)?;
    kind_b.check_surface(spectrum)?;
    let n = spectrum.n_modes();
    let exponent = kind_a.purity_exponent(n) - kind_b.purity_exponent(n);
    Ok(spectrum.product().powf(exponent))
}

/// `Σ⁻¹ dΣ`, with both arguments checked for matching shape.
fn relative_displacement(sigma: &CovMat, d_sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if d_sigma.shape() != sigma.entries().shape() {
        return Err(Error::Dimension { rows: d_sigma.nrows(), cols: d_sigma.ncols() });
    }
    let chol = sigma
        .entries()
        .clone()
        .cholesky()
        .ok_or(Error::Domain("line elements need a positive definite covariance matrix"))?;
    Ok(chol.solve(d_sigma))
}

/// `ds²_HS = ((tr Σ⁻¹dΣ)² + 2 tr (Σ⁻¹dΣ)²) / (16 √det Σ)`.
pub fn line_element_hs(sigma: &CovMat, d_sigma: &DMatrix<f64>) -> Result<f64> {
    let m = relative_displacement(sigma, d_sigma)?;
    let tr = m.trace();
    let tr_sq = (&m * &m).trace();
    Ok((tr * tr + 2.0 * tr_sq) / (16.0 * sigma.det().sqrt()))
}

/// `ds²_FR = ½ tr (Σ⁻¹dΣ)²`.
pub fn line_element_fr(sigma: &CovMat, d_sigma: &DMatrix<f64>) -> Result<f64> {
    let m = relative_displacement(sigma, d_sigma)?;
    Ok(0.5 * (&m * &m).trace())
}

fn line_element(kind: MeasureKind, sigma: &CovMat, d_sigma: &DMatrix<f64>) -> Result<f64> {
    match kind {
        MeasureKind::HilbertSchmidt => line_element_hs(sigma, d_sigma),
        MeasureKind::FisherRao => line_element_fr(sigma, d_sigma),
        _ => Err(Error::Domain("only the Hilbert-Schmidt and Fisher-Rao measures come from a metric")),
    }
}

/// A tangent vector at `Σ = SᵀDS`: a change of the spectrum together with an
/// element `H` of the algebra of `Sp(2N)` with blocks
/// `H⁽ⁱʲ⁾ = [[X_ij, Y_ij], [Z_ij, -X_ji]]`.
///
/// `Y` and `Z` are symmetric and `Z` has a vanishing diagonal, which removes
/// the phase rotations that leave `D` unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDirection {
    pub d_nu: Vec<f64>,
    pub dx: DMatrix<f64>,
    pub dy: DMatrix<f64>,
    pub dz: DMatrix<f64>,
}

impl TangentDirection {
    pub fn n_modes(&self) -> usize {
        self.d_nu.len()
    }

    /// Number of independent coordinates, `N(2N + 1)`.
    pub fn dimension(n_modes: usize) -> usize {
        n_modes * (2 * n_modes + 1)
    }

    /// Coordinate vector in the order `dν`, `dX` (row major), upper triangle
    /// of `dY` including the diagonal, strict upper triangle of `dZ`.
    pub fn from_coordinates(n: usize, coords: &[f64]) -> Result<Self> {
        if coords.len() != Self::dimension(n) {
            return Err(Error::Dimension { rows: coords.len(), cols: 1 });
        }
        let mut it = coords.iter().copied();
        let d_nu: Vec<f64> = it.by_ref().take(n).collect();
        let mut dx = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                dx[(i, j)] = it.next().unwrap();
            }
        }
        let mut dy = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = it.next().unwrap();
                dy[(i, j)] = v;
                dy[(j, i)] = v;
            }
        }
        let mut dz = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = it.next().unwrap();
                dz[(i, j)] = v;
                dz[(j, i)] = v;
            }
        }
        Ok(TangentDirection { d_nu, dx, dy, dz })
    }

    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                h[(2 * i, 2 * j)] = self.dx[(i, j)];
                h[(2 * i, 2 * j + 1)] = self.dy[(i, j)];
                h[(2 * i + 1, 2 * j)] = self.dz[(i, j)];
                h[(2 * i + 1, 2 * j + 1)] = -self.dx[(j, i)];
            }
        }
        h
    }

    /// First-order variation `dD + dHᵀD + D dH` at `S = 1`.
    pub fn d_sigma(&self, spectrum: &SympSpectrum) -> DMatrix<f64> {
        let d = spectrum.to_covmat().into_inner();
        let mut d_d = DMatrix::zeros(d.nrows(), d.ncols());
        for (k, v) in self.d_nu.iter().enumerate() {
            d_d[(2 * k, 2 * k)] = *v;
            d_d[(2 * k + 1, 2 * k + 1)] = *v;
        }
        let h = self.hamiltonian();
        d_d + h.transpose() * &d + &d * h
    }
}

/// Chart point `exp(H)ᵀ D(ν + dν) exp(H)` around `S = 1`.
fn spectral_chart(spectrum: &SympSpectrum, dir: &TangentDirection) -> Result<CovMat> {
    let shifted: Vec<f64> = spectrum.values().iter().zip(&dir.d_nu).map(|(v, d)| v + d).collect();
    let mut d = DMatrix::zeros(2 * shifted.len(), 2 * shifted.len());
    for (k, v) in shifted.iter().enumerate() {
        d[(2 * k, 2 * k)] = *v;
        d[(2 * k + 1, 2 * k + 1)] = *v;
    }
    let s = expm(&dir.hamiltonian());
    CovMat::new(s.transpose() * d * s)
}

/// Gram matrix of a quadratic form over a list of tangent vectors, by
/// polarization `g_ab = (Q(v_a + v_b) - Q(v_a - v_b)) / 4`.
fn polarized_gram<Q>(tangents: &[DMatrix<f64>], mut q: Q) -> Result<DMatrix<f64>>
where
    Q: FnMut(&DMatrix<f64>) -> Result<f64>,
{
    let n = tangents.len();
    let mut g = DMatrix::zeros(n, n);
    for a in 0..n {
        g[(a, a)] = q(&tangents[a])?;
        for b in (a + 1)..n {
            let plus = q(&(&tangents[a] + &tangents[b]))?;
            let minus = q(&(&tangents[a] - &tangents[b]))?;
            let v = 0.25 * (plus - minus);
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    Ok(g)
}

fn central_difference<C>(n_coords: usize, mut chart: C) -> Result<Vec<DMatrix<f64>>>
where
    C: FnMut(&[f64]) -> Result<CovMat>,
{
    let mut coords = alloc::vec![0.0; n_coords];
    let mut tangents = Vec::with_capacity(n_coords);
    for k in 0..n_coords {
        coords[k] = CHART_STEP;
        let fwd = chart(&coords)?;
        coords[k] = -CHART_STEP;
        let bwd = chart(&coords)?;
        coords[k] = 0.0;
        tangents.push((fwd.into_inner() - bwd.into_inner()) / (2.0 * CHART_STEP));
    }
    Ok(tangents)
}

/// Metric tensor of the chosen line element in the coordinates
/// `(ν, X, Y, Z)` at `Σ = D`.
pub fn metric_gram(spectrum: &SympSpectrum, kind: MeasureKind) -> Result<DMatrix<f64>> {
    let n = spectrum.n_modes();
    let base = spectrum.to_covmat();
    let tangents = central_difference(TangentDirection::dimension(n), |c| {
        spectral_chart(spectrum, &TangentDirection::from_coordinates(n, c)?)
    })?;
    polarized_gram(&tangents, |v| line_element(kind, &base, v))
}

/// `√det g` of the Hilbert–Schmidt or Fisher–Rao metric at `Σ = D`, which is
/// the eigenvalue density of the induced measure up to a constant.
pub fn numeric_metric_density(spectrum: &SympSpectrum, kind: MeasureKind) -> Result<f64> {
    let n = spectrum.n_modes();
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidConfig("numeric metric densities are available for 1 to 3 modes"));
    }
    check_physical(spectrum)?;
    let v = spectrum.values();
    if v.windows(2).any(|w| w[1] - w[0] <= 1e-9 * w[1]) {
        return Err(Error::SingularMetric { determinant: 0.0 });
    }
    let det = metric_gram(spectrum, kind)?.determinant();
    if !(det > 0.0) {
        return Err(Error::SingularMetric { determinant: det });
    }
    Ok(det.sqrt())
}

/// Closed-form Hilbert–Schmidt density in standard-form coordinates
/// `(a, b, c+, c-)` times the local group coordinates:
/// `(√3/256) a²b² |c+² - c-²| / (|c+² - ab|⁵ |c-² - ab|⁵)`.
pub fn hs_density_std_form(f: &StdForm) -> f64 {
    let ab = f.a * f.b;
    let (pp, mm) = (f.c_plus * f.c_plus, f.c_minus * f.c_minus);
    3.0f64.sqrt() / 256.0 * f.a * f.a * f.b * f.b * (pp - mm).abs() / ((pp - ab).abs().powi(5) * (mm - ab).abs().powi(5))
}

fn std_chart(f: &StdForm, c: &[f64]) -> Result<CovMat> {
    let sigma = StdForm::new(f.a + c[0], f.b + c[1], f.c_plus + c[2], f.c_minus + c[3]).to_covmat();
    let mut h = DMatrix::zeros(4, 4);
    for (mode, g) in [&c[4..7], &c[7..10]].into_iter().enumerate() {
        let o = 2 * mode;
        h[(o, o)] = g[0];
        h[(o, o + 1)] = g[1];
        h[(o + 1, o)] = g[2];
        h[(o + 1, o + 1)] = -g[0];
    }
    let s = expm(&h);
    CovMat::new(s.transpose() * sigma.entries() * s)
}

/// `√det g` of the Hilbert–Schmidt metric in the coordinates
/// `(a, b, c+, c-, x_A, y_A, z_A, x_B, y_B, z_B)` at `S = 1`.
pub fn numeric_hs_density_std_form(f: &StdForm) -> Result<f64> {
    let base = f.to_covmat();
    let tangents = central_difference(10, |c| std_chart(f, c))?;
    let g = polarized_gram(&tangents, |v| line_element_hs(&base, v))?;
    let det = g.determinant();
    if !(det > 0.0) {
        return Err(Error::SingularMetric { determinant: det });
    }
    Ok(det.sqrt())
}

/// `(√3/512) μ⁷ / (μ_A³ μ_B³)`, the two-mode Hilbert–Schmidt density in the
/// invariant coordinates `(μ_A, μ_B, μ, Δ)` times the local group measure.
pub fn hs_density_invariant_coords(coords: &InvariantCoords) -> f64 {
    let InvariantCoords { mu, mu_a, mu_b, .. } = *coords;
    3.0f64.sqrt() / 512.0 * mu.powi(7) / (mu_a.powi(3) * mu_b.powi(3))
}
