//! Covariance matrices, the symplectic form and symplectic spectra.

use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{DMatrix, Matrix2};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg;

/// Default slack on `ν_min ≥ 1` in the bona fide test. Integration domains
/// touch the boundary `ν = 1`, which counts as physical.
pub const DEFAULT_BONA_FIDE_TOL: f64 = 1e-9;

/// Relative tolerance on `|Σ_ij - Σ_ji|` accepted as symmetric.
const SYMMETRY_TOL: f64 = 1e-12;

/// Relative tolerance for grouping eigenvalues of `ΩΣ` into `±iν` pairs.
const PAIRING_TOL: f64 = 1e-8;
const SCHUR_MAX_ITER: usize = 10_000;

/// Candidate covariance matrix of an `N`-mode Gaussian state.
///
/// Always square, of even dimension and exactly symmetric (inputs within the
/// symmetry tolerance are symmetrized). Physicality is a separate question,
/// see [`CovMat::is_bona_fide`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovMat {
    entries: DMatrix<f64>,
}

impl CovMat {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::Dimension { rows, cols });
        }
        let scale = entries.amax().max(f64::MIN_POSITIVE);
        let mut max_asymmetry = 0.0f64;
        for i in 0..rows {
            for j in (i + 1)..cols {
                max_asymmetry = max_asymmetry.max((entries[(i, j)] - entries[(j, i)]).abs());
            }
        }
        if !(max_asymmetry <= SYMMETRY_TOL * scale) {
            return Err(Error::NotSymmetric { max_asymmetry });
        }
        let entries = (&entries + entries.transpose()) * 0.5;
        Ok(CovMat { entries })
    }

    pub fn from_row_slice(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::Dimension { rows: dim, cols: values.len() / dim.max(1) });
        }
        CovMat::new(DMatrix::from_row_slice(dim, dim, values))
    }

    /// Vacuum state.
    pub fn identity(n_modes: usize) -> Self {
        CovMat { entries: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    /// Williamson normal form `⊕ diag(ν_k, ν_k)`, a product of thermal states.
    pub fn thermal(nu: &[f64]) -> Self {
        let mut entries = DMatrix::zeros(2 * nu.len(), 2 * nu.len());
        for (k, &v) in nu.iter().enumerate() {
            entries[(2 * k, 2 * k)] = v;
            entries[(2 * k + 1, 2 * k + 1)] = v;
        }
        CovMat { entries }
    }

    pub fn n_modes(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn det(&self) -> f64 {
        self.entries.determinant()
    }

    /// `μ = 1/√det Σ`.
    pub fn purity(&self) -> f64 {
        1.0 / self.det().sqrt()
    }

    /// `E = ½ tr Σ` (zero displacement).
    pub fn energy(&self) -> f64 {
        0.5 * self.entries.trace()
    }

    /// The 2x2 block coupling modes `i` and `j`.
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    /// `S Σ Sᵀ`, the action of a (symplectic) transformation on the state.
    pub fn conjugate(&self, s: &DMatrix<f64>) -> Result<CovMat> {
        if s.shape() != self.entries.shape() {
            return Err(Error::Dimension { rows: s.nrows(), cols: s.ncols() });
        }
        let m = s * &self.entries * s.transpose();
        Ok(CovMat { entries: (&m + m.transpose()) * 0.5 })
    }

    pub fn symplectic_spectrum(&self) -> Result<SympSpectrum> {
        symplectic_spectrum(self)
    }

    pub fn is_bona_fide(&self, tol: f64) -> Result<bool> {
        is_bona_fide(self, tol)
    }

    /// Block-diagonal Williamson form, in which case the spectrum is exact.
    fn williamson_diagonal(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.entries[(i, j)] != 0.0 {
                    return None;
                }
            }
        }
        (0..self.n_modes())
            .map(|k| {
                let q = self.entries[(2 * k, 2 * k)];
                (q == self.entries[(2 * k + 1, 2 * k + 1)] && q > 0.0).then_some(q)
            })
            .collect()
    }
}

/// The symplectic form `Ω = ⊕ [[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SympForm {
    n_modes: usize,
}

impl SympForm {
    pub fn new(n_modes: usize) -> Self {
        SympForm { n_modes }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        linalg::omega(self.n_modes)
    }
}

/// Symplectic eigenvalues, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SympSpectrum {
    values: Vec<f64>,
}

impl SympSpectrum {
    /// Sorts the values; rejects empty or non-finite input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("symplectic spectrum must be a non-empty list of finite values"));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Ok(SympSpectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_modes(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// `∏ ν_k`.
    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }

    pub fn purity(&self) -> f64 {
        1.0 / self.product()
    }

    /// `Δ = Σ ν_k²`.
    pub fn seralian(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `∏_{l>m} (ν_l² - ν_m²)²`, the eigenvalue repulsion factor shared by
    /// every invariant measure.
    pub fn repulsion(&self) -> f64 {
        let mut acc = 1.0;
        for (l, &x) in self.values.iter().enumerate() {
            for &y in &self.values[..l] {
                let d = x * x - y * y;
                acc *= d * d;
            }
        }
        acc
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.min() >= 1.0 - tol
    }

    pub fn to_covmat(&self) -> CovMat {
        CovMat::thermal(&self.values)
    }
}

/// Moduli of the `±iν` eigenvalue pairs of `ΩΣ`, ascending.
pub fn symplectic_spectrum(sigma: &CovMat) -> Result<SympSpectrum> {
    if let Some(values) = sigma.williamson_diagonal() {
        return SympSpectrum::new(values);
    }
    let n = sigma.n_modes();
    let mut moduli: Vec<f64> = match sigma.entries().clone().cholesky() {
        // ΩLLᵀ is similar to the antisymmetric LᵀΩL, whose square is
        // symmetric with eigenvalues -ν², each twice.
        Some(c) => {
            let l = c.l();
            let a = l.transpose() * linalg::omega(n) * &l;
            (a.transpose() * &a).symmetric_eigenvalues().iter().map(|v| v.max(0.0).sqrt()).collect()
        }
        None => {
            let product = linalg::omega(n) * sigma.entries();
            let schur = product
                .try_schur(f64::EPSILON, SCHUR_MAX_ITER)
                .ok_or(Error::NoConvergence { what: "schur decomposition", error: f64::NAN })?;
            schur.complex_eigenvalues().iter().map(|z| z.re.hypot(z.im)).collect()
        }
    };
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let mut values = Vec::with_capacity(n);
    for pair in moduli.chunks(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let mismatch = (hi - lo).abs();
        if !(mismatch <= PAIRING_TOL * hi.max(1.0)) {
            return Err(Error::SpectrumPairing { mismatch });
        }
        values.push(0.5 * (lo + hi));
    }
    SympSpectrum::new(values)
}

/// `Σ + iΩ ≥ 0`, tested as `Σ > 0` together with `ν_min ≥ 1 - tol`.
pub fn is_bona_fide(sigma: &CovMat, tol: f64) -> Result<bool> {
    if sigma.entries().clone().cholesky().is_none() {
        return Ok(false);
    }
    Ok(symplectic_spectrum(sigma)?.is_physical(tol))
}
