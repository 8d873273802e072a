//! Two-mode standard form and local symplectic invariants.
//!
//! Any two-mode covariance matrix is locally symplectically equivalent to
//!
//! ```text
//! [ a   0   c+  0  ]
//! [ 0   a   0   c- ]
//! [ c+  0   b   0  ]
//! [ 0   c-  0   b  ]
//! ```
//!
//! with `c+ ≥ |c-|`. The four numbers are in one-to-one correspondence with
//! the invariants `(μ, μ_A, μ_B, Δ)`: `μ_A = 1/a`, `μ_B = 1/b`,
//! `1/μ² = (ab - c+²)(ab - c-²)` and `Δ = a² + b² + 2 c+ c-`.

use nalgebra::{DMatrix, Matrix2};
#[allow(unused_imports)]
use num_traits::Float;

use crate::correlations;
use crate::covariance::{CovMat, DEFAULT_BONA_FIDE_TOL};
use crate::error::{Error, Result};

/// Relative slack for roundoff in the quadratic that recovers `c±`.
const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdForm {
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

/// Global purity, marginal purities and seralian of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantCoords {
    pub mu: f64,
    pub mu_a: f64,
    pub mu_b: f64,
    pub delta: f64,
}

/// Result of [`invariants`]. Non-physical inputs still get their invariants
/// so that callers can probe the boundary of the physical region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeInvariants {
    pub coords: InvariantCoords,
    pub energy: f64,
    pub bona_fide: bool,
}

impl StdForm {
    pub fn new(a: f64, b: f64, c_plus: f64, c_minus: f64) -> Self {
        StdForm { a, b, c_plus, c_minus }
    }

    /// Product of thermal states, `c± = 0`.
    pub fn thermal(a: f64, b: f64) -> Self {
        StdForm::new(a, b, 0.0, 0.0)
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        StdForm::new(ch, ch, sh, -sh)
    }

    pub fn to_covmat(&self) -> CovMat {
        let StdForm { a, b, c_plus: p, c_minus: m } = *self;
        #[rustfmt::skip]
        let entries = DMatrix::from_row_slice(4, 4, &[
            a,   0.0, p,   0.0,
            0.0, a,   0.0, m,
            p,   0.0, b,   0.0,
            0.0, m,   0.0, b,
        ]);
        CovMat::new(entries).expect("standard form is symmetric by construction")
    }

    /// `det Σ = (ab - c+²)(ab - c-²)`.
    pub fn det(&self) -> f64 {
        let ab = self.a * self.b;
        (ab - self.c_plus * self.c_plus) * (ab - self.c_minus * self.c_minus)
    }

    pub fn invariants(&self) -> InvariantCoords {
        InvariantCoords {
            mu: 1.0 / self.det().sqrt(),
            mu_a: 1.0 / self.a,
            mu_b: 1.0 / self.b,
            delta: self.a * self.a + self.b * self.b + 2.0 * self.c_plus * self.c_minus,
        }
    }

    pub fn energy(&self) -> f64 {
        self.a + self.b
    }

    /// Momentum flip of mode B maps `c-` to `-c-`.
    pub fn partial_transpose(&self) -> StdForm {
        StdForm { c_minus: -self.c_minus, ..*self }
    }

    /// Local symplectic conjugation `S Σ Sᵀ` with `S = S_A ⊕ S_B`.
    pub fn with_local(&self, s_a: &Matrix2<f64>, s_b: &Matrix2<f64>) -> CovMat {
        let s = crate::linalg::direct_sum(s_a, s_b);
        self.to_covmat().conjugate(&s).expect("4x4 shapes agree")
    }
}

/// Solves `c+ c- = p`, `c+² + c-² = s` for the `c+ ≥ |c-|` branch.
fn correlation_roots(p: f64, s: f64) -> Result<(f64, f64)> {
    let scale = s.abs().max(p.abs()).max(1.0);
    let disc = s * s - 4.0 * p * p;
    if s < -ROOT_TOL * scale || disc < -ROOT_TOL * scale * scale {
        return Err(Error::NoRealSolution { discriminant: disc });
    }
    let big = 0.5 * (s.max(0.0) + disc.max(0.0).sqrt());
    if big <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let small = (p * p / big).min(big);
    let c_plus = big.sqrt();
    let c_minus = small.sqrt().copysign(p);
    Ok((c_plus, c_minus))
}

/// `μ = 1/√det Σ`, marginal purities from the diagonal blocks,
/// `Δ = det A + det B + 2 det C = ν₁² + ν₂²` and `E = ½ tr Σ`.
pub fn invariants(sigma: &CovMat) -> Result<TwoModeInvariants> {
    expect_two_modes(sigma)?;
    let (a, b, c) = (sigma.block(0, 0), sigma.block(1, 1), sigma.block(0, 1));
    let coords = InvariantCoords {
        mu: sigma.purity(),
        mu_a: 1.0 / a.determinant().sqrt(),
        mu_b: 1.0 / b.determinant().sqrt(),
        delta: a.determinant() + b.determinant() + 2.0 * c.determinant(),
    };
    Ok(TwoModeInvariants {
        coords,
        energy: sigma.energy(),
        bona_fide: sigma.is_bona_fide(DEFAULT_BONA_FIDE_TOL)?,
    })
}

/// Standard form of a two-mode covariance matrix. Invariant under local
/// symplectic conjugation of the input.
pub fn standard_form(sigma: &CovMat) -> Result<StdForm> {
    expect_two_modes(sigma)?;
    let det_a = sigma.block(0, 0).determinant();
    let det_b = sigma.block(1, 1).determinant();
    if !(det_a > 0.0 && det_b > 0.0) {
        return Err(Error::Domain("marginal covariance blocks must be positive definite"));
    }
    let (a, b) = (det_a.sqrt(), det_b.sqrt());
    let p = sigma.block(0, 1).determinant();
    let ab = a * b;
    let s = (ab * ab + p * p - sigma.det()) / ab;
    let (c_plus, c_minus) = correlation_roots(p, s)?;
    Ok(StdForm { a, b, c_plus, c_minus })
}

/// Inverse of [`StdForm::invariants`]; fails for coordinates outside the
/// physical region.
pub fn cm_from_invariants(coords: &InvariantCoords) -> Result<StdForm> {
    let InvariantCoords { mu, mu_a, mu_b, delta } = *coords;
    let interval = correlations::delta_bounds(mu, mu_a, mu_b)
        .ok_or(Error::Domain("no physical states with these purities"))?;
    let slack = ROOT_TOL * delta.abs().max(1.0);
    if delta < interval.min - slack || delta > interval.max + slack {
        return Err(Error::Domain("seralian outside the bona fide interval"));
    }
    let (a, b) = (1.0 / mu_a, 1.0 / mu_b);
    let ab = a * b;
    let p = 0.5 * (delta - a * a - b * b);
    let s = (ab * ab + p * p - 1.0 / (mu * mu)) / ab;
    let (c_plus, c_minus) = correlation_roots(p, s)?;
    Ok(StdForm { a, b, c_plus, c_minus })
}

fn expect_two_modes(sigma: &CovMat) -> Result<()> {
    if sigma.n_modes() != 2 {
        return Err(Error::ModeCount { expected: 2, found: sigma.n_modes() });
    }
    Ok(())
}
