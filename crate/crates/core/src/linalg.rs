//! Small dense-matrix helpers for symplectic geometry.

use nalgebra::{DMatrix, Matrix2};
#[allow(unused_imports)]
use num_traits::Float;

/// Block-diagonal symplectic form with 2x2 blocks `[[0, 1], [-1, 0]]`.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// Accurate to a few ulps for the moderate norms used here (generators of
/// symplectic or orthogonal groups with entries of order one).
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = a.iter().fold(0.0f64, |acc, x| acc + x.abs());
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = a * scale;
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=18 {
        term = &term * &scaled / (k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(Ωᵀ M)` for symmetric `M`, which is always symplectic.
pub fn symplectic_from_symmetric(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n_modes = m.nrows() / 2;
    let hamiltonian = omega(n_modes).transpose() * m;
    expm(&hamiltonian)
}

/// Largest entry of `|SᵀΩS - Ω|`.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let w = omega(s.nrows() / 2);
    (s.transpose() * &w * s - w).amax()
}

pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

pub fn squeezer(w: f64) -> Matrix2<f64> {
    Matrix2::new(w, 0.0, 0.0, 1.0 / w)
}

/// Block-diagonal `A ⊕ B` of two single-mode matrices.
pub fn direct_sum(a: &Matrix2<f64>, b: &Matrix2<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(a);
    m.view_mut((2, 2), (2, 2)).copy_from(b);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_squares_to_minus_identity() {
        for n in 1..4 {
            let w = omega(n);
            assert_eq!(&w * &w, -DMatrix::<f64>::identity(2 * n, 2 * n));
            assert_eq!(w.transpose(), -&w);
        }
    }

    #[test]
    fn expm_of_rotation_generator() {
        let theta = 1.3;
        let g = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
        let r = expm(&g);
        let expected = rotation(theta);
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)] - expected[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exponentiated_hamiltonian_is_symplectic() {
        let m = DMatrix::from_fn(4, 4, |i, j| 0.1 * ((i + 2 * j) as f64).sin() + 0.1 * ((j + 2 * i) as f64).sin());
        let s = symplectic_from_symmetric(&m);
        assert!(symplectic_defect(&s) < 1e-13);
    }

    #[test]
    fn local_blocks_are_symplectic() {
        let s = direct_sum(&(rotation(0.4) * squeezer(1.7)), &(squeezer(0.6) * rotation(-2.0)));
        assert!(symplectic_defect(&s) < 1e-14);
    }
}
