//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

const MAX_PANELS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evals: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (k, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kron += w * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Panel { lo, hi, value: kron * half, error: ((kron - gauss) * half).abs() }
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadResult> {
    integrate_with_breaks(f, &[lo, hi], tol)
}

/// Like [`integrate`], over consecutive panels `[p₀, p₁], [p₁, p₂], ...`.
/// Breakpoints at kinks of the integrand keep the Kronrod rule accurate.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: f64) -> Result<QuadResult> {
    if points.len() < 2 || !(tol > 0.0) {
        return Err(Error::InvalidConfig("quadrature needs two or more points and a positive tolerance"));
    }
    let mut panels: Vec<Panel> = Vec::new();
    for w in points.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(Error::InvalidConfig("quadrature breakpoints must be nondecreasing"));
        }
        if w[1] > w[0] {
            panels.push(kronrod(&mut f, w[0], w[1]));
        }
    }
    let mut evals = 15 * panels.len();
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= tol {
            break;
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::NoConvergence { what: "adaptive quadrature", error: total_err });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, be), (i, p)| if p.error > be { (i, p.error) } else { (bi, be) });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if !(mid > p.lo && mid < p.hi) {
            // Interval cannot be split further in floating point.
            return Err(Error::NoConvergence { what: "adaptive quadrature", error: total_err });
        }
        panels.push(kronrod(&mut f, p.lo, mid));
        panels.push(kronrod(&mut f, mid, p.hi));
        evals += 30;
    }
    // Fixed summation order for reproducibility.
    panels.sort_by(|x, y| x.lo.partial_cmp(&y.lo).unwrap_or(core::cmp::Ordering::Equal));
    let value = panels.iter().map(|p| p.value).sum();
    let abs_error = panels.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, abs_error, evals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| 3.0 * x * x + 2.0 * x + 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 8.0 + 4.0 + 2.0, epsilon = 1e-13);
        assert_eq!(r.evals, 15);
    }

    #[test]
    fn smooth_transcendental() {
        let r = integrate(|x| x.exp(), -1.0, 3.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 3.0f64.exp() - (-1.0f64).exp(), epsilon = 1e-11);
    }

    #[test]
    fn square_root_endpoint_singularity() {
        let r = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn kink_with_breakpoint() {
        let f = |x: f64| (x - 0.3).abs();
        let r = integrate_with_breaks(f, &[0.0, 0.3, 1.0], 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 0.5 * 0.09 + 0.5 * 0.49, epsilon = 1e-14);
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate(|x| x, 1.0, 1.0, 1e-10).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn bad_arguments() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-10).is_err());
        assert!(integrate(|x| x, 0.0, 1.0, 0.0).is_err());
    }
}
