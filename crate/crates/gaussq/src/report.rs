use std::fmt;

use gaussq_core::{log_negativity, steerability, CovMat, Error, InvariantCoords, DEFAULT_BONA_FIDE_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeReport {
    pub mu_a: f64,
    pub mu_b: f64,
    pub delta: f64,
    /// `None` when the partially transposed spectrum is not real.
    pub log_negativity: Option<f64>,
    pub steerability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub n_modes: usize,
    pub bona_fide: bool,
    /// `None` for matrices that are not positive definite and have no
    /// paired spectrum.
    pub spectrum: Option<Vec<f64>>,
    pub mu: f64,
    pub energy: f64,
    pub two_mode: Option<TwoModeReport>,
}

/// Invariants of a covariance matrix. Fails only on numerical breakdown for
/// a positive definite input; non-physical inputs still get a report.
pub fn analyze(sigma: &CovMat) -> Result<Report, Error> {
    let positive = sigma.entries().clone().cholesky().is_some();
    let spectrum = match sigma.symplectic_spectrum() {
        Ok(s) => Some(s),
        Err(e) if positive => return Err(e),
        Err(_) => None,
    };
    let bona_fide = positive && spectrum.as_ref().is_some_and(|s| s.is_physical(DEFAULT_BONA_FIDE_TOL));
    let two_mode = if sigma.n_modes() == 2 {
        let (a, b, c) = (sigma.block(0, 0), sigma.block(1, 1), sigma.block(0, 1));
        let c = InvariantCoords {
            mu: sigma.purity(),
            mu_a: 1.0 / a.determinant().sqrt(),
            mu_b: 1.0 / b.determinant().sqrt(),
            delta: a.determinant() + b.determinant() + 2.0 * c.determinant(),
        };
        Some(TwoModeReport {
            mu_a: c.mu_a,
            mu_b: c.mu_b,
            delta: c.delta,
            log_negativity: log_negativity(&c).ok().filter(|v| v.is_finite()),
            steerability: steerability(&c),
        })
    } else {
        None
    };
    Ok(Report {
        n_modes: sigma.n_modes(),
        bona_fide,
        spectrum: spectrum.map(|s| s.values().to_vec()),
        mu: sigma.purity(),
        energy: sigma.energy(),
        two_mode,
    })
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N: {}", self.n_modes)?;
        writeln!(f, "bona_fide: {}", if self.bona_fide { "yes" } else { "no" })?;
        match &self.spectrum {
            Some(nu) => {
                let parts: Vec<String> = nu.iter().map(|v| format!("{v:.12}")).collect();
                writeln!(f, "nu: {}", parts.join(" "))?;
            }
            None => writeln!(f, "nu: undefined")?,
        }
        writeln!(f, "mu: {:.12}", self.mu)?;
        if let Some(t) = &self.two_mode {
            writeln!(f, "mu_a: {:.12}", t.mu_a)?;
            writeln!(f, "mu_b: {:.12}", t.mu_b)?;
            writeln!(f, "delta: {:.12}", t.delta)?;
        }
        writeln!(f, "E: {:.12}", self.energy)?;
        if let Some(t) = &self.two_mode {
            match t.log_negativity {
                Some(v) => writeln!(f, "E_N: {v:.12}")?,
                None => writeln!(f, "E_N: undefined")?,
            }
            writeln!(f, "G: {:.12}", t.steerability)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_report() {
        let r = analyze(&CovMat::identity(2)).unwrap();
        assert!(r.bona_fide);
        assert_eq!(r.mu, 1.0);
        assert_eq!(r.two_mode.as_ref().unwrap().log_negativity, Some(0.0));
        let text = r.to_string();
        assert!(text.contains("N: 2\n"));
        assert!(text.contains("E_N: 0.000000000000\n"));
    }

    #[test]
    fn single_mode_has_no_correlations() {
        let r = analyze(&CovMat::thermal(&[2.0])).unwrap();
        assert!(r.two_mode.is_none());
        assert_eq!(r.mu, 0.5);
        assert!(!r.to_string().contains("E_N"));
    }

    #[test]
    fn non_physical_matrix_is_reported() {
        let r = analyze(&CovMat::thermal(&[0.5, 1.0])).unwrap();
        assert!(!r.bona_fide);
        let m = CovMat::from_row_slice(4, &[1., 0., 2., 0., 0., 1., 0., 0., 2., 0., 1., 0., 0., 0., 0., 1.]).unwrap();
        let r = analyze(&m).unwrap();
        assert!(!r.bona_fide);
        assert!(r.two_mode.is_some());
    }
}
