//! Figure data as CSV tables.

use std::io::Write;

use gaussq_core::mcint::{ChunkRunner, VegasConfig};
use gaussq_core::typicality::{
    energy_constrained_stats_with, pure_state_endpoint, EndpointStats, EnergyStats, EnergySupport, PlaneRow,
};
use gaussq_core::Result;

pub const PLANE_HEADER: [&str; 5] = ["mu_a", "mu_b", "class", "prop_entangled", "mean_EN"];
pub const CUT_HEADER: [&str; 3] = ["mu_ab", "prop_entangled", "mean_EN"];
pub const ENERGY_HEADER: [&str; 10] = [
    "E",
    "mu",
    "prop_ent",
    "prop_ent_err",
    "mean_EN",
    "mean_EN_err",
    "prop_steer",
    "prop_steer_err",
    "mean_G",
    "mean_G_err",
];
pub const ENDPOINT_HEADER: [&str; 5] = ["E", "prop_ent", "mean_EN", "prop_steer", "mean_G"];

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn write_purity_plane<W: Write>(rows: &[PlaneRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PLANE_HEADER)?;
    for r in rows {
        w.write_record([
            r.mu_a.to_string(),
            r.mu_b.to_string(),
            r.class.as_str().to_string(),
            opt(r.prop_entangled),
            opt(r.mean_en),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows must lie on the diagonal `μ_A = μ_B`.
pub fn write_purity_cut<W: Write>(rows: &[PlaneRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CUT_HEADER)?;
    for r in rows {
        w.write_record([r.mu_a.to_string(), opt(r.prop_entangled), opt(r.mean_en)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCurveRow {
    pub energy: f64,
    pub mu: f64,
    /// `None` where the energy shell is empty.
    pub stats: Option<EnergyStats>,
}

/// Energy-constrained statistics on the purity grid `μ ∈ {1/n, ..., 1}` for
/// each energy. The point `μ = 1` uses the pure-state quadrature. All points
/// of one curve share a seed, so their Monte Carlo errors are correlated.
pub fn energy_curves<R: ChunkRunner>(
    energies: &[f64],
    mu_grid: usize,
    config: &VegasConfig,
    quad_tol: f64,
    runner: &R,
) -> Result<Vec<EnergyCurveRow>> {
    let mut rows = Vec::with_capacity(energies.len() * mu_grid);
    for (i, &energy) in energies.iter().enumerate() {
        let cfg = config.with_seed(config.seed.wrapping_add(i as u64));
        for k in 1..=mu_grid {
            let mu = k as f64 / mu_grid as f64;
            let stats = if k == mu_grid {
                Some(pure_state_endpoint(energy, quad_tol)?.into())
            } else if EnergySupport::new(mu, energy).is_ok() {
                Some(energy_constrained_stats_with(mu, energy, &cfg, runner)?)
            } else {
                None
            };
            rows.push(EnergyCurveRow { energy, mu, stats });
        }
    }
    Ok(rows)
}

pub fn write_energy_curves<W: Write>(rows: &[EnergyCurveRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ENERGY_HEADER)?;
    for r in rows {
        let mut rec = vec![r.energy.to_string(), r.mu.to_string()];
        match &r.stats {
            Some(s) => {
                for e in [s.prop_entangled, s.mean_en, s.prop_steerable, s.mean_g] {
                    rec.push(e.value.to_string());
                    rec.push(e.std_error.to_string());
                }
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 8)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pure_endpoints<W: Write>(rows: &[(f64, EndpointStats)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ENDPOINT_HEADER)?;
    for (energy, p) in rows {
        w.write_record([energy, &p.prop_entangled, &p.mean_en, &p.prop_steerable, &p.mean_g].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
