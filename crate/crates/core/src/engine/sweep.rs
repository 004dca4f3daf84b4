use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linkbudget::{max_distance_m, LinkBudgetParams};

use super::{run_seeded, Scenario, SimulationResult};

/// One point of a range-versus-SNR curve. `max_distance_m` is `None` when the
/// target cannot be met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub gain_dbi: f64,
    pub snr_db: f64,
    pub max_distance_m: Option<f64>,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))
}

/// Maximum range for every (gain, target SNR) pair, gain-major.
///
/// The gain is applied at both ends of the link.
pub fn sweep_max_distance(
    template: &LinkBudgetParams,
    gains_dbi: &[f64],
    snr_targets_db: &[f64],
    jobs: usize,
) -> Result<Vec<CurvePoint>> {
    template.validate()?;
    let grid: Vec<(f64, f64)> = gains_dbi.iter().flat_map(|&g| snr_targets_db.iter().map(move |&s| (g, s))).collect();
    let points = pool(jobs)?.install(|| {
        grid.par_iter()
            .map(|&(gain_dbi, snr_db)| CurvePoint {
                gain_dbi,
                snr_db,
                max_distance_m: max_distance_m(&template.with_gains(gain_dbi, gain_dbi), snr_db).ok(),
            })
            .collect()
    });
    Ok(points)
}

/// Runs independent scenarios on up to `jobs` threads; results keep input order.
pub fn run_batch(scenarios: &[Scenario], seed: Option<u64>, jobs: usize) -> Result<Vec<Result<SimulationResult>>> {
    Ok(pool(jobs)?.install(|| scenarios.par_iter().map(|s| run_seeded(s, seed)).collect()))
}
