//! Grid runner: integrates one problem over a (dt, truncation order) grid
//! and scores every cell against a shared brute-force reference.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use carleman_core::{
    assemble, reference_integrate, simulate, IntegrationConfig, PolynomialSystem, Trajectory,
};

use crate::error::CliError;
use crate::metrics::error_metrics;

/// One grid cell. Error fields are absent when the run diverged.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub dt: f64,
    pub n_t: usize,
    pub representative_error: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub l2_error: Option<f64>,
    pub diverged: bool,
    pub wall_secs: f64,
    pub dim: usize,
    pub nnz: usize,
}

/// The record times `simulate` emits for this step size: t = 0 plus every
/// `stride`-th step. Computed the same way (k as f64 * dt) so the sweep's
/// reference grid matches the test trajectories bitwise.
pub fn grid_times(dt: f64, t_end: f64, stride: usize) -> Vec<f64> {
    let n_steps = (t_end / dt).round().max(1.0) as usize;
    let mut times = vec![0.0];
    for k in 1..=n_steps {
        if k % stride == 0 {
            times.push(k as f64 * dt);
        }
    }
    times
}

/// Worker count requested via CARLEMAN_WORKERS, if set.
pub fn worker_override() -> Result<Option<usize>, CliError> {
    match std::env::var("CARLEMAN_WORKERS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Invalid(format!(
                "CARLEMAN_WORKERS must be a positive integer, got `{raw}`"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Invalid(format!("CARLEMAN_WORKERS: {e}"))),
    }
}

/// Runs `base` at every (dt, n_t) combination, in parallel, reusing one
/// reference trajectory per distinct dt. Rows come back sorted by
/// (dt, n_t). Cells that blow up are flagged instead of aborting the grid.
pub fn sweep(
    sys: &PolynomialSystem,
    x0: &[f64],
    base: &IntegrationConfig,
    reference_dt: f64,
    dt_grid: &[f64],
    n_t_grid: &[usize],
) -> Result<Vec<SweepRow>, CliError> {
    if dt_grid.is_empty() || n_t_grid.is_empty() {
        return Err(CliError::Invalid("sweep grids must be nonempty".into()));
    }
    if !(reference_dt > 0.0 && reference_dt.is_finite()) {
        return Err(CliError::Invalid(format!(
            "reference dt must be positive, got {reference_dt}"
        )));
    }
    for &dt in dt_grid {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CliError::Invalid(format!("sweep dt must be positive, got {dt}")));
        }
        if dt > base.t_end * (1.0 + 1e-9) {
            return Err(CliError::Invalid(format!(
                "sweep dt {dt} exceeds the horizon {}",
                base.t_end
            )));
        }
        let ratio = dt / reference_dt;
        if ratio < 0.5 || (ratio - ratio.round()).abs() > 1e-6 * ratio {
            return Err(CliError::Invalid(format!(
                "reference dt {reference_dt} must divide the sweep dt {dt} evenly"
            )));
        }
    }
    for &n_t in n_t_grid {
        if n_t == 0 {
            return Err(CliError::Invalid("truncation order must be at least 1".into()));
        }
    }

    let run = || -> Result<Vec<SweepRow>, CliError> {
        let mut unique_dts: Vec<f64> = Vec::new();
        for &dt in dt_grid {
            if !unique_dts.contains(&dt) {
                unique_dts.push(dt);
            }
        }
        let references: HashMap<u64, Trajectory> = unique_dts
            .par_iter()
            .map(|&dt| {
                let times = grid_times(dt, base.t_end, base.record_stride);
                reference_integrate(sys, x0, reference_dt, base.t_end, &times)
                    .map(|traj| (dt.to_bits(), traj))
                    .map_err(CliError::from)
            })
            .collect::<Result<_, _>>()?;

        let points: Vec<(f64, usize)> = dt_grid
            .iter()
            .flat_map(|&dt| n_t_grid.iter().map(move |&n_t| (dt, n_t)))
            .collect();
        let mut rows = points
            .par_iter()
            .map(|&(dt, n_t)| run_cell(sys, x0, base, dt, n_t, &references[&dt.to_bits()]))
            .collect::<Result<Vec<_>, _>>()?;
        rows.sort_by(|a, b| {
            a.dt.partial_cmp(&b.dt).unwrap().then(a.n_t.cmp(&b.n_t))
        });
        Ok(rows)
    };

    match worker_override()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Invalid(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn run_cell(
    sys: &PolynomialSystem,
    x0: &[f64],
    base: &IntegrationConfig,
    dt: f64,
    n_t: usize,
    reference: &Trajectory,
) -> Result<SweepRow, CliError> {
    let cs = assemble(sys, n_t).map_err(CliError::from)?;
    let dim = cs.dim();
    let nnz = cs.nnz();
    let mut cfg = base.clone();
    cfg.dt = dt;
    cfg.n_t = n_t;

    let start = Instant::now();
    let outcome = simulate(sys, x0, &cfg);
    let wall_secs = start.elapsed().as_secs_f64();

    let blown = |wall_secs| SweepRow {
        dt,
        n_t,
        representative_error: None,
        max_abs_error: None,
        l2_error: None,
        diverged: true,
        wall_secs,
        dim,
        nnz,
    };
    match outcome {
        Ok(traj) if traj.diverged_at.is_none() => {
            let report = error_metrics(&traj, reference)?;
            Ok(SweepRow {
                dt,
                n_t,
                representative_error: Some(report.representative_error),
                max_abs_error: Some(report.max_abs_error),
                l2_error: Some(report.l2_error),
                diverged: false,
                wall_secs,
                dim,
                nnz,
            })
        }
        Ok(_) => Ok(blown(wall_secs)),
        Err(e) => {
            let converted = CliError::from(e);
            if matches!(converted, CliError::Numerics(_)) {
                Ok(blown(wall_secs))
            } else {
                Err(converted)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use carleman_core::{Method, Relift, SparseMatrix};

    fn quadratic_decay() -> PolynomialSystem {
        PolynomialSystem::new(
            1,
            vec![
                SparseMatrix::zero(1, 1),
                SparseMatrix::from_triplets(1, 1, [(0, 0, -1.0)]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn base(t_end: f64, method: Method) -> IntegrationConfig {
        let mut cfg = IntegrationConfig::new(1.0, t_end, method, 2);
        cfg.relift_every = Relift::Every(1);
        cfg
    }

    #[test]
    fn rows_cover_the_grid_in_sorted_order() {
        let sys = quadratic_decay();
        let rows = sweep(
            &sys,
            &[1.0],
            &base(1.0, Method::ImplicitCarleman),
            1e-4,
            &[1e-1, 1e-2],
            &[3, 2],
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        let keys: Vec<(f64, usize)> = rows.iter().map(|r| (r.dt, r.n_t)).collect();
        assert_eq!(keys, vec![(1e-2, 2), (1e-2, 3), (1e-1, 2), (1e-1, 3)]);
        for row in &rows {
            assert!(!row.diverged);
            assert!(row.max_abs_error.unwrap() > 0.0);
            assert_eq!(row.dim, row.n_t);
        }
    }

    #[test]
    fn finer_steps_score_smaller_errors() {
        let sys = quadratic_decay();
        let rows = sweep(
            &sys,
            &[1.0],
            &base(1.0, Method::ImplicitCarleman),
            1e-4,
            &[1e-1, 1e-2, 1e-3],
            &[2],
        )
        .unwrap();
        let errs: Vec<f64> = rows.iter().map(|r| r.max_abs_error.unwrap()).collect();
        assert!(errs[0] < errs[1] && errs[1] < errs[2], "{errs:?}");
    }

    #[test]
    fn unstable_cells_are_flagged_not_fatal() {
        let stiff = PolynomialSystem::new(
            1,
            vec![SparseMatrix::from_triplets(1, 1, [(0, 0, -60.0)]).unwrap()],
        )
        .unwrap();
        let mut cfg = base(1.0, Method::ExplicitCarleman);
        cfg.divergence_norm_cap = 1e6;
        let rows = sweep(&stiff, &[1.0], &cfg, 1e-4, &[1e-3, 1e-1], &[2]).unwrap();
        assert!(!rows[0].diverged);
        assert!(rows[1].diverged);
        assert!(rows[1].representative_error.is_none());
    }

    #[test]
    fn bad_grids_are_rejected() {
        let sys = quadratic_decay();
        let cfg = base(1.0, Method::ImplicitCarleman);
        assert!(sweep(&sys, &[1.0], &cfg, 1e-4, &[], &[2]).is_err());
        assert!(sweep(&sys, &[1.0], &cfg, 1e-4, &[1e-1], &[]).is_err());
        assert!(sweep(&sys, &[1.0], &cfg, 1e-4, &[2.5e-4], &[2]).is_err());
        assert!(sweep(&sys, &[1.0], &cfg, 1e-4, &[2.0], &[2]).is_err());
        assert!(sweep(&sys, &[1.0], &cfg, 1e-4, &[1e-1], &[0]).is_err());
    }

    #[test]
    fn duplicate_dts_share_a_reference_and_agree() {
        let sys = quadratic_decay();
        let rows = sweep(
            &sys,
            &[1.0],
            &base(1.0, Method::ImplicitCarleman),
            1e-3,
            &[1e-2, 1e-2],
            &[2],
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].representative_error, rows[1].representative_error);
    }
}
