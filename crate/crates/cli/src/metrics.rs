//! Signed error surfaces between a test trajectory and a finer reference
//! sharing (a superset of) its time grid.

use carleman_core::Trajectory;

use crate::error::CliError;

/// Errors of one run against a reference. `errors[k][v]` is the signed
/// difference test - reference for shared time k and variable v, so a
/// positive representative error means the run overshoots the reference at
/// the worst point.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub times: Vec<f64>,
    pub errors: Vec<Vec<f64>>,
    /// Signed error of largest magnitude across all variables and times.
    pub representative_error: f64,
    pub max_abs_error: f64,
    /// Euclidean norm over all shared times and variables.
    pub l2_error: f64,
    /// Per variable: max_t |error| / max_t |reference|.
    pub relative_by_variable: Vec<f64>,
}

/// Index of the largest-magnitude signed error, with ties going to the
/// earliest time.
fn worst(errors: &[Vec<f64>]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_abs = -1.0;
    for (k, row) in errors.iter().enumerate() {
        for (v, e) in row.iter().enumerate() {
            if e.abs() > best_abs {
                best_abs = e.abs();
                best = (k, v);
            }
        }
    }
    best
}

pub fn error_metrics(test: &Trajectory, reference: &Trajectory) -> Result<ErrorReport, CliError> {
    if test.is_empty() || reference.is_empty() {
        return Err(CliError::Invalid("empty trajectory".into()));
    }
    let n_var = test.states[0].len();
    if reference.states[0].len() != n_var {
        return Err(CliError::Invalid(format!(
            "trajectories have {n_var} and {} variables",
            reference.states[0].len()
        )));
    }
    let ratio = test.metadata.dt / reference.metadata.dt;
    if !(ratio >= 1.0 && (ratio - ratio.round()).abs() <= 1e-6 * ratio) {
        return Err(CliError::Invalid(format!(
            "reference dt {} must divide test dt {} an integer number of times",
            reference.metadata.dt, test.metadata.dt
        )));
    }

    let mut times = Vec::with_capacity(test.len());
    let mut errors = Vec::with_capacity(test.len());
    let mut ref_rows = Vec::with_capacity(test.len());
    let mut ref_idx = 0usize;
    for (k, &t) in test.times.iter().enumerate() {
        while ref_idx < reference.len() && reference.times[ref_idx] < t {
            ref_idx += 1;
        }
        if ref_idx >= reference.len() || reference.times[ref_idx] != t {
            return Err(CliError::Invalid(format!(
                "test time {t:e} is missing from the reference grid"
            )));
        }
        let row: Vec<f64> = test.states[k]
            .iter()
            .zip(&reference.states[ref_idx])
            .map(|(a, b)| a - b)
            .collect();
        times.push(t);
        errors.push(row);
        ref_rows.push(ref_idx);
    }

    let (wk, wv) = worst(&errors);
    let representative_error = errors[wk][wv];
    let max_abs_error = representative_error.abs();
    let l2_error = errors
        .iter()
        .flat_map(|row| row.iter())
        .map(|e| e * e)
        .sum::<f64>()
        .sqrt();

    let mut relative_by_variable = Vec::with_capacity(n_var);
    for v in 0..n_var {
        let max_err = errors.iter().map(|row| row[v].abs()).fold(0.0f64, f64::max);
        let max_ref = ref_rows
            .iter()
            .map(|&i| reference.states[i][v].abs())
            .fold(0.0f64, f64::max);
        relative_by_variable.push(if max_ref > 0.0 { max_err / max_ref } else { 0.0 });
    }

    Ok(ErrorReport {
        times,
        errors,
        representative_error,
        max_abs_error,
        l2_error,
        relative_by_variable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use carleman_core::{IntegrationConfig, Method, Trajectory};

    fn traj(dt: f64, times: Vec<f64>, states: Vec<Vec<f64>>) -> Trajectory {
        Trajectory {
            times,
            states,
            diverged_at: None,
            metadata: IntegrationConfig::new(dt, 1.0, Method::ReferenceEuler, 1),
        }
    }

    #[test]
    fn identical_trajectories_have_zero_error() {
        let t = traj(0.5, vec![0.0, 0.5, 1.0], vec![vec![1.0], vec![2.0], vec![3.0]]);
        let r = error_metrics(&t, &t).unwrap();
        assert_eq!(r.representative_error, 0.0);
        assert_eq!(r.max_abs_error, 0.0);
        assert_eq!(r.l2_error, 0.0);
    }

    #[test]
    fn constant_offset_is_the_representative_error() {
        let test = traj(
            0.5,
            vec![0.0, 0.5, 1.0],
            vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]],
        );
        let reference = traj(
            0.5,
            vec![0.0, 0.5, 1.0],
            vec![vec![1.0, 4.0], vec![2.0, 4.0], vec![3.0, 4.0]],
        );
        let r = error_metrics(&test, &reference).unwrap();
        assert_eq!(r.representative_error, 1.0);
        assert_eq!(r.max_abs_error, 1.0);
        assert!((r.l2_error - 3.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.relative_by_variable[0], 0.0);
        assert!((r.relative_by_variable[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sign_survives_at_the_worst_point() {
        let test = traj(1.0, vec![0.0, 1.0], vec![vec![1.0], vec![0.0]]);
        let reference = traj(1.0, vec![0.0, 1.0], vec![vec![0.8], vec![0.5]]);
        // Errors are +0.2 then -0.5; the representative keeps the minus.
        let r = error_metrics(&test, &reference).unwrap();
        assert_eq!(r.representative_error, -0.5);
        assert_eq!(r.max_abs_error, 0.5);
    }

    #[test]
    fn superset_reference_grids_align() {
        let test = traj(1.0, vec![0.0, 1.0, 2.0], vec![vec![0.0], vec![0.0], vec![0.0]]);
        let reference = traj(
            0.5,
            vec![0.0, 0.5, 1.0, 1.5, 2.0],
            vec![vec![0.0], vec![9.0], vec![1.0], vec![9.0], vec![2.0]],
        );
        let r = error_metrics(&test, &reference).unwrap();
        assert_eq!(r.errors, vec![vec![0.0], vec![-1.0], vec![-2.0]]);
    }

    #[test]
    fn non_integer_step_ratio_rejected() {
        let test = traj(0.7, vec![0.0], vec![vec![0.0]]);
        let reference = traj(0.5, vec![0.0], vec![vec![0.0]]);
        assert!(error_metrics(&test, &reference).is_err());
    }

    #[test]
    fn missing_timestamp_rejected() {
        let test = traj(1.0, vec![0.0, 1.0], vec![vec![0.0], vec![0.0]]);
        let reference = traj(0.5, vec![0.0, 0.5], vec![vec![0.0], vec![0.0]]);
        assert!(error_metrics(&test, &reference).is_err());
    }
}
