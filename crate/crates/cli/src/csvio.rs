//! CSV emission and re-parsing. Values are written with 17 significant
//! digits so files round-trip to the exact same doubles.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use carleman_core::Trajectory;

use crate::error::CliError;
use crate::sweep::SweepRow;

/// Renders a trajectory as `t,<name>,...` rows. With `mole_fractions` each
/// row is normalized by its sum (zero rows are left as written).
pub fn trajectory_csv(names: &[String], traj: &Trajectory, mole_fractions: bool) -> String {
    let mut out = String::new();
    out.push('t');
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let _ = write!(out, "{t:.16e}");
        let total: f64 = state.iter().sum();
        let scale = if mole_fractions && total != 0.0 { 1.0 / total } else { 1.0 };
        for v in state {
            let _ = write!(out, ",{:.16e}", v * scale);
        }
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(
    path: &Path,
    names: &[String],
    traj: &Trajectory,
    mole_fractions: bool,
) -> Result<(), CliError> {
    fs::write(path, trajectory_csv(names, traj, mole_fractions))?;
    Ok(())
}

/// Column names, times, and value rows from a trajectory CSV.
pub type ParsedTrajectory = (Vec<String>, Vec<f64>, Vec<Vec<f64>>);

/// Re-parses a trajectory CSV into its header names, times, and rows.
pub fn parse_trajectory_csv(text: &str) -> Result<ParsedTrajectory, CliError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::Invalid("empty CSV".into()))?;
    let mut cols = header.split(',');
    if cols.next() != Some("t") {
        return Err(CliError::Invalid("first CSV column must be t".into()));
    }
    let names: Vec<String> = cols.map(str::to_string).collect();
    let mut times = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut values = line.split(',').map(|f| {
            f.parse::<f64>()
                .map_err(|e| CliError::Invalid(format!("CSV row {}: {e}", i + 2)))
        });
        let t = values
            .next()
            .ok_or_else(|| CliError::Invalid(format!("CSV row {}: empty", i + 2)))??;
        let row: Vec<f64> = values.collect::<Result<_, _>>()?;
        if row.len() != names.len() {
            return Err(CliError::Invalid(format!(
                "CSV row {}: {} values for {} columns",
                i + 2,
                row.len(),
                names.len()
            )));
        }
        times.push(t);
        rows.push(row);
    }
    Ok((names, times, rows))
}

/// Renders the sweep table. Diverged rows leave their error fields empty.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "dt,n_t,representative_error,max_abs_error,l2_error,diverged,wall_secs,dim,nnz\n",
    );
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:.16e},{},{},{},{},{},{:.6},{},{}",
            r.dt,
            r.n_t,
            opt(r.representative_error),
            opt(r.max_abs_error),
            opt(r.l2_error),
            r.diverged,
            r.wall_secs,
            r.dim,
            r.nnz
        );
    }
    out
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    fs::write(path, sweep_csv(rows))?;
    Ok(())
}
