//! Command-line surface: argument definitions and the drivers behind them.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use carleman_chem::{parse_mechanism, parse_mechanism_with_thermo, to_polynomial, Mechanism};
use carleman_core::{
    assemble, reference_integrate, simulate, write_matrix_market, PolynomialSystem, SparseMatrix,
};

use crate::config::{Problem, RunConfig};
use crate::cost::cost_estimate;
use crate::csvio::{write_sweep_csv, write_trajectory_csv};
use crate::error::CliError;
use crate::mixture::{concentrations, mole_fractions_from_map, mole_fractions_from_phi};
use crate::sweep::{grid_times, sweep};

#[derive(Debug, Parser)]
#[command(
    name = "carleman",
    version,
    about = "Carleman linearization of polynomial ODE systems, with kinetics front end"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the configured problem and write trajectory.csv.
    Simulate { config: PathBuf },
    /// Integrate the brute-force reference and write reference.csv on the
    /// same record grid the configured run would use.
    Reference { config: PathBuf },
    /// Error study over a (dt, truncation order) grid; writes sweep.csv.
    Sweep {
        config: PathBuf,
        /// Comma-separated step sizes; defaults to the configured dt.
        #[arg(long, value_delimiter = ',')]
        dt: Vec<f64>,
        /// Comma-separated truncation orders; defaults to the configured n_t.
        #[arg(long, value_delimiter = ',')]
        nt: Vec<usize>,
    },
    /// Assemble the lifted matrix and report its size.
    Assemble {
        config: PathBuf,
        /// Also write carleman_matrix.mtx and block_offsets.txt.
        #[arg(long)]
        dump: bool,
    },
    /// Size forecast for a hypothetical system, without assembling it.
    Estimate {
        /// Number of state variables.
        #[arg(long)]
        species: usize,
        /// Truncation order.
        #[arg(long)]
        nt: usize,
        /// Comma-separated nonzero counts of the degree-1, 2, ... coefficients.
        #[arg(long, value_delimiter = ',')]
        nnz: Vec<usize>,
    },
    /// Parse and validate a mechanism file.
    Check {
        mechanism: PathBuf,
        /// External thermo database for mechanisms without an inline block.
        #[arg(long)]
        thermo: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config } => simulate_cmd(&config),
        Command::Reference { config } => reference_cmd(&config),
        Command::Sweep { config, dt, nt } => sweep_cmd(&config, &dt, &nt),
        Command::Assemble { config, dump } => assemble_cmd(&config, dump),
        Command::Estimate { species, nt, nnz } => estimate_cmd(species, nt, &nnz),
        Command::Check { mechanism, thermo } => check_cmd(&mechanism, thermo.as_deref()),
    }
}

/// A ready-to-integrate problem: the polynomial system, its initial state,
/// and the column names for trajectory output.
pub struct BuiltProblem {
    pub sys: PolynomialSystem,
    pub x0: Vec<f64>,
    pub names: Vec<String>,
    pub mole_fraction_output: bool,
}

pub fn build_problem(cfg: &RunConfig) -> Result<BuiltProblem, CliError> {
    match &cfg.problem {
        Problem::Scalar { alpha, y0 } => {
            let a2 = SparseMatrix::from_triplets(1, 1, [(0, 0, -alpha)])
                .map_err(CliError::from)?;
            let sys = PolynomialSystem::new(1, vec![SparseMatrix::zero(1, 1), a2])
                .map_err(CliError::from)?;
            Ok(BuiltProblem {
                sys,
                x0: vec![*y0],
                names: vec!["y".to_string()],
                mole_fraction_output: false,
            })
        }
        Problem::Mechanism {
            file,
            temperature_k,
            pressure_atm,
            equivalence_ratio,
            fuel,
            oxidizer,
            initial_mole_fractions,
        } => {
            let mech = load_mechanism(file, None)?;
            let x = match (equivalence_ratio, initial_mole_fractions) {
                (Some(phi), None) => {
                    let fuel = fuel.as_deref().ok_or_else(|| {
                        CliError::Invalid("equivalence_ratio needs a fuel name".into())
                    })?;
                    mole_fractions_from_phi(&mech, fuel, *phi, oxidizer.as_ref())?
                }
                (None, Some(map)) => mole_fractions_from_map(&mech, map)?,
                _ => {
                    return Err(CliError::Invalid(
                        "mechanism problem needs exactly one mixture description".into(),
                    ))
                }
            };
            let x0 = concentrations(&x, *temperature_k, *pressure_atm);
            let sys = to_polynomial(&mech, *temperature_k)?;
            let names = mech.species().iter().map(|s| s.name.clone()).collect();
            Ok(BuiltProblem {
                sys,
                x0,
                names,
                mole_fraction_output: !cfg.output.raw_concentrations,
            })
        }
    }
}

fn load_mechanism(path: &Path, thermo: Option<&Path>) -> Result<Mechanism, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let parsed = match thermo {
        None => parse_mechanism(&text),
        Some(tp) => {
            let ttext = fs::read_to_string(tp)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", tp.display())))?;
            parse_mechanism_with_thermo(&text, &ttext)
        }
    };
    parsed.map_err(|diags| {
        let lines: Vec<String> =
            diags.iter().map(|d| format!("{}: {d}", path.display())).collect();
        CliError::Invalid(lines.join("\n"))
    })
}

fn prepared_output_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn simulate_cmd(config: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let built = build_problem(&cfg)?;
    let traj = simulate(&built.sys, &built.x0, &cfg.integration.to_core())
        .map_err(CliError::from)?;
    let path = prepared_output_dir(&cfg)?.join("trajectory.csv");
    write_trajectory_csv(&path, &built.names, &traj, built.mole_fraction_output)?;
    println!("wrote {} ({} rows)", path.display(), traj.times.len());
    if let Some(t) = traj.diverged_at {
        return Err(CliError::Numerics(format!("run diverged at t = {t:.6e}")));
    }
    Ok(())
}

fn reference_cmd(config: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let built = build_problem(&cfg)?;
    let s = &cfg.integration;
    let times = grid_times(s.dt, s.t_end, s.record_stride);
    let traj = reference_integrate(&built.sys, &built.x0, cfg.reference_dt(), s.t_end, &times)
        .map_err(CliError::from)?;
    let path = prepared_output_dir(&cfg)?.join("reference.csv");
    write_trajectory_csv(&path, &built.names, &traj, built.mole_fraction_output)?;
    println!("wrote {} ({} rows)", path.display(), traj.times.len());
    Ok(())
}

fn sweep_cmd(config: &Path, dt: &[f64], nt: &[usize]) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let built = build_problem(&cfg)?;
    let dt_grid = if dt.is_empty() { vec![cfg.integration.dt] } else { dt.to_vec() };
    let nt_grid = if nt.is_empty() { vec![cfg.integration.n_t] } else { nt.to_vec() };
    let rows = sweep(
        &built.sys,
        &built.x0,
        &cfg.integration.to_core(),
        cfg.reference_dt(),
        &dt_grid,
        &nt_grid,
    )?;
    let diverged = rows.iter().filter(|r| r.diverged).count();
    let path = prepared_output_dir(&cfg)?.join("sweep.csv");
    write_sweep_csv(&path, &rows)?;
    println!("wrote {} ({} rows, {} diverged)", path.display(), rows.len(), diverged);
    Ok(())
}

fn assemble_cmd(config: &Path, dump: bool) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let built = build_problem(&cfg)?;
    let cs = assemble(&built.sys, cfg.integration.n_t).map_err(CliError::from)?;
    println!(
        "dim={} nnz={} n_state={} n_t={}",
        cs.dim(),
        cs.nnz(),
        cs.n_state(),
        cs.n_t()
    );
    if dump {
        let dir = prepared_output_dir(&cfg)?;
        let sparse = cs.a_c().to_sparse().map_err(CliError::from)?;
        fs::write(dir.join("carleman_matrix.mtx"), write_matrix_market(&sparse))?;
        let offsets: String =
            cs.offsets().iter().map(|o| format!("{o}\n")).collect();
        fs::write(dir.join("block_offsets.txt"), offsets)?;
        println!("wrote {} and {}",
            dir.join("carleman_matrix.mtx").display(),
            dir.join("block_offsets.txt").display());
    }
    Ok(())
}

fn estimate_cmd(species: usize, nt: usize, nnz: &[usize]) -> Result<(), CliError> {
    let est = cost_estimate(species, nt, nnz)?;
    let mut line = format!("dim={}", est.dim);
    if let Some(r) = est.ratio_to_prev_order {
        line.push_str(&format!(" ratio={r:.3}"));
    }
    if let Some(n) = est.nnz_estimate {
        line.push_str(&format!(" nnz_bound={n}"));
    }
    println!("{line}");
    Ok(())
}

fn check_cmd(mechanism: &Path, thermo: Option<&Path>) -> Result<(), CliError> {
    let mech = load_mechanism(mechanism, thermo)?;
    let with_thermo = mech.species().iter().filter(|s| s.thermo.is_some()).count();
    println!(
        "{}: {} elements, {} species ({} with thermo), {} reactions, max molecularity {}",
        mechanism.display(),
        mech.elements().len(),
        mech.n_species(),
        with_thermo,
        mech.reactions().len(),
        mech.max_molecularity()
    );
    Ok(())
}
