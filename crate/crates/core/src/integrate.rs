//! Fixed-step time integration: explicit and implicit stepping of the
//! lifted linear system, a Jacobian-linearized baseline on the original
//! nonlinear system, and the brute-force forward-Euler reference used to
//! measure everything else.

use crate::block::{BlockLu, BlockMatrix};
use crate::carleman::{lift, CarlemanSystem, LiftedState};
use crate::error::Error;
use crate::lu::solve_sparse_lu;
use crate::poly::PolynomialSystem;
use crate::sparse::SparseMatrix;

pub const DEFAULT_DIVERGENCE_NORM_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExplicitCarleman,
    ImplicitCarleman,
    JacobianLinearized,
    ReferenceEuler,
}

/// How often the lifted state is rebuilt from its own readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relift {
    /// Keep the lifted state as propagated by the linear dynamics.
    Never,
    /// Replace X by lift(readout(X)) every k steps.
    Every(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    /// Truncation order; ignored by the non-lifted methods.
    pub n_t: usize,
    pub relift_every: Relift,
    pub record_stride: usize,
    pub divergence_norm_cap: f64,
}

impl IntegrationConfig {
    pub fn new(dt: f64, t_end: f64, method: Method, n_t: usize) -> Self {
        Self {
            dt,
            t_end,
            method,
            n_t,
            relift_every: Relift::Never,
            record_stride: 1,
            divergence_norm_cap: DEFAULT_DIVERGENCE_NORM_CAP,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t_end must be at least dt, got t_end={} dt={}",
                self.t_end, self.dt
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidConfig("record_stride must be at least 1".into()));
        }
        if self.n_t == 0 {
            return Err(Error::InvalidConfig("truncation order must be at least 1".into()));
        }
        if let Relift::Every(0) = self.relift_every {
            return Err(Error::InvalidConfig("relift interval must be at least 1".into()));
        }
        if self.divergence_norm_cap.is_nan() || self.divergence_norm_cap <= 0.0 {
            return Err(Error::InvalidConfig("divergence_norm_cap must be positive".into()));
        }
        Ok(())
    }
}

/// Recorded time history of one run. `diverged_at` carries the time of the
/// first step whose result breached the norm cap or went non-finite; that
/// state itself is not recorded, so everything in `states` is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub diverged_at: Option<f64>,
    pub metadata: IntegrationConfig,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

fn any_non_finite(v: &[f64]) -> bool {
    v.iter().any(|x| !x.is_finite())
}

/// One explicit step of the lifted system: X' = X + dt·(A_c·X).
pub fn explicit_carleman_step(
    cs: &CarlemanSystem,
    x: &LiftedState,
    dt: f64,
) -> Result<LiftedState, Error> {
    check_lift_conformity(cs, x)?;
    let ax = cs.a_c().spmv(x.values())?;
    let mut out = x.values().to_vec();
    for (o, a) in out.iter_mut().zip(&ax) {
        *o += dt * a;
    }
    if any_non_finite(&out) {
        return Err(Error::DivergenceDetected { t: dt });
    }
    LiftedState::new(out, x.n_state(), x.n_t())
}

/// Implicit stepper with the shifted matrix factored once up front.
#[derive(Debug, Clone)]
pub struct ImplicitCarleman {
    lu: BlockLu,
    n_state: usize,
    n_t: usize,
}

impl ImplicitCarleman {
    pub fn new(cs: &CarlemanSystem, dt: f64) -> Result<Self, Error> {
        let shifted = shifted_identity_minus(cs.a_c(), dt)?;
        Ok(Self {
            lu: BlockLu::new(shifted)?,
            n_state: cs.n_state(),
            n_t: cs.n_t(),
        })
    }

    /// Solve (I − dt·A_c)·X' = X.
    pub fn step(&self, x: &LiftedState) -> Result<LiftedState, Error> {
        if x.n_state() != self.n_state || x.n_t() != self.n_t {
            return Err(Error::VectorLength {
                expected: self.lu.matrix().dim(),
                found: x.values().len(),
            });
        }
        let out = self.lu.solve(x.values())?;
        if any_non_finite(&out) {
            return Err(Error::DivergenceDetected { t: 0.0 });
        }
        LiftedState::new(out, self.n_state, self.n_t)
    }
}

/// One implicit step; factors the shifted matrix on the spot. Use
/// [`ImplicitCarleman`] to amortize the factorization across a run.
pub fn implicit_carleman_step(
    cs: &CarlemanSystem,
    x: &LiftedState,
    dt: f64,
) -> Result<LiftedState, Error> {
    check_lift_conformity(cs, x)?;
    ImplicitCarleman::new(cs, dt)?.step(x)
}

fn check_lift_conformity(cs: &CarlemanSystem, x: &LiftedState) -> Result<(), Error> {
    if x.n_state() != cs.n_state() || x.n_t() != cs.n_t() {
        return Err(Error::VectorLength {
            expected: cs.dim(),
            found: x.values().len(),
        });
    }
    Ok(())
}

/// I − dt·M over M's block partition.
fn shifted_identity_minus(m: &BlockMatrix, dt: f64) -> Result<BlockMatrix, Error> {
    let mut out = BlockMatrix::new(m.block_dims().to_vec())?;
    for (i, j, blk) in m.blocks() {
        let scaled = blk.scale(-dt);
        if i == j {
            out.insert_block(i, j, scaled.add(&SparseMatrix::identity(blk.rows()))?)?;
        } else {
            out.insert_block(i, j, scaled)?;
        }
    }
    for (i, &d) in m.block_dims().iter().enumerate() {
        if out.block(i, i).is_none() {
            out.insert_block(i, i, SparseMatrix::identity(d))?;
        }
    }
    Ok(out)
}

/// Linearized update u' = u + (I − dt·J(u))⁻¹ · dt·F(u) on the original
/// nonlinear system.
pub fn jacobian_linearized_step(
    sys: &PolynomialSystem,
    u: &[f64],
    dt: f64,
) -> Result<Vec<f64>, Error> {
    let f = sys.eval_rhs(u)?;
    let jac = sys.jacobian(u)?;
    let shifted = SparseMatrix::identity(sys.n_state()).add(&jac.scale(-dt))?;
    let rhs: Vec<f64> = f.iter().map(|v| dt * v).collect();
    let w = solve_sparse_lu(&shifted, &rhs)?;
    let out: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + b).collect();
    if any_non_finite(&out) {
        return Err(Error::DivergenceDetected { t: dt });
    }
    Ok(out)
}

/// Brute-force forward Euler at a fine internal step, recorded exactly at
/// the requested times (which are stored verbatim so downstream grids align
/// bitwise). Each requested time must sit on the internal step grid.
pub fn reference_integrate(
    sys: &PolynomialSystem,
    x0: &[f64],
    dt_ref: f64,
    t_end: f64,
    record_times: &[f64],
) -> Result<Trajectory, Error> {
    if !(dt_ref > 0.0 && dt_ref.is_finite()) {
        return Err(Error::InvalidConfig(format!("reference dt must be positive, got {dt_ref}")));
    }
    if x0.len() != sys.n_state() {
        return Err(Error::VectorLength { expected: sys.n_state(), found: x0.len() });
    }
    let mut record_steps = Vec::with_capacity(record_times.len());
    let mut prev = f64::NEG_INFINITY;
    for &t in record_times {
        if t < 0.0 || t > t_end + 1e-6 * dt_ref {
            return Err(Error::InvalidConfig(format!(
                "record time {t} outside [0, {t_end}]"
            )));
        }
        if t <= prev {
            return Err(Error::InvalidConfig("record times must be strictly increasing".into()));
        }
        prev = t;
        let steps = (t / dt_ref).round();
        if (steps * dt_ref - t).abs() > 1e-6 * dt_ref {
            return Err(Error::InvalidConfig(format!(
                "record time {t} is not a whole number of reference steps (dt_ref = {dt_ref})"
            )));
        }
        record_steps.push(steps as usize);
    }

    let mut x = x0.to_vec();
    let mut times = Vec::with_capacity(record_times.len());
    let mut states = Vec::with_capacity(record_times.len());
    let mut next = 0usize;
    let last_step = record_steps.last().copied().unwrap_or(0);
    for k in 0..=last_step {
        if next < record_steps.len() && record_steps[next] == k {
            times.push(record_times[next]);
            states.push(x.clone());
            next += 1;
        }
        if k == last_step {
            break;
        }
        let f = sys.eval_rhs(&x)?;
        for (xi, fi) in x.iter_mut().zip(&f) {
            *xi += dt_ref * fi;
        }
        if any_non_finite(&x) || max_abs(&x) > DEFAULT_DIVERGENCE_NORM_CAP {
            return Err(Error::DivergenceDetected { t: (k + 1) as f64 * dt_ref });
        }
    }

    let mut metadata = IntegrationConfig::new(dt_ref, t_end, Method::ReferenceEuler, 1);
    metadata.record_stride = 1;
    Ok(Trajectory { times, states, diverged_at: None, metadata })
}

/// Run one configured integration from a physical initial state. The
/// horizon is rounded to the nearest whole number of steps. Records the
/// physical state (readout for the lifted methods) at step 0 and every
/// `record_stride` steps after; on a norm-cap breach or non-finite value
/// the run halts with `diverged_at` set and the offending state dropped.
pub fn simulate(
    sys: &PolynomialSystem,
    x0: &[f64],
    cfg: &IntegrationConfig,
) -> Result<Trajectory, Error> {
    cfg.validate()?;
    if x0.len() != sys.n_state() {
        return Err(Error::VectorLength { expected: sys.n_state(), found: x0.len() });
    }
    if any_non_finite(x0) {
        return Err(Error::InvalidConfig("initial state has non-finite entries".into()));
    }
    let n_steps = (cfg.t_end / cfg.dt).round().max(1.0) as usize;

    match cfg.method {
        Method::ExplicitCarleman | Method::ImplicitCarleman => {
            simulate_lifted(sys, x0, cfg, n_steps)
        }
        Method::JacobianLinearized | Method::ReferenceEuler => {
            simulate_pointwise(sys, x0, cfg, n_steps)
        }
    }
}

fn simulate_lifted(
    sys: &PolynomialSystem,
    x0: &[f64],
    cfg: &IntegrationConfig,
    n_steps: usize,
) -> Result<Trajectory, Error> {
    let n = sys.n_state();
    let cs = crate::carleman::assemble(sys, cfg.n_t)?;
    let implicit = match cfg.method {
        Method::ImplicitCarleman => Some(ImplicitCarleman::new(&cs, cfg.dt)?),
        _ => None,
    };
    let mut x = lift(x0, cfg.n_t)?.into_values();
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let mut diverged_at = None;
    let mut ax = vec![0.0; cs.dim()];

    for k in 1..=n_steps {
        match &implicit {
            Some(stepper) => {
                x = stepper.lu.solve(&x)?;
            }
            None => {
                cs.a_c().spmv_into(&x, &mut ax)?;
                for (xi, ai) in x.iter_mut().zip(&ax) {
                    *xi += cfg.dt * ai;
                }
            }
        }
        let t = k as f64 * cfg.dt;
        if any_non_finite(&x) || max_abs(&x) > cfg.divergence_norm_cap {
            diverged_at = Some(t);
            break;
        }
        if let Relift::Every(interval) = cfg.relift_every {
            if k % interval == 0 {
                let phys = x[..n].to_vec();
                x = lift(&phys, cfg.n_t)?.into_values();
            }
        }
        if k % cfg.record_stride == 0 {
            times.push(t);
            states.push(x[..n].to_vec());
        }
    }

    Ok(Trajectory { times, states, diverged_at, metadata: cfg.clone() })
}

fn simulate_pointwise(
    sys: &PolynomialSystem,
    x0: &[f64],
    cfg: &IntegrationConfig,
    n_steps: usize,
) -> Result<Trajectory, Error> {
    let mut x = x0.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let mut diverged_at = None;

    for k in 1..=n_steps {
        match cfg.method {
            Method::JacobianLinearized => {
                x = jacobian_linearized_step(sys, &x, cfg.dt).map_err(|e| match e {
                    Error::DivergenceDetected { .. } => {
                        Error::DivergenceDetected { t: k as f64 * cfg.dt }
                    }
                    other => other,
                })?;
            }
            _ => {
                let f = sys.eval_rhs(&x)?;
                for (xi, fi) in x.iter_mut().zip(&f) {
                    *xi += cfg.dt * fi;
                }
            }
        }
        let t = k as f64 * cfg.dt;
        if any_non_finite(&x) || max_abs(&x) > cfg.divergence_norm_cap {
            diverged_at = Some(t);
            break;
        }
        if k % cfg.record_stride == 0 {
            times.push(t);
            states.push(x.clone());
        }
    }

    Ok(Trajectory { times, states, diverged_at, metadata: cfg.clone() })
}
