//! Lifting polynomial ODE systems to truncated linear ones and stepping
//! them in time.
//!
//! The pipeline: a [`poly::PolynomialSystem`] describes dx/dt as a sum of
//! Kronecker-power terms; [`carleman::assemble`] turns it into one block
//! upper-triangular matrix over the stacked powers of x; the steppers in
//! [`integrate`] advance that linear system (or the original nonlinear one,
//! for baselines) and record trajectories. The sparse kernels underneath
//! are deliberately minimal: coordinate storage, Kronecker products, and a
//! reusable LU with partial pivoting.

pub mod block;
pub mod carleman;
pub mod error;
pub mod integrate;
pub mod lu;
pub mod poly;
pub mod sparse;

pub use block::{solve_block_upper_triangular, BlockLu, BlockMatrix};
pub use carleman::{
    assemble, consistency_defect, lift, lifted_dim, readout, rescale_system, transfer_block,
    CarlemanSystem, LiftedState,
};
pub use error::Error;
pub use integrate::{
    explicit_carleman_step, implicit_carleman_step, jacobian_linearized_step, reference_integrate,
    simulate, ImplicitCarleman, IntegrationConfig, Method, Relift, Trajectory,
    DEFAULT_DIVERGENCE_NORM_CAP,
};
pub use lu::{solve_sparse_lu, SparseLu};
pub use poly::{kron_power, PolynomialSystem};
pub use sparse::{kron, kron_vec, read_matrix_market, write_matrix_market, SparseMatrix};
