//! Grassmann matrix product states with a Clifford disentangling step inside
//! two-site DMRG, for spinless-fermion chains.

extern crate blas_src;

pub mod error;
pub mod grassmann;

pub use error::{Error, Result};
pub use grassmann::{parity_of, GrassmannTensor, Leg, Parity, SplitPlan, Svd, C64};
pub mod analysis;
pub mod clifford;
pub mod dmrg;
pub mod ed;
pub mod env;
pub mod gmps;
pub mod lanczos;
pub mod models;
pub mod pauli;

pub use dmrg::{run, RunOutput, SweepConfig, SweepReport};
pub use gmps::Gmps;
pub use models::{build_tight_binding, build_tv, ModelKind, ModelSpec};
pub use pauli::{dense_operator, make_fermion_ops, make_pauli, string_parity, Hamiltonian, PauliLabel, PauliString};
