//! Numerical laboratory for the L2-critical inhomogeneous nonlinear
//! Schrodinger equation `i u_t + Delta u + |x|^{-b} |u|^{p-1} u = 0` with
//! `p = 1 + (4 - 2b)/N`.

pub mod cli;
pub mod discretization;
pub mod error;
pub mod evolution;
pub mod functionals;
pub mod ground_state;
pub mod io;
pub mod model;
pub mod numerics;
pub mod spectral;
pub mod transforms;
pub mod verify;

pub use discretization::Discretization;
pub use error::{InlsError, Result};
pub use model::{CartesianGrid, Centering, Field, Params, RadialGrid};
