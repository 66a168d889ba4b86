//! Gaussian expansion method solvers for quantum few-body systems.
//!
//! * [`gem2b`]: two-body problems in 1D/2D/3D, bound states, complex-scaled
//!   resonances, complex-ranged bases, range optimization, inverse problem
//!   and coupled channels.
//! * [`gem3b1d`]: three bodies on a line with parity-wave channels.
//! * [`isgl3d`]: three bodies in 3D, s-wave channels in every Jacobi set,
//!   with central observables.

pub mod basis;
pub mod eigensolve;
pub mod error;
pub mod gaussian;
pub mod gem2b;
pub mod gem3b1d;
pub mod isgl3d;
pub mod potentials;
pub mod threebody;

pub use basis::{BasisFunction, BasisSet, Dim, RangeProgression};
pub use eigensolve::{Assembled, AssembledSystem, Eigenpairs, Spectrum};
pub use error::{FewBodyError, Result};
pub use faer::c64;
pub use potentials::{Domain, KernelRequest, PotentialModel};
