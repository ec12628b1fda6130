//! Laplacian-filtered quasi-Helmholtz projectors for the electric field
//! integral equation.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`] closed oriented triangle meshes, generators and OFF/OBJ readers;
//! * [`decomposition`] loop/star incidence matrices, graph Laplacian spectra,
//!   filtered projectors, harmonic complements and wavelet bands;
//! * [`efie`] RWG Gram matrix, EFIE operator assembly and plane-wave excitation;
//! * [`precond`] low-frequency rescaling, the wavelet additive-Schwarz
//!   preconditioner, GMRES and spectrum reports;
//! * [`spherefilter`] sphere morphing and spherical-harmonic filtering used to
//!   apply projectors without an eigendecomposition;
//! * [`experiment`] batch drivers behind the `lfqh` command line tool.

pub mod decomposition;
pub mod efie;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod linalg;
pub mod mesh;
pub mod precond;
pub mod spherefilter;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
