//! Projector application without an eigendecomposition: the mesh is mapped
//! onto the unit sphere, where the variational vertex Laplacian is close to
//! the Laplace-Beltrami operator and spectral windows become selections of
//! spherical-harmonic degrees.

mod filter;
mod locate;
mod morph;
mod sht;

pub use filter::{
    default_bandwidth, degree_weights, fast_projector_apply, fast_vertex_filter, lumped_mass, Calibration,
    FilterOptions, FilterOutput, ProjectorOptions, ProjectorOutput, SphereFilter, Weighting,
};
pub use locate::{Location, Locator};
pub use morph::{count_folds, morph_to_sphere, MapQuality, SphereMap, MAX_SWEEPS};
pub use sht::{legendre_table, sh_analysis, sh_synthesis, sh_synthesis_grid, ShCoefficients, ShGrid};
