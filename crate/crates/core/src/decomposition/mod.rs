//! Loop/star incidence matrices, Laplacian-filtered quasi-Helmholtz
//! projectors and wavelet bands.

mod export;
mod incidence;
mod projector;
mod spectrum;
mod wavelet;

pub use export::{write_incidence, write_projector, ProjectorSidecar};
pub use incidence::IncidencePair;
pub use projector::{
    build_dual_filtered_projector, build_filtered_projector, harmonic_projector, FilterBasis, Kind, Metric,
    ProjectorOperator, Provenance, Space,
};
pub use spectrum::{filtered_pinv, FilteredPinv, LaplacianEigen, LaplacianSource, SpectralWindow, EDGE_TOL, NULL_TOL};
pub use wavelet::{band_window, family_from_basis, wavelet_band, wavelet_family, wavelet_levels};
