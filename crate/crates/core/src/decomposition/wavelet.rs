use super::incidence::IncidencePair;
use super::projector::{FilterBasis, Kind, Metric, ProjectorOperator, Provenance};
use super::spectrum::SpectralWindow;
use crate::Result;

/// Number of dyadic levels `L = ceil(log2 min(N_v - 1 + 2g, N_c - 1))`.
pub fn wavelet_levels(pair: &IncidencePair) -> usize {
    let n_lambda = pair.n_vertices() - 1 + 2 * pair.genus();
    let n_sigma = pair.n_cells() - 1;
    let n = n_lambda.min(n_sigma).max(1);
    // ceil(log2 n) without going through floats
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Window of band `j` in a family with `levels` dyadic levels:
/// `[1, inf]` for `j = 0`, `[2^-j, 2^(1-j))` for `1 <= j <= L` and the
/// terminal band `[0, 2^-L)` for `j = L + 1`.
pub fn band_window(j: usize, levels: usize) -> SpectralWindow {
    assert!(j <= levels + 1, "band {j} out of range for {levels} levels");
    if j == 0 {
        SpectralWindow { low: 1.0, high: None }
    } else if j <= levels {
        SpectralWindow { low: 0.5f64.powi(j as i32), high: Some(0.5f64.powi(j as i32 - 1)) }
    } else {
        SpectralWindow { low: 0.0, high: Some(0.5f64.powi(levels as i32)) }
    }
}

/// Single wavelet band `W_j` of the primal family.
pub fn wavelet_band(
    kind: Kind,
    j: usize,
    pair: &IncidencePair,
    metric: Option<&Metric>,
) -> Result<ProjectorOperator> {
    let levels = wavelet_levels(pair).max(j.saturating_sub(1));
    let basis = FilterBasis::primal(kind, pair, metric, None)?;
    Ok(basis.projector(&band_window(j, levels), Provenance::Band { kind, j }))
}

/// Bands `j = 0..=L` followed by the terminal band. Empty bands are kept as
/// zero-rank placeholders so indices line up across meshes.
pub fn wavelet_family(kind: Kind, pair: &IncidencePair, metric: Option<&Metric>) -> Result<Vec<ProjectorOperator>> {
    let basis = FilterBasis::primal(kind, pair, metric, None)?;
    Ok(family_from_basis(&basis, wavelet_levels(pair)))
}

/// Family of `levels + 2` bands read off an existing spectral basis.
pub fn family_from_basis(basis: &FilterBasis, levels: usize) -> Vec<ProjectorOperator> {
    (0..=levels + 1)
        .map(|j| basis.projector(&band_window(j, levels), Provenance::Band { kind: basis.kind, j }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::build_filtered_projector;
    use crate::linalg;
    use crate::mesh::{make_icosphere, TriangleMesh};
    use faer::Mat;

    fn tetrahedron() -> TriangleMesh {
        let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let t = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
        TriangleMesh::new(v, t).unwrap()
    }

    #[test]
    fn level_count() {
        let pair = IncidencePair::new(&make_icosphere(1, 1.0).unwrap());
        assert_eq!(wavelet_levels(&pair), 6);
        let fam = wavelet_family(Kind::Lambda, &pair, None).unwrap();
        assert_eq!(fam.len(), 8);
    }

    #[test]
    fn k4_bands() {
        let pair = IncidencePair::new(&tetrahedron());
        assert_eq!(wavelet_band(Kind::Lambda, 0, &pair, None).unwrap().rank(), 3);
        assert_eq!(wavelet_band(Kind::Lambda, 1, &pair, None).unwrap().rank(), 0);
    }

    #[test]
    fn windows_tile_unit_interval() {
        let levels = 5;
        for j in 1..=levels + 1 {
            let upper = band_window(j, levels);
            let lower_edge = band_window(j - 1, levels).low;
            assert_eq!(upper.high, Some(lower_edge));
        }
        assert_eq!(band_window(levels + 1, levels).low, 0.0);
    }

    #[test]
    fn family_partitions_full_projector() {
        let pair = IncidencePair::new(&make_icosphere(2, 1.0).unwrap());
        for kind in [Kind::Lambda, Kind::Sigma] {
            let fam = wavelet_family(kind, &pair, None).unwrap();
            let full = build_filtered_projector(kind, &pair, &SpectralWindow::full(), None, None).unwrap();
            let n = pair.n_edges();
            let mut sum = Mat::<f64>::zeros(n, n);
            for w in &fam {
                sum += w.to_dense();
            }
            let err = linalg::spectral_norm_real((&sum - &full.to_dense()).as_ref()).unwrap();
            assert!(err < 1e-10, "{kind:?}: {err:e}");
            let total: usize = fam.iter().map(|w| w.rank()).sum();
            assert_eq!(total, full.rank());
            for i in 0..fam.len() {
                for j in (i + 1)..fam.len() {
                    if fam[i].rank() == 0 || fam[j].rank() == 0 {
                        continue;
                    }
                    let cross = fam[i].basis().transpose() * fam[j].basis();
                    let c = linalg::spectral_norm_real(cross.as_ref()).unwrap();
                    assert!(c < 1e-10, "bands {i},{j}: {c:e}");
                }
            }
        }
    }

    #[test]
    fn star_ranks_sum_to_cells_minus_one() {
        let pair = IncidencePair::new(&make_icosphere(2, 1.0).unwrap());
        let fam = wavelet_family(Kind::Sigma, &pair, None).unwrap();
        let levels = wavelet_levels(&pair);
        let graded: usize = fam[..=levels].iter().map(|w| w.rank()).sum();
        assert_eq!(graded, pair.n_cells() - 1);
    }
}
