//! Morphs a genus-0 mesh onto the unit sphere and low-pass filters a vertex
//! signal with spherical harmonics, without any eigendecomposition.

use lfqh::decomposition::SpectralWindow;
use lfqh::mesh::make_icosphere;
use lfqh::spherefilter::{fast_vertex_filter, lumped_mass, morph_to_sphere, FilterOptions};

fn main() -> lfqh::Result<()> {
    // an ellipsoid, so the morph has work to do
    let mesh = make_icosphere(3, 1.0)?.map_vertices(|p| [1.5 * p[0], p[1], 0.7 * p[2]])?;
    let map = morph_to_sphere(&mesh)?;
    let q = &map.quality;
    println!("morph: {} sweeps, area ratio {:.2}, folds {}", q.sweeps, q.area_ratio, q.folds);

    let y: Vec<f64> = map.positions().iter().map(|p| p[2] + 0.3 * (12.0 * p[0]).sin()).collect();
    let mass = lumped_mass(&map);
    let energy = |v: &[f64]| v.iter().zip(&mass).map(|(a, m)| a * a * m).sum::<f64>().sqrt();
    for (lo, hi) in [(0.0, Some(0.05)), (0.05, None)] {
        let out = fast_vertex_filter(&map, &y, &SpectralWindow::new(lo, hi)?, None, &FilterOptions::default())?;
        println!(
            "window [{lo}, {}): bandwidth {}, kept energy fraction {:.3}",
            hi.map_or("inf".into(), |h| h.to_string()),
            out.bandwidth,
            energy(&out.values) / energy(&y)
        );
    }
    Ok(())
}
