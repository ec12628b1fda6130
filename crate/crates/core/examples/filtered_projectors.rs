//! Filtered quasi-Helmholtz projectors: the full loop and star projectors
//! split the edge space on a sphere, leave a 2g-dimensional harmonic part on
//! a torus, and windowed versions select parts of the graph spectrum.

use lfqh::decomposition::{
    build_filtered_projector, harmonic_projector, FilterBasis, IncidencePair, Kind, Provenance, SpectralWindow,
};
use lfqh::linalg;
use lfqh::mesh::{make_icosphere, make_torus};

fn main() -> lfqh::Result<()> {
    let full = SpectralWindow::full();
    for (name, mesh) in [("icosphere(1)", make_icosphere(1, 1.0)?), ("torus", make_torus(8, 6, 2.0, 0.5)?)] {
        let pair = IncidencePair::new(&mesh);
        let pl = build_filtered_projector(Kind::Lambda, &pair, &full, None, None)?;
        let ps = build_filtered_projector(Kind::Sigma, &pair, &full, None, None)?;
        let h = harmonic_projector(&pl, &ps, pair.genus())?;
        println!(
            "{name}: N={} rank P_Lambda={} rank P_Sigma={} rank P_H={}",
            pair.n_edges(),
            pl.rank(),
            ps.rank(),
            h.rank()
        );
    }

    let pair = IncidencePair::new(&make_icosphere(2, 1.0)?);
    let basis = FilterBasis::primal(Kind::Lambda, &pair, None, None)?;
    println!("loop Laplacian: lambda_max {:.3}, nullity {}", basis.eigen().lambda_max(), basis.eigen().nullity());
    for (lo, hi) in [(0.0, Some(0.1)), (0.1, Some(0.5)), (0.5, None)] {
        let w = SpectralWindow::new(lo, hi)?;
        let p = basis.projector(&w, Provenance::Filtered(Kind::Lambda));
        let x: Vec<f64> = (0..pair.n_edges()).map(|i| (i as f64 * 0.37).sin()).collect();
        let px = p.apply(&x);
        let ppx = p.apply(&px);
        let diff: Vec<f64> = px.iter().zip(&ppx).map(|(a, b)| a - b).collect();
        println!(
            "window [{lo}, {}): rank {:>3}, ||Px||/||x|| = {:.3}, ||PPx - Px|| = {:.1e}",
            hi.map_or("inf".into(), |h| h.to_string()),
            p.rank(),
            linalg::norm(&px) / linalg::norm(&x),
            linalg::norm(&diff)
        );
    }
    Ok(())
}
