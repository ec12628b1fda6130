//! Dyadic wavelet bands of the loop and star Laplacians. The bands are
//! mutually orthogonal and sum to the full projector.

use lfqh::decomposition::{
    band_window, build_filtered_projector, wavelet_family, wavelet_levels, IncidencePair, Kind, SpectralWindow,
};
use lfqh::linalg;
use lfqh::mesh::make_icosphere;

fn main() -> lfqh::Result<()> {
    let pair = IncidencePair::new(&make_icosphere(2, 1.0)?);
    let levels = wavelet_levels(&pair);
    println!("{} edges, {levels} bands per family", pair.n_edges());
    for kind in [Kind::Lambda, Kind::Sigma] {
        let family = wavelet_family(kind, &pair, None)?;
        let mut sum = faer::Mat::<f64>::zeros(pair.n_edges(), pair.n_edges());
        for (j, w) in family.iter().enumerate() {
            let win = band_window(j, levels);
            println!(
                "{kind:?} band {j}: [{:.4}, {}) rank {}",
                win.low,
                win.high.map_or("inf".into(), |h| format!("{h:.4}")),
                w.rank()
            );
            sum += w.to_dense();
        }
        let p0 = build_filtered_projector(kind, &pair, &SpectralWindow::full(), None, None)?.to_dense();
        let dev = linalg::spectral_norm_real((&sum - &p0).as_ref())?;
        println!("{kind:?}: ||sum W_j - P_0|| = {dev:.1e}");
    }
    Ok(())
}
