//! Applies the Gram-weighted loop projector through the sphere filter and
//! compares it with the dense eigendecomposition route.

use lfqh::decomposition::{build_filtered_projector, IncidencePair, Kind, Metric, SpectralWindow};
use lfqh::efie::assemble_gram;
use lfqh::linalg;
use lfqh::mesh::make_icosphere;
use lfqh::spherefilter::{fast_projector_apply, morph_to_sphere, ProjectorOptions};

fn main() -> lfqh::Result<()> {
    let mesh = make_icosphere(2, 1.0)?;
    let pair = IncidencePair::new(&mesh);
    let g = assemble_gram(&mesh);
    let metric = Metric::new(g.clone())?;
    let window = SpectralWindow::full();
    let dense = build_filtered_projector(Kind::Lambda, &pair, &window, Some(&metric), None)?;
    let map = morph_to_sphere(&mesh)?;

    let x: Vec<f64> = (0..pair.n_edges()).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
    // the dense projector acts in sqrt(G) coordinates
    let reference = linalg::matvec(metric.inv_sqrt(), &dense.apply(&linalg::matvec(metric.sqrt(), &x)));

    for (name, opts) in [
        ("single pass", ProjectorOptions { refine_tol: None, ..Default::default() }),
        ("refined", ProjectorOptions::default()),
    ] {
        let out = fast_projector_apply(&pair, &map, &g, &x, &window, None, &opts)?;
        let d: Vec<f64> = out.values.iter().zip(&reference).map(|(a, b)| a - b).collect();
        println!(
            "{name:>11}: relative error {:.2e}, bandwidth {}, {} stiffness applications",
            linalg::norm(&d) / linalg::norm(&reference),
            out.bandwidth,
            out.iterations
        );
    }
    Ok(())
}
