//! Builds the loop (vertex-to-edge) and star (cell-to-edge) incidence
//! matrices of an icosphere, checks that they annihilate each other and
//! writes them in Matrix Market format.

use lfqh::decomposition::{write_incidence, IncidencePair};
use lfqh::mesh::make_icosphere;

fn main() -> lfqh::Result<()> {
    let mesh = make_icosphere(1, 1.0)?;
    let pair = IncidencePair::new(&mesh);
    println!("edges {} vertices {} cells {}", pair.n_edges(), pair.n_vertices(), pair.n_cells());
    println!("Sigma^T Lambda nonzeros: {}", pair.sigma_t_lambda_nonzeros().len());

    let lap = pair.vertex_laplacian();
    let row_sum: f64 = (0..lap.ncols()).map(|j| lap[(0, j)]).sum();
    println!("vertex Laplacian row sum: {row_sum}");

    let dir = std::env::temp_dir().join("lfqh_incidence");
    let (l, s) = write_incidence(&pair, &dir)?;
    println!("wrote {} and {}", l.display(), s.display());
    Ok(())
}
