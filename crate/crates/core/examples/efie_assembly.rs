//! Assembles the EFIE operator on an icosphere and shows the low-frequency
//! breakdown: the condition number grows like 1/k^2 and the scalar-potential
//! part annihilates loops.

use lfqh::decomposition::IncidencePair;
use lfqh::efie::{assemble_efie, assemble_gram, assemble_rhs, condition_number, PlaneWave, QuadratureRule};
use lfqh::linalg;
use lfqh::mesh::make_icosphere;

fn main() -> lfqh::Result<()> {
    let mesh = make_icosphere(1, 1.0)?;
    let quad = QuadratureRule::default();
    let gram = assemble_gram(&mesh);
    println!("N = {}, Gram asymmetry {:.1e}", gram.nrows(), linalg::relative_asymmetry(gram.as_ref()));

    for k in [1.0, 0.1, 0.01] {
        let sys = assemble_efie(&mesh, k, &quad)?;
        let lam = linalg::to_complex(IncidencePair::new(&mesh).lambda_dense().as_ref());
        let leak = linalg::spectral_norm((&sys.t_h * &lam).as_ref())? / linalg::spectral_norm(sys.t_h.as_ref())?;
        let e = assemble_rhs(&mesh, &PlaneWave::z_travelling(k), quad.rhs_degree)?;
        println!(
            "k = {k:<5} cond(T) = {:>10.1}  ||T_h Lambda||/||T_h|| = {leak:.1e}  ||e|| = {:.3e}",
            condition_number(&sys.total())?,
            linalg::norm_c(&e)
        );
    }
    Ok(())
}
