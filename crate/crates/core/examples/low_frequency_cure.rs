//! Quasi-Helmholtz rescaling `M T M` removes the 1/k^2 growth of the
//! condition number.

use lfqh::decomposition::IncidencePair;
use lfqh::efie::{assemble_efie, condition_number, QuadratureRule};
use lfqh::mesh::make_icosphere;
use lfqh::precond::{lf_rescale, GraphProjectors};

fn main() -> lfqh::Result<()> {
    let mesh = make_icosphere(2, 1.0)?;
    let projectors = GraphProjectors::new(&IncidencePair::new(&mesh), None)?;
    println!("{:>8} {:>12} {:>10}", "k", "cond(T)", "cond(MTM)");
    for k in [0.5, 0.05, 0.005] {
        let t = assemble_efie(&mesh, k, &QuadratureRule::default())?.total();
        let lf = lf_rescale(&t, &projectors.loop_harmonic, &projectors.star, k)?;
        println!("{k:>8} {:>12.1} {:>10.2}", condition_number(&t)?, condition_number(&lf.mtm)?);
    }
    Ok(())
}
