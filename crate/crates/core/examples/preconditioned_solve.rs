//! Solves plane-wave scattering from a sphere with GMRES, unpreconditioned,
//! with the low-frequency rescaling, and with rescaling plus the wavelet
//! preconditioner.

use lfqh::efie::{assemble_rhs, PlaneWave};
use lfqh::experiment::{cure, ExperimentConfig};
use lfqh::linalg;
use lfqh::mesh::make_icosphere;
use lfqh::precond::{solve_preconditioned, KrylovOptions};

fn main() -> lfqh::Result<()> {
    let k = 0.05;
    let mesh = make_icosphere(2, 1.0)?;
    let c = cure(&mesh, k, &ExperimentConfig::default())?;
    let t = c.system.total();
    let e = assemble_rhs(&mesh, &PlaneWave::z_travelling(k), 7)?;
    let opts = KrylovOptions::default();

    let runs = [("none", None, None), ("lf", Some(&c.lf), None), ("lf+wavelet", Some(&c.lf), Some(&c.q))];
    let mut reference = None;
    for (name, lf, q) in runs {
        let (j, rep) = solve_preconditioned(&t, &e, lf, q, &opts)?;
        let diff = reference.as_ref().map_or(0.0, |r: &Vec<_>| {
            let d: Vec<_> = j.iter().zip(r).map(|(a, b)| a - b).collect();
            linalg::norm_c(&d) / linalg::norm_c(r)
        });
        println!("{name:>10}: {:>4} iterations, residual {:.1e}, distance to first solution {diff:.1e}", rep.iterations, rep.residual);
        reference.get_or_insert(j);
    }
    Ok(())
}
