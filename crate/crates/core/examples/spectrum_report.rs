//! Singular-value spectra of the cured operator, of every weighted wavelet
//! block and of the fully preconditioned operator.

use lfqh::experiment::{cure, default_wavenumber, ExperimentConfig};
use lfqh::mesh::make_icosphere;
use lfqh::precond::spectrum_report;

fn main() -> lfqh::Result<()> {
    let mesh = make_icosphere(2, 1.0)?;
    let k = default_wavenumber(&mesh.stats());
    let c = cure(&mesh, k, &ExperimentConfig::default())?;
    let report = spectrum_report(&c.lf.mtm, &c.q)?;
    println!("k = {k:.4}");
    for m in &report.markers {
        println!("{:>10}: rank {:>3} weight {:.3}", m.id, m.rank, m.weight);
    }
    for b in &report.blocks {
        if !b.values.is_empty() {
            println!("{:>10}: {:>4} values, spread {:.2}", b.id, b.values.len(), b.spread());
        }
    }
    Ok(())
}
