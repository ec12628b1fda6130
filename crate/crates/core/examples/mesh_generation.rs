//! Generates the built-in test surfaces, prints their statistics and writes
//! each one as OFF into the directory given on the command line (default
//! `meshes`).

use std::path::PathBuf;

use lfqh::mesh::{load_mesh, make_holed_plate, make_icosphere, make_torus, write_off};

fn main() -> lfqh::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "meshes".into()));
    std::fs::create_dir_all(&dir)?;
    let meshes = [
        ("icosphere2", make_icosphere(2, 1.0)?),
        ("torus", make_torus(12, 8, 2.0, 0.6)?),
        ("holed_plate2", make_holed_plate(2)?),
    ];
    for (name, mesh) in &meshes {
        let path = dir.join(format!("{name}.off"));
        write_off(mesh, &path)?;
        let s = load_mesh(&path, None)?.stats();
        println!(
            "{name:>13}: V={} F={} E={} genus={} h_avg={:.4} -> {}",
            s.n_vertices,
            s.n_cells,
            s.n_edges,
            s.genus,
            s.h_avg,
            path.display()
        );
    }
    Ok(())
}
