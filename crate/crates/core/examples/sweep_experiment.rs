//! Runs the level sweep driver on icosphere levels 0-2 and prints the CSV.

use lfqh::experiment::{sweep, ExperimentConfig};

fn main() -> lfqh::Result<()> {
    let cfg = ExperimentConfig {
        sweep_levels: vec![0, 1, 2],
        k: Some(0.05),
        output: std::env::temp_dir().join("lfqh_sweep"),
        ..Default::default()
    };
    let result = sweep(&cfg)?;
    print!("{}", result.to_csv());
    println!("{}", result.summary());
    Ok(())
}
