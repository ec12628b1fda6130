//! Batch drivers behind the `lfqh` command line tool. Every CSV gets a
//! header row and a JSON sidecar carrying the configuration hash and tool
//! version; CSV contents are deterministic for a given configuration.

mod config;
mod output;
mod run;

pub use config::{Excitation, ExperimentConfig, MeshSource, Overrides};
pub use output::{complex_bytes, fmt_f64, read_complex, write_json, write_with_sidecar, Sidecar, TOOL_VERSION};
pub use run::{
    cure, default_wavenumber, filter_bench, gen_mesh, solve, spectrum, sweep, Cured, FilterBench,
    SolveOutcome, SpectrumSummary, SubspaceReport, SweepResult, SweepRow, SWEEP_MAX_UNKNOWNS,
};

#[cfg(test)]
mod tests;
