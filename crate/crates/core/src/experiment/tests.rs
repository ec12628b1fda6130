use super::*;
use crate::mesh::load_mesh;
use crate::precond::PrecondMode;
use crate::Error;

fn cfg_in(dir: &std::path::Path, subdivisions: u32) -> ExperimentConfig {
    ExperimentConfig {
        mesh: MeshSource::Icosphere { subdivisions, radius: 1.0 },
        output: dir.to_path_buf(),
        ..Default::default()
    }
}

#[test]
fn gen_mesh_icosphere_and_torus() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ico.off");
    let stats = gen_mesh(&MeshSource::Icosphere { subdivisions: 2, radius: 1.0 }, &path).unwrap();
    assert_eq!(stats.n_vertices, 162);
    assert_eq!(load_mesh(&path, None).unwrap().n_vertices(), 162);
    let torus = MeshSource::Torus { major_segments: 8, minor_segments: 6, major_radius: 2.0, minor_radius: 0.5 };
    let stats = gen_mesh(&torus, &dir.path().join("torus.off")).unwrap();
    assert_eq!(stats.genus, 1);
    let bad = MeshSource::Icosphere { subdivisions: 99, radius: 1.0 };
    assert!(matches!(gen_mesh(&bad, &dir.path().join("x.off")), Err(Error::Limit(_))));
}

#[test]
fn identity_spectrum_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { identity: true, ..cfg_in(dir.path(), 1) };
    let (report, summary) = spectrum(&cfg).unwrap();
    assert_eq!(summary.bands.len(), 2 * (summary.wavelet_levels + 2));
    for b in &report.blocks {
        assert!(b.values.iter().all(|v| (v - 1.0).abs() < 1e-10), "{}", b.id);
    }
    let rows: usize = report.band_blocks().map(|b| b.values.len()).sum();
    assert_eq!(rows, summary.unknowns);
    assert!(dir.path().join("bands.json").exists());
}

#[test]
fn spectrum_csv_is_deterministic_and_documented() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (report, summary) = spectrum(&cfg_in(a.path(), 0)).unwrap();
    spectrum(&cfg_in(b.path(), 0)).unwrap();
    let csv_a = std::fs::read(a.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.path().join("spectrum.csv")).unwrap());
    assert!(String::from_utf8(csv_a).unwrap().starts_with("block_id,index,value\n"));
    let rows: usize = report.band_blocks().map(|b| b.values.len()).sum();
    assert_eq!(rows, summary.unknowns);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("spectrum.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["config_hash"], cfg_in(a.path(), 0).hash());
    assert_eq!(meta["tool_version"], TOOL_VERSION);
    assert!(meta["details"]["k"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_rejects_bad_levels() {
    let dir = tempfile::tempdir().unwrap();
    let empty = ExperimentConfig { sweep_levels: vec![], ..cfg_in(dir.path(), 1) };
    assert!(matches!(sweep(&empty), Err(Error::Config(_))));
    let unordered = ExperimentConfig { sweep_levels: vec![2, 1], ..cfg_in(dir.path(), 1) };
    assert!(matches!(sweep(&unordered), Err(Error::Config(_))));
    let huge = ExperimentConfig { sweep_levels: vec![4], ..cfg_in(dir.path(), 1) };
    assert!(matches!(sweep(&huge), Err(Error::Limit(_))));
}

#[test]
fn sweep_rows_and_nan_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    // k = 1.5 is electrically too large for level 0 (h_avg ~ 1.05) but not level 1
    let cfg = ExperimentConfig { sweep_levels: vec![0, 1], k: Some(1.5), ..cfg_in(dir.path(), 1) };
    let res = sweep(&cfg).unwrap();
    assert_eq!(res.rows.len(), 2);
    assert!(res.rows[0].cond_raw.is_nan() && res.rows[0].error.is_some());
    assert!(res.rows[1].cond_raw.is_finite() && res.rows[1].error.is_none());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], SweepRow::HEADER);
    assert!(lines[1].contains("NaN"));
    assert!(dir.path().join("sweep_summary.txt").exists());
}

#[test]
fn sweep_default_k_and_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { sweep_levels: vec![0, 1], ..cfg_in(a.path(), 1) };
    let res = sweep(&cfg).unwrap();
    let finest = crate::mesh::make_icosphere(1, 1.0).unwrap().stats();
    assert!((res.k * finest.h_avg - 0.1).abs() < 1e-12);
    assert!(res.rows[1].cond_raw > res.rows[0].cond_raw);
    sweep(&ExperimentConfig { output: b.path().to_path_buf(), ..cfg }).unwrap();
    assert_eq!(
        std::fs::read(a.path().join("sweep.csv")).unwrap(),
        std::fs::read(b.path().join("sweep.csv")).unwrap()
    );
}

#[test]
fn zero_excitation_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = cfg_in(dir.path(), 1);
    cfg.excitation.amplitude = 0.0;
    let out = solve(&cfg).unwrap();
    assert!(out.report.iterations <= 1);
    assert!(out.solution.iter().all(|c| c.norm() == 0.0));
    let bytes = std::fs::read(dir.path().join("solution.bin")).unwrap();
    assert_eq!(read_complex(&bytes), out.solution);
}

#[test]
fn preconditioned_solve_needs_fewer_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { k: Some(0.05), ..cfg_in(dir.path(), 1) };
    let pre = solve(&cfg).unwrap();
    let raw = solve(&ExperimentConfig { precond: PrecondMode::None, ..cfg }).unwrap();
    assert!(pre.converged && raw.converged);
    assert!(pre.report.iterations < raw.report.iterations);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.bin.json")).unwrap()).unwrap();
    assert_eq!(meta["details"]["mode"], "none");
}

#[test]
fn no_convergence_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { precond: PrecondMode::None, max_iter: 2, restart: 2, ..cfg_in(dir.path(), 1) };
    assert!(matches!(solve(&cfg), Err(Error::NoConvergence(_))));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.bin.json")).unwrap()).unwrap();
    assert_eq!(meta["details"]["converged"], false);
    assert_eq!(meta["details"]["report"]["iterations"], 2);
}

#[test]
fn filter_bench_rejects_torus() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        mesh: MeshSource::Torus { major_segments: 8, minor_segments: 6, major_radius: 2.0, minor_radius: 0.5 },
        output: dir.path().to_path_buf(),
        ..Default::default()
    };
    assert!(matches!(filter_bench(&cfg), Err(Error::Genus(1))));
}

#[test]
fn filter_bench_on_icosphere() {
    let dir = tempfile::tempdir().unwrap();
    let bench = filter_bench(&cfg_in(dir.path(), 2)).unwrap();
    assert_eq!(bench.errors.len(), 10);
    assert!(bench.max_rel_error <= 0.1, "{}", bench.max_rel_error);
    assert!(bench.max_rel_error_single_pass > bench.max_rel_error);
    assert_eq!(bench.low_pass.rank, 8);
    assert!(bench.low_pass.min_cosine >= 0.9);
    assert!(bench.seconds_dense_build > 0.0 && bench.seconds_fast_apply > 0.0 && bench.seconds_dense_apply > 0.0);
    assert_eq!(bench.quality.folds, 0);
    assert!(dir.path().join("filter_bench.json").exists());
    assert!(dir.path().join("sphere.off").exists());
}
