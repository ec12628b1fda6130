use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ExperimentConfig, MeshSource};
use super::output::{complex_bytes, fmt_f64, write_json, write_with_sidecar, TOOL_VERSION};
use crate::decomposition::{FilterBasis, IncidencePair, Kind, Metric, Provenance, SpectralWindow};
use crate::efie::{assemble_efie, assemble_gram, assemble_rhs, condition_number, EfieSystem};
use crate::linalg;
use crate::mesh::{write_off, MeshStats, TriangleMesh};
use crate::precond::{
    lf_rescale, solve_preconditioned, spectrum_report, BandMarker, GraphProjectors, KrylovOptions, LfRescaled,
    PrecondMode, SolveReport, SpectrumReport, WaveletPreconditioner,
};
use crate::spherefilter::{
    fast_projector_apply, morph_to_sphere, Calibration, MapQuality, ProjectorOptions, SphereFilter,
};
use crate::{Error, Result};

/// Meshes above this many edges are refused by the sweep.
pub const SWEEP_MAX_UNKNOWNS: usize = 6000;

/// `k` with `k h_avg = 0.1`.
pub fn default_wavenumber(stats: &MeshStats) -> f64 {
    0.1 / stats.h_avg
}

fn krylov(cfg: &ExperimentConfig) -> KrylovOptions {
    KrylovOptions { tol: cfg.tol, max_iter: cfg.max_iter, restart: cfg.restart }
}

pub fn gen_mesh(source: &MeshSource, path: &Path) -> Result<MeshStats> {
    let mesh = source.load()?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_off(&mesh, path)?;
    Ok(mesh.stats())
}

/// Loop/star rescaled operator and its wavelet preconditioner.
pub struct Cured {
    pub system: EfieSystem,
    pub projectors: GraphProjectors,
    pub lf: LfRescaled,
    pub q: WaveletPreconditioner,
}

pub fn cure(mesh: &TriangleMesh, k: f64, cfg: &ExperimentConfig) -> Result<Cured> {
    let system = assemble_efie(mesh, k, &cfg.quadrature)?;
    let pair = IncidencePair::new(mesh);
    let projectors = GraphProjectors::new(&pair, cfg.wavelet_levels)?;
    let lf = lf_rescale(&system.total(), &projectors.loop_harmonic, &projectors.star, k)?;
    let q = projectors.preconditioner(&lf.mtm, cfg.seed)?;
    Ok(Cured { system, projectors, lf, q })
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub k: Option<f64>,
    pub unknowns: usize,
    pub wavelet_levels: usize,
    pub bands: Vec<BandMarker>,
    pub spread_raw: f64,
    pub spread_qtq: f64,
}

/// Spectra of the cured operator, its band blocks and `Q T Q`.
pub fn spectrum(cfg: &ExperimentConfig) -> Result<(SpectrumReport, SpectrumSummary)> {
    let mesh = cfg.mesh.load()?;
    let (report, k, levels) = if cfg.identity {
        let pair = IncidencePair::new(&mesh);
        let gp = GraphProjectors::new(&pair, cfg.wavelet_levels)?;
        let n = pair.n_edges();
        let eye = Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let q = gp.preconditioner(&eye, cfg.seed)?;
        (spectrum_report(&eye, &q)?, None, gp.levels)
    } else {
        let k = cfg.k.unwrap_or_else(|| default_wavenumber(&mesh.stats()));
        let c = cure(&mesh, k, cfg)?;
        (spectrum_report(&c.lf.mtm, &c.q)?, Some(k), c.projectors.levels)
    };
    let spread = |id: &str| report.block(id).map_or(f64::NAN, |b| b.spread());
    let summary = SpectrumSummary {
        k,
        unknowns: mesh.n_edges(),
        wavelet_levels: levels,
        bands: report.markers.clone(),
        spread_raw: spread("raw"),
        spread_qtq: spread("qtq"),
    };
    write_with_sidecar(cfg, "spectrum.csv", report.to_csv().as_bytes(), &summary)?;
    std::fs::create_dir_all(&cfg.output)?;
    write_json(&cfg.output.join("bands.json"), &summary.bands)?;
    Ok((report, summary))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub level: u32,
    pub unknowns: usize,
    pub h_avg: f64,
    pub k: f64,
    pub cond_raw: f64,
    pub cond_lf: f64,
    pub cond_lf_wavelet: f64,
    pub iterations_raw: f64,
    pub iterations_precond: f64,
    pub seconds: f64,
    pub error: Option<String>,
}

impl SweepRow {
    pub const HEADER: &'static str =
        "level,unknowns,h_avg,k,cond_raw,cond_lf,cond_lf_wavelet,iterations_raw,iterations_precond";

    fn csv(&self) -> String {
        let cols = [
            self.h_avg,
            self.k,
            self.cond_raw,
            self.cond_lf,
            self.cond_lf_wavelet,
            self.iterations_raw,
            self.iterations_precond,
        ];
        let mut s = format!("{},{}", self.level, self.unknowns);
        for c in cols {
            s.push(',');
            s.push_str(&fmt_f64(c));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub k: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(SweepRow::HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv());
            s.push('\n');
        }
        s
    }

    /// Level-to-level growth factors of each condition-number column.
    pub fn summary(&self) -> String {
        let mut s = format!("k = {} (fixed across levels)\n", self.k);
        let columns: [(&str, fn(&SweepRow) -> f64); 3] = [
            ("cond_raw", |r| r.cond_raw),
            ("cond_lf", |r| r.cond_lf),
            ("cond_lf_wavelet", |r| r.cond_lf_wavelet),
        ];
        for (name, get) in columns {
            let values: Vec<f64> = self.rows.iter().map(get).collect();
            let growth: Vec<String> = values.windows(2).map(|w| format!("{:.2}", w[1] / w[0])).collect();
            let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
            let max = finite.iter().copied().fold(f64::NAN, f64::max);
            let min = finite.iter().copied().fold(f64::NAN, f64::min);
            let _ = writeln!(
                s,
                "{name:>16}: {} | growth per level {} | max/min {:.2}",
                values.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" "),
                if growth.is_empty() { "-".into() } else { growth.join(" ") },
                max / min
            );
        }
        s
    }
}

fn sweep_level(level: u32, radius: f64, k: f64, cfg: &ExperimentConfig, row: &mut SweepRow) -> Result<()> {
    let mesh = crate::mesh::make_icosphere(level, radius)?;
    let c = cure(&mesh, k, cfg)?;
    let t = c.system.total();
    let wave = cfg.excitation.wave(k)?;
    let e = assemble_rhs(&mesh, &wave, cfg.quadrature.rhs_degree)?;
    let iterations = |r: Result<(Vec<C64>, SolveReport)>| match r {
        Ok((_, rep)) => rep.iterations as f64,
        Err(Error::NoConvergence(f)) => f.report.iterations as f64,
        Err(_) => f64::NAN,
    };
    row.iterations_raw = iterations(solve_preconditioned(&t, &e, None, None, &krylov(cfg)));
    row.iterations_precond = iterations(solve_preconditioned(&t, &e, Some(&c.lf), Some(&c.q), &krylov(cfg)));
    row.cond_raw = condition_number(&t)?;
    row.cond_lf = condition_number(&c.lf.mtm)?;
    row.cond_lf_wavelet = condition_number(&c.q.precondition(&c.lf.mtm))?;
    Ok(())
}

/// Runs the full pipeline on a sequence of icosphere levels at one `k`.
/// Failures are recorded in their row as `NaN`.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let levels = &cfg.sweep_levels;
    if levels.is_empty() {
        return Err(Error::Config("sweep needs at least one level".into()));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("sweep levels must be strictly increasing, got {levels:?}")));
    }
    let radius = match cfg.mesh {
        MeshSource::Icosphere { radius, .. } => radius,
        _ => return Err(Error::Config("sweeps refine icospheres; set mesh.type = icosphere".into())),
    };
    let finest = *levels.last().expect("nonempty");
    let unknowns = 30usize.saturating_mul(4usize.saturating_pow(finest));
    if unknowns > SWEEP_MAX_UNKNOWNS {
        return Err(Error::Limit(format!(
            "level {finest} has {unknowns} unknowns, above the sweep limit of {SWEEP_MAX_UNKNOWNS}"
        )));
    }
    let k = match cfg.k {
        Some(k) => k,
        None => default_wavenumber(&crate::mesh::make_icosphere(finest, radius)?.stats()),
    };
    let mut rows = Vec::new();
    for &level in levels {
        let start = Instant::now();
        let stats = crate::mesh::make_icosphere(level, radius)?.stats();
        let mut row = SweepRow {
            level,
            unknowns: stats.n_edges,
            h_avg: stats.h_avg,
            k,
            cond_raw: f64::NAN,
            cond_lf: f64::NAN,
            cond_lf_wavelet: f64::NAN,
            iterations_raw: f64::NAN,
            iterations_precond: f64::NAN,
            seconds: 0.0,
            error: None,
        };
        if let Err(e) = sweep_level(level, radius, k, cfg, &mut row) {
            log::warn!("sweep level {level} failed: {e}");
            row.error = Some(e.to_string());
        }
        row.seconds = start.elapsed().as_secs_f64();
        log::info!("sweep level {level}: {:.1} s", row.seconds);
        rows.push(row);
    }
    let result = SweepResult { k, rows };

    #[derive(Serialize)]
    struct Details<'a> {
        k: f64,
        k_rule: &'static str,
        seconds: Vec<f64>,
        errors: Vec<Option<&'a str>>,
    }
    let details = Details {
        k,
        k_rule: if cfg.k.is_some() { "configured" } else { "k h_avg = 0.1 on the finest level" },
        seconds: result.rows.iter().map(|r| r.seconds).collect(),
        errors: result.rows.iter().map(|r| r.error.as_deref()).collect(),
    };
    write_with_sidecar(cfg, "sweep.csv", result.to_csv().as_bytes(), details)?;
    std::fs::write(cfg.output.join("sweep_summary.txt"), result.summary())?;
    Ok(result)
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub k: f64,
    pub mode: PrecondMode,
    pub report: SolveReport,
    pub converged: bool,
    #[serde(skip)]
    pub solution: Vec<C64>,
}

/// Plane-wave solve. The solution and report are written even when the
/// solver misses its tolerance, in which case `NoConvergence` is returned
/// afterwards.
pub fn solve(cfg: &ExperimentConfig) -> Result<SolveOutcome> {
    let mesh = cfg.mesh.load()?;
    let k = cfg.k.unwrap_or_else(|| default_wavenumber(&mesh.stats()));
    let wave = cfg.excitation.wave(k)?;
    let e = assemble_rhs(&mesh, &wave, cfg.quadrature.rhs_degree)?;
    let opts = krylov(cfg);
    let result = match cfg.precond {
        PrecondMode::None => {
            let system = assemble_efie(&mesh, k, &cfg.quadrature)?;
            solve_preconditioned(&system.total(), &e, None, None, &opts)
        }
        PrecondMode::Lf | PrecondMode::LfWavelet => {
            let c = cure(&mesh, k, cfg)?;
            let q = (cfg.precond == PrecondMode::LfWavelet).then_some(&c.q);
            solve_preconditioned(&c.system.total(), &e, Some(&c.lf), q, &opts)
        }
    };
    let (solution, report, failure) = match result {
        Ok((x, r)) => (x, r, None),
        Err(Error::NoConvergence(f)) => (f.solution.clone(), f.report.clone(), Some(Error::NoConvergence(f))),
        Err(e) => return Err(e),
    };
    let outcome = SolveOutcome { k, mode: cfg.precond, report, converged: failure.is_none(), solution };
    write_with_sidecar(cfg, "solution.bin", &complex_bytes(&outcome.solution), &outcome)?;
    match failure {
        Some(f) => Err(f),
        None => Ok(outcome),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceReport {
    pub window_low: f64,
    pub window_high: Option<f64>,
    pub rank: usize,
    pub min_cosine: f64,
    pub cosines: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterBench {
    pub tool_version: &'static str,
    pub config_hash: String,
    pub mesh: MeshStats,
    pub quality: MapQuality,
    pub bandwidth: usize,
    pub fallbacks: usize,
    pub transfer: Vec<f64>,
    pub window_low: f64,
    pub window_high: Option<f64>,
    /// Relative Euclidean errors of the refined fast apply per vector.
    pub errors: Vec<f64>,
    pub max_rel_error: f64,
    /// Same in the `G` energy norm.
    pub max_rel_error_energy: f64,
    /// Errors of a single filter pass without refinement.
    pub max_rel_error_single_pass: f64,
    pub refinement_iterations: Vec<usize>,
    pub low_pass: SubspaceReport,
    /// `[low_pass, unbounded)`; omitted when its rank is too large.
    pub high_pass: Option<SubspaceReport>,
    pub seconds_dense_build: f64,
    pub seconds_dense_apply: f64,
    pub seconds_fast_apply: f64,
    pub seconds_fast_single_pass: f64,
}

/// Largest eigenspace whose principal angles the benchmark computes.
const SUBSPACE_MAX_RANK: usize = 256;

/// Fast loop-projector application against the dense construction on the
/// sphere mesh, with relative errors, subspace angles and timings.
pub fn filter_bench(cfg: &ExperimentConfig) -> Result<FilterBench> {
    let mesh = cfg.mesh.load()?;
    let map = morph_to_sphere(&mesh)?;
    let pair = IncidencePair::new(&map.mesh);
    let g = assemble_gram(&map.mesh);
    let window = SpectralWindow::new(cfg.window_low, cfg.window_high)?;

    let start = Instant::now();
    let metric = Metric::new(g.clone())?;
    let basis = FilterBasis::primal(Kind::Lambda, &pair, Some(&metric), None)?;
    let dense = basis.projector(&window, Provenance::Filtered(Kind::Lambda));
    let seconds_dense_build = start.elapsed().as_secs_f64();
    // dense P acts on sqrt(G)-scaled coefficients
    let dense_apply = |x: &[f64]| {
        let y = dense.apply(&linalg::matvec(metric.sqrt(), x));
        linalg::matvec(metric.inv_sqrt(), &y)
    };
    let energy = |v: &[f64]| linalg::matvec(&g, v).iter().zip(v).map(|(a, b)| a * b).sum::<f64>().sqrt();

    let filter = SphereFilter::new(&map, None);
    let opts = ProjectorOptions::default();
    let single = ProjectorOptions { refine_tol: None, ..opts };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut errors, mut energy_errors, mut single_errors, mut iterations) = (vec![], vec![], vec![], vec![]);
    let (mut t_dense, mut t_fast, mut t_single) = (0.0, 0.0, 0.0);
    for _ in 0..cfg.vectors {
        let x: Vec<f64> = (0..pair.n_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = Instant::now();
        let want = dense_apply(&x);
        t_dense += s.elapsed().as_secs_f64();
        let s = Instant::now();
        let fast = fast_projector_apply(&pair, &map, &g, &x, &window, Some(basis.eigen()), &opts)?;
        t_fast += s.elapsed().as_secs_f64();
        let s = Instant::now();
        let once = fast_projector_apply(&pair, &map, &g, &x, &window, Some(basis.eigen()), &single)?;
        t_single += s.elapsed().as_secs_f64();
        let diff = |a: &[f64]| a.iter().zip(&want).map(|(p, q)| p - q).collect::<Vec<f64>>();
        let scale = linalg::norm(&want).max(f64::MIN_POSITIVE);
        errors.push(linalg::norm(&diff(&fast.values)) / scale);
        energy_errors.push(energy(&diff(&fast.values)) / energy(&want).max(f64::MIN_POSITIVE));
        single_errors.push(linalg::norm(&diff(&once.values)) / scale);
        iterations.push(fast.iterations);
    }
    let n = cfg.vectors as f64;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);

    let subspace = |lo: f64, hi: Option<f64>, rng: &mut ChaCha8Rng| -> Result<Option<SubspaceReport>> {
        let w = SpectralWindow::new(lo, hi)?;
        let p = basis.projector(&w, Provenance::Filtered(Kind::Lambda));
        let r = p.rank();
        if r == 0 || r > SUBSPACE_MAX_RANK {
            return Ok(None);
        }
        // the dense eigenspace in the coordinates of the fast route
        let u = metric.inv_sqrt() * p.basis();
        let counted = ProjectorOptions { calibration: Calibration::Counted, ..ProjectorOptions::default() };
        let mut cols = Vec::with_capacity(r);
        for _ in 0..r {
            let x: Vec<f64> = (0..pair.n_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            cols.push(fast_projector_apply(&pair, &map, &g, &x, &w, Some(basis.eigen()), &counted)?.values);
        }
        let fast = Mat::from_fn(pair.n_edges(), r, |i, j| cols[j][i]);
        let cosines = linalg::principal_cosines(fast.as_ref(), u.as_ref())?;
        let mut padded = cosines.clone();
        padded.resize(r, 0.0);
        Ok(Some(SubspaceReport {
            window_low: lo,
            window_high: hi,
            rank: r,
            min_cosine: padded.iter().copied().fold(1.0, f64::min),
            cosines: padded,
        }))
    };
    let low_pass = subspace(0.0, Some(cfg.low_pass), &mut rng)?
        .ok_or_else(|| Error::Config(format!("low-pass window [0, {}) has rank 0 or above {SUBSPACE_MAX_RANK}", cfg.low_pass)))?;
    let high_pass = subspace(cfg.low_pass, None, &mut rng)?;

    let bench = FilterBench {
        tool_version: TOOL_VERSION,
        config_hash: cfg.hash(),
        mesh: mesh.stats(),
        quality: map.quality,
        bandwidth: filter.bandwidth(),
        fallbacks: filter.fallbacks(),
        transfer: filter.transfer().to_vec(),
        window_low: window.low,
        window_high: window.high,
        max_rel_error: max(&errors),
        max_rel_error_energy: max(&energy_errors),
        max_rel_error_single_pass: max(&single_errors),
        errors,
        refinement_iterations: iterations,
        low_pass,
        high_pass,
        seconds_dense_build,
        seconds_dense_apply: t_dense / n,
        seconds_fast_apply: t_fast / n,
        seconds_fast_single_pass: t_single / n,
    };
    std::fs::create_dir_all(&cfg.output)?;
    write_json(&cfg.output.join("filter_bench.json"), &bench)?;
    map.write_off(&cfg.output.join("sphere.off"))?;
    Ok(bench)
}
