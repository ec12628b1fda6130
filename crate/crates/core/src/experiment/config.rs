use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::efie::{PlaneWave, QuadratureRule};
use crate::geom::Point3;
use crate::mesh::{load_mesh, make_holed_plate, make_icosphere, make_torus, TriangleMesh};
use crate::precond::{PrecondMode, DEFAULT_MAX_ITER, DEFAULT_RESTART};
use crate::{Error, Result};

/// Where the surface comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MeshSource {
    Icosphere { subdivisions: u32, radius: f64 },
    Torus { major_segments: usize, minor_segments: usize, major_radius: f64, minor_radius: f64 },
    HoledPlate { holes: usize },
    File { path: PathBuf },
}

impl MeshSource {
    pub fn load(&self) -> Result<TriangleMesh> {
        match self {
            Self::Icosphere { subdivisions, radius } => make_icosphere(*subdivisions, *radius),
            Self::Torus { major_segments, minor_segments, major_radius, minor_radius } => {
                make_torus(*major_segments, *minor_segments, *major_radius, *minor_radius)
            }
            Self::HoledPlate { holes } => make_holed_plate(*holes),
            Self::File { path } => load_mesh(path, None),
        }
    }
}

/// Incident plane wave; the wavenumber comes from the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    pub direction: Point3,
    pub polarization: Point3,
    pub amplitude: f64,
}

impl Default for Excitation {
    fn default() -> Self {
        Self { direction: [0.0, 0.0, 1.0], polarization: [1.0, 0.0, 0.0], amplitude: 1.0 }
    }
}

impl Excitation {
    pub fn wave(&self, k: f64) -> Result<PlaneWave> {
        PlaneWave::new(self.direction, self.polarization, self.amplitude, k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mesh: MeshSource,
    /// Wavenumber; `None` picks `k h_avg = 0.1` on the (finest) mesh.
    pub k: Option<f64>,
    pub quadrature: QuadratureRule,
    /// Wavelet level count `L`; `None` derives it from the mesh.
    pub wavelet_levels: Option<usize>,
    pub precond: PrecondMode,
    pub output: PathBuf,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
    /// Icosphere subdivision levels of a sweep.
    pub sweep_levels: Vec<u32>,
    pub excitation: Excitation,
    /// `spectrum` on the identity in place of the EFIE operator.
    pub identity: bool,
    /// Relative window of the filter benchmark.
    pub window_low: f64,
    pub window_high: Option<f64>,
    /// Upper edge of the low-pass window used for subspace angles.
    pub low_pass: f64,
    pub vectors: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mesh: MeshSource::Icosphere { subdivisions: 1, radius: 1.0 },
            k: None,
            quadrature: QuadratureRule::default(),
            wavelet_levels: None,
            precond: PrecondMode::LfWavelet,
            output: PathBuf::from("out"),
            seed: 0,
            tol: 1e-6,
            max_iter: DEFAULT_MAX_ITER,
            restart: DEFAULT_RESTART,
            sweep_levels: vec![1, 2, 3],
            excitation: Excitation::default(),
            identity: false,
            window_low: 0.0,
            window_high: None,
            low_pass: 0.1,
            vectors: 10,
        }
    }
}

/// Command-line values that replace config entries when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mesh: Option<PathBuf>,
    pub subdivisions: Option<u32>,
    pub k: Option<f64>,
    pub wavelet_levels: Option<usize>,
    pub precond: Option<PrecondMode>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub sweep_levels: Option<Vec<u32>>,
    pub identity: bool,
    pub window_low: Option<f64>,
    pub window_high: Option<f64>,
    pub vectors: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(p) = &o.mesh {
            self.mesh = MeshSource::File { path: p.clone() };
        }
        if let Some(s) = o.subdivisions {
            let radius = match self.mesh {
                MeshSource::Icosphere { radius, .. } => radius,
                _ => 1.0,
            };
            self.mesh = MeshSource::Icosphere { subdivisions: s, radius };
        }
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = o.$f.clone() { self.$f = v.into(); })*};
        }
        take!(precond, output, seed, tol, sweep_levels, window_low, vectors);
        if o.k.is_some() {
            self.k = o.k;
        }
        if o.wavelet_levels.is_some() {
            self.wavelet_levels = o.wavelet_levels;
        }
        if o.window_high.is_some() {
            self.window_high = o.window_high;
        }
        self.identity |= o.identity;
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.k {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Config(format!("wavenumber must be positive, got {k}")));
            }
        }
        if let MeshSource::File { path } = &self.mesh {
            if !path.exists() {
                return Err(Error::Config(format!("mesh file {} does not exist", path.display())));
            }
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tolerance must lie in (0, 1), got {}", self.tol)));
        }
        if self.restart == 0 || self.max_iter == 0 {
            return Err(Error::Config("restart and max_iter must be positive".into()));
        }
        if self.vectors == 0 {
            return Err(Error::Config("filter benchmark needs at least one vector".into()));
        }
        self.quadrature.validate()
    }

    /// SHA-256 of the configuration with the output directory cleared.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = PathBuf::new();
        let json = serde_json::to_string(&c).expect("config serialises");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_uses_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"mesh": {"type": "torus", "major_segments": 8, "minor_segments": 6, "major_radius": 2.0, "minor_radius": 0.5}, "k": 0.2}"#)
                .unwrap();
        assert_eq!(c.k, Some(0.2));
        assert_eq!(c.tol, 1e-6);
        assert_eq!(c.mesh.load().unwrap().genus(), 1);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"wavenumber": 1.0}"#).is_err());
    }

    #[test]
    fn flags_win() {
        let mut c = ExperimentConfig { k: Some(1.0), ..Default::default() };
        c.apply(&Overrides { k: Some(0.5), subdivisions: Some(2), seed: Some(7), ..Default::default() });
        assert_eq!(c.k, Some(0.5));
        assert_eq!(c.seed, 7);
        assert_eq!(c.mesh, MeshSource::Icosphere { subdivisions: 2, radius: 1.0 });
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig { k: Some(-1.0), ..Default::default() }.validate().is_err());
        let missing = ExperimentConfig { mesh: MeshSource::File { path: "/nonexistent.off".into() }, ..Default::default() };
        assert!(matches!(missing.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { output: "elsewhere".into(), ..Default::default() };
        let c = ExperimentConfig { seed: 1, ..Default::default() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
