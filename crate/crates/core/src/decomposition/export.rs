use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::incidence::IncidencePair;
use super::projector::{ProjectorOperator, Provenance, Space};
use super::spectrum::SpectralWindow;
use crate::Result;

/// JSON metadata written next to a binary projector basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorSidecar {
    pub rows: usize,
    pub cols: usize,
    pub layout: String,
    pub dtype: String,
    pub space: Space,
    pub provenance: Provenance,
    pub window: Option<SpectralWindow>,
}

/// Writes `lambda.mtx` and `sigma.mtx` into `dir`.
pub fn write_incidence(pair: &IncidencePair, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let l = dir.join("lambda.mtx");
    let s = dir.join("sigma.mtx");
    fs::write(&l, pair.lambda_matrix_market())?;
    fs::write(&s, pair.sigma_matrix_market())?;
    Ok((l, s))
}

/// Writes the basis `U` as row-major little-endian f64 to `<stem>.bin` and
/// its metadata to `<stem>.json`.
pub fn write_projector(p: &ProjectorOperator, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let bin = dir.join(format!("{stem}.bin"));
    let json = dir.join(format!("{stem}.json"));
    let u = p.basis();
    let mut bytes = Vec::with_capacity(u.nrows() * u.ncols() * 8);
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            bytes.extend_from_slice(&u[(i, j)].to_le_bytes());
        }
    }
    fs::File::create(&bin)?.write_all(&bytes)?;
    let meta = ProjectorSidecar {
        rows: u.nrows(),
        cols: u.ncols(),
        layout: "row-major".into(),
        dtype: "f64-le".into(),
        space: p.space,
        provenance: p.provenance,
        window: p.window,
    };
    fs::write(&json, serde_json::to_string_pretty(&meta)?)?;
    Ok((bin, json))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{build_filtered_projector, Kind};
    use crate::mesh::make_icosphere;

    #[test]
    fn basis_round_trip() {
        let pair = IncidencePair::new(&make_icosphere(0, 1.0).unwrap());
        let w = SpectralWindow::above(0.25).unwrap();
        let p = build_filtered_projector(Kind::Sigma, &pair, &w, None, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (bin, json) = write_projector(&p, dir.path(), "sigma").unwrap();
        let meta: ProjectorSidecar = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
        assert_eq!((meta.rows, meta.cols), (30, p.rank()));
        assert_eq!(meta.window, Some(w));
        let bytes = fs::read(bin).unwrap();
        assert_eq!(bytes.len(), 8 * 30 * p.rank());
        let v = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
        assert_eq!(v, p.basis()[(0, 1)]);
    }

    #[test]
    fn incidence_files() {
        let pair = IncidencePair::new(&make_icosphere(0, 1.0).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let (l, _) = write_incidence(&pair, dir.path()).unwrap();
        let text = fs::read_to_string(l).unwrap();
        assert!(text.lines().nth(1).unwrap() == "30 12 60");
    }
}
