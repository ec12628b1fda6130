//! Text OFF and OBJ readers, and an OFF writer.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::TriangleMesh;
use crate::geom::Point3;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(Self::Off),
            "obj" => Some(Self::Obj),
            _ => None,
        }
    }
}

/// Reads a triangle mesh. When `format` is `None` it is inferred from the
/// file extension.
pub fn load_mesh(path: &Path, format: Option<MeshFormat>) -> Result<TriangleMesh> {
    let format = format.or_else(|| MeshFormat::from_path(path)).ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        msg: "unknown mesh format (expected .off or .obj)".into(),
    })?;
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        msg: "binary mesh files are not supported".into(),
    })?;
    let (vertices, triangles) = match format {
        MeshFormat::Off => parse_off(&text, path)?,
        MeshFormat::Obj => parse_obj(&text, path)?,
    };
    TriangleMesh::new(vertices, triangles)
}

type Soup = (Vec<Point3>, Vec<[usize; 3]>);

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: PathBuf::from(path),
        line,
        msg: msg.into(),
    }
}

/// Parses OFF text into a vertex/triangle soup (no topology checks).
pub fn parse_off(text: &str, path: &Path) -> Result<Soup> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| parse_err(path, 0, "empty file"))?;
    let mut header_tokens = header.split_whitespace();
    match header_tokens.next() {
        Some("OFF") => {}
        Some(tok) if tok.ends_with("OFF") => {
            return Err(parse_err(path, ln, format!("unsupported OFF variant {tok}")))
        }
        _ => return Err(parse_err(path, ln, "missing OFF header")),
    }
    let rest: Vec<&str> = header_tokens.collect();
    if rest.first() == Some(&"BINARY") {
        return Err(parse_err(path, ln, "binary OFF is not supported"));
    }
    let (ln, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| parse_err(path, ln, "missing counts line"))?
    } else {
        (ln, &header[3..])
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad count {t:?}"))))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(parse_err(path, ln, "counts line needs vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(path, ln, "unexpected end of vertex list"))?;
        let xyz: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad coordinate {t:?}"))))
            .collect::<Result<_>>()?;
        if xyz.len() != 3 {
            return Err(parse_err(path, ln, "vertex needs three coordinates"));
        }
        vertices.push([xyz[0], xyz[1], xyz[2]]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(path, ln, "unexpected end of face list"))?;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad index {t:?}"))))
            .collect::<Result<_>>()?;
        if idx.first() != Some(&3) || idx.len() < 4 {
            return Err(parse_err(path, ln, "only triangular faces (\"3 i j k\") are supported"));
        }
        let tri = [idx[1], idx[2], idx[3]];
        if let Some(&bad) = tri.iter().find(|&&v| v >= nv) {
            return Err(parse_err(path, ln, format!("vertex index {bad} out of range 0..{nv}")));
        }
        triangles.push(tri);
    }
    Ok((vertices, triangles))
}

/// Parses OBJ `v` and `f` records (1-based or negative relative indices).
pub fn parse_obj(text: &str, path: &Path) -> Result<Soup> {
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, [i64; 3])> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let xyz: Vec<f64> = tok
                    .take(3)
                    .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad coordinate {t:?}"))))
                    .collect::<Result<_>>()?;
                if xyz.len() != 3 {
                    return Err(parse_err(path, ln, "vertex needs three coordinates"));
                }
                vertices.push([xyz[0], xyz[1], xyz[2]]);
            }
            Some("f") => {
                let idx: Vec<i64> = tok
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        head.parse().map_err(|_| parse_err(path, ln, format!("bad index {t:?}")))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(parse_err(path, ln, "only triangular faces are supported"));
                }
                // relative indices refer to vertices read so far
                let resolve = |k: i64| if k < 0 { vertices.len() as i64 + k + 1 } else { k };
                faces.push((ln, [resolve(idx[0]), resolve(idx[1]), resolve(idx[2])]));
            }
            _ => {}
        }
    }
    let nv = vertices.len() as i64;
    let triangles = faces
        .into_iter()
        .map(|(ln, f)| {
            if let Some(&bad) = f.iter().find(|&&k| k < 1 || k > nv) {
                return Err(parse_err(path, ln, format!("vertex index {bad} out of range 1..={nv}")));
            }
            Ok([(f[0] - 1) as usize, (f[1] - 1) as usize, (f[2] - 1) as usize])
        })
        .collect::<Result<_>>()?;
    Ok((vertices, triangles))
}

/// OFF text of a mesh; coordinates use shortest round-trip formatting.
pub fn off_string(mesh: &TriangleMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF\n{} {} {}", mesh.n_vertices(), mesh.n_cells(), mesh.n_edges());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

pub fn write_off(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    std::fs::write(path, off_string(mesh))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TET: &str = "OFF\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n";

    #[test]
    fn tetrahedron_off() {
        let (v, t) = parse_off(TET, Path::new("tet.off")).unwrap();
        let m = TriangleMesh::new(v, t).unwrap();
        assert_eq!((m.n_vertices(), m.n_cells(), m.n_edges(), m.genus()), (4, 4, 6, 0));
    }

    #[test]
    fn out_of_range_index() {
        let bad = TET.replace("3 1 3 2", "3 1 4 2");
        let err = parse_off(&bad, Path::new("tet.off")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 10, .. }), "{err}");
    }

    #[test]
    fn quads_rejected() {
        let bad = TET.replace("3 0 1 2", "4 0 1 2 3");
        assert!(matches!(parse_off(&bad, Path::new("x.off")), Err(Error::Parse { .. })));
    }

    #[test]
    fn binary_off_rejected() {
        assert!(matches!(
            parse_off("OFF BINARY\n", Path::new("x.off")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn counts_on_header_line() {
        let inline = TET.replacen("OFF\n4 4 6", "OFF 4 4 6", 1);
        let (v, t) = parse_off(&inline, Path::new("x.off")).unwrap();
        assert_eq!((v.len(), t.len()), (4, 4));
    }

    #[test]
    fn obj_with_slashes_and_negative_indices() {
        let obj = "# tet\nv 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\nvn 0 0 1\n\
                   f 1/1/1 2/2/1 3/3/1\nf 1 3 4\nf -4 -1 -3\nf 2 4 3\n";
        let (v, t) = parse_obj(obj, Path::new("tet.obj")).unwrap();
        assert_eq!(t[2], [0, 3, 1]);
        let m = TriangleMesh::new(v, t).unwrap();
        assert_eq!(m.n_edges(), 6);
    }

    #[test]
    fn obj_index_zero_rejected() {
        let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n";
        assert!(matches!(parse_obj(obj, Path::new("x.obj")), Err(Error::Parse { .. })));
    }

    #[test]
    fn off_round_trip_exact() {
        let m = crate::mesh::make_icosphere(1, 1.3).unwrap();
        let (v, t) = parse_off(&off_string(&m), Path::new("x.off")).unwrap();
        assert_eq!(v, m.vertices());
        assert_eq!(t, m.triangles());
    }
}
