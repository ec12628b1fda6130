//! Mapping a genus-0 mesh onto the unit sphere.

use std::path::Path;

use serde::Serialize;

use crate::geom::{self, Point3};
use crate::mesh::{off_string, parse_off, TriangleMesh};
use crate::{Error, Result};

/// Largest number of smoothing sweeps tried before a map is rejected.
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapQuality {
    /// Smallest over largest flat triangle area of the sphere mesh.
    pub area_ratio: f64,
    pub min_area: f64,
    pub max_area: f64,
    pub folds: usize,
    pub sweeps: usize,
}

/// A mesh together with its image on the unit sphere.
#[derive(Debug, Clone)]
pub struct SphereMap {
    /// Sphere mesh; same connectivity and edge numbering as the source mesh.
    pub mesh: TriangleMesh,
    pub quality: MapQuality,
}

impl SphereMap {
    pub fn positions(&self) -> &[Point3] {
        self.mesh.vertices()
    }

    /// Accepts precomputed unit-sphere positions for `mesh`.
    pub fn from_positions(mesh: &TriangleMesh, positions: Vec<Point3>) -> Result<Self> {
        if mesh.genus() != 0 {
            return Err(Error::Genus(mesh.genus()));
        }
        if let Some(p) = positions.iter().find(|p| (geom::norm(**p) - 1.0).abs() > 1e-10) {
            return Err(Error::Dimension(format!("position {p:?} is not on the unit sphere")));
        }
        let positions: Vec<Point3> = positions.into_iter().map(geom::normalize).collect();
        let folds = count_folds(mesh.triangles(), &positions);
        if folds > 0 {
            return Err(Error::Fold(folds));
        }
        build(mesh, positions, 0)
    }

    /// Reads positions from an OFF file whose vertex order matches `mesh`.
    pub fn read_off(mesh: &TriangleMesh, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let (vertices, _) = parse_off(&text, path)?;
        Self::from_positions(mesh, vertices)
    }

    pub fn write_off(&self, path: &Path) -> Result<()> {
        std::fs::write(path, off_string(&self.mesh))?;
        Ok(())
    }
}

/// Spherical triangles whose orientation disagrees with the outward normal.
pub fn count_folds(triangles: &[[usize; 3]], positions: &[Point3]) -> usize {
    triangles
        .iter()
        .filter(|&&[a, b, c]| {
            geom::dot(positions[a], geom::cross(positions[b], positions[c])) <= 0.0
        })
        .count()
}

/// Radial projection about the vertex centroid, followed by Laplacian
/// smoothing with renormalisation while folded triangles remain.
pub fn morph_to_sphere(mesh: &TriangleMesh) -> Result<SphereMap> {
    if mesh.genus() != 0 {
        return Err(Error::Genus(mesh.genus()));
    }
    let n = mesh.n_vertices() as f64;
    let c = mesh.vertices().iter().fold([0.0; 3], |acc, &p| geom::add(acc, geom::scale(p, 1.0 / n)));
    let mut positions: Vec<Point3> = mesh
        .vertices()
        .iter()
        .map(|&p| {
            let d = geom::sub(p, c);
            if geom::norm(d) == 0.0 {
                return Err(Error::Topology("a vertex coincides with the centroid".into()));
            }
            Ok(geom::normalize(d))
        })
        .collect::<Result<_>>()?;

    let mut neighbours = vec![Vec::new(); mesh.n_vertices()];
    for e in mesh.edges() {
        neighbours[e.v_a].push(e.v_b);
        neighbours[e.v_b].push(e.v_a);
    }
    let mut sweeps = 0;
    let mut folds = count_folds(mesh.triangles(), &positions);
    while folds > 0 && sweeps < MAX_SWEEPS {
        positions = neighbours
            .iter()
            .map(|nb| geom::normalize(nb.iter().fold([0.0; 3], |acc, &j| geom::add(acc, positions[j]))))
            .collect();
        sweeps += 1;
        folds = count_folds(mesh.triangles(), &positions);
    }
    if folds > 0 {
        return Err(Error::Fold(folds));
    }
    log::debug!("sphere map accepted after {sweeps} smoothing sweeps");
    build(mesh, positions, sweeps)
}

fn build(mesh: &TriangleMesh, positions: Vec<Point3>, sweeps: usize) -> Result<SphereMap> {
    let sphere = mesh.with_vertices(positions)?;
    let areas: Vec<f64> = (0..sphere.n_cells()).map(|t| sphere.area(t)).collect();
    let min_area = areas.iter().copied().fold(f64::INFINITY, f64::min);
    let max_area = areas.iter().copied().fold(0.0, f64::max);
    Ok(SphereMap {
        mesh: sphere,
        quality: MapQuality { area_ratio: min_area / max_area, min_area, max_area, folds: 0, sweeps },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::IncidencePair;
    use crate::mesh::{make_icosphere, make_torus};

    #[test]
    fn icosphere_maps_to_itself() {
        let mesh = make_icosphere(2, 3.0).unwrap();
        let map = morph_to_sphere(&mesh).unwrap();
        assert_eq!(map.quality.folds, 0);
        assert_eq!(map.quality.sweeps, 0);
        for (p, q) in map.positions().iter().zip(mesh.vertices()) {
            assert!((geom::norm(*p) - 1.0).abs() < 1e-12);
            assert!(geom::dist(*p, geom::scale(*q, 1.0 / 3.0)) < 1e-12);
        }
    }

    #[test]
    fn ellipsoid_has_no_folds() {
        let mesh = make_icosphere(2, 1.0).unwrap().map_vertices(|p| [2.0 * p[0], p[1], p[2]]).unwrap();
        let map = morph_to_sphere(&mesh).unwrap();
        assert_eq!(map.quality.folds, 0);
        assert_eq!(map.mesh.triangles(), mesh.triangles());
        assert!(map.quality.area_ratio > 0.0);
    }

    #[test]
    fn incidence_is_preserved() {
        let mesh = make_icosphere(1, 1.0).unwrap().map_vertices(|p| [p[0], 0.5 * p[1], 1.5 * p[2]]).unwrap();
        let map = morph_to_sphere(&mesh).unwrap();
        assert_eq!(IncidencePair::new(&mesh), IncidencePair::new(&map.mesh));
    }

    #[test]
    fn torus_rejected() {
        let mesh = make_torus(8, 6, 2.0, 0.5).unwrap();
        assert!(matches!(morph_to_sphere(&mesh), Err(Error::Genus(1))));
    }

    #[test]
    fn folded_positions_rejected() {
        let mesh = make_icosphere(1, 1.0).unwrap();
        let mut p = mesh.vertices().to_vec();
        p.swap(0, 1);
        assert!(matches!(SphereMap::from_positions(&mesh, p), Err(Error::Fold(_))));
    }

    #[test]
    fn fold_removed_by_smoothing() {
        // pull one vertex across its neighbours; the radial map then folds
        let mesh = make_icosphere(2, 1.0).unwrap();
        let mut v = mesh.vertices().to_vec();
        let e = mesh.edges()[0];
        v[e.v_a] = geom::add(geom::scale(v[e.v_b], 1.3), geom::scale(v[e.v_a], -0.1));
        let bent = mesh.with_vertices(v.clone()).unwrap();
        let radial: Vec<Point3> = v.iter().map(|&p| geom::normalize(p)).collect();
        assert!(count_folds(bent.triangles(), &radial) > 0);
        let map = morph_to_sphere(&bent).unwrap();
        assert!(map.quality.sweeps > 0);
        assert_eq!(count_folds(map.mesh.triangles(), map.positions()), 0);
    }

    #[test]
    fn off_round_trip() {
        let mesh = make_icosphere(1, 2.0).unwrap();
        let map = morph_to_sphere(&mesh).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sphere.off");
        map.write_off(&path).unwrap();
        let back = SphereMap::read_off(&mesh, &path).unwrap();
        assert_eq!(back.positions(), map.positions());
    }
}
