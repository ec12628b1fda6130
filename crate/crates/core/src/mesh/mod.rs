//! Closed, oriented triangle meshes and their RWG edge connectivity.
//!
//! A [`TriangleMesh`] is validated on construction: every edge must be shared
//! by exactly two triangles, the surface must be connected and orientable,
//! and the Euler characteristic must correspond to a nonnegative genus.
//! Inconsistently wound but orientable input is repaired by breadth-first
//! propagation, and the global orientation is chosen so that normals point
//! outward (positive enclosed volume).

mod generate;
mod io;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::geom::{self, Point3};
use crate::{Error, Result};

pub use generate::{make_holed_plate, make_icosphere, make_torus, MAX_SUBDIVISIONS};
pub use io::{load_mesh, off_string, parse_obj, parse_off, write_off, MeshFormat};

/// An interior edge carrying one RWG basis function.
///
/// Current flows from the `plus` triangle into the `minus` triangle. The plus
/// triangle is the one whose winding traverses the edge from `v_a` to `v_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedEdge {
    pub v_a: usize,
    pub v_b: usize,
    pub plus: usize,
    pub minus: usize,
    pub length: f64,
}

/// Counts and edge-length statistics of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub n_vertices: usize,
    pub n_cells: usize,
    pub n_edges: usize,
    pub genus: usize,
    pub h_avg: f64,
    pub h_min: f64,
    pub h_max: f64,
}

/// Local view of an edge from inside one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleEdge {
    /// Global edge index.
    pub edge: usize,
    /// +1 if the triangle is the plus cell of the edge, -1 otherwise.
    pub sign: f64,
}

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<OrientedEdge>,
    /// Slot `i` holds the edge opposite local vertex `i`.
    triangle_edges: Vec<[TriangleEdge; 3]>,
    genus: usize,
    flipped: usize,
}

impl TriangleMesh {
    /// Validates the surface, repairs winding and derives the edge list.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(Error::Topology("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Topology(format!(
                    "triangle {t} references a vertex outside 0..{nv}"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Topology(format!("triangle {t} is degenerate: {tri:?}")));
            }
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Topology("non-finite vertex coordinate".into()));
        }

        let mut used = vec![false; nv];
        for tri in &triangles {
            for &v in tri {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Topology(format!("vertex {v} is not referenced by any triangle")));
        }

        let incidence = edge_incidence(&triangles)?;
        let (triangles, flipped) = orient(triangles, &incidence)?;
        let mut mesh = Self::from_oriented(vertices, triangles)?;
        mesh.flipped = flipped;

        if mesh.signed_volume() < 0.0 {
            for tri in &mut mesh.triangles {
                tri.swap(1, 2);
            }
            let flipped = mesh.flipped;
            mesh = Self::from_oriented(mesh.vertices, mesh.triangles)?;
            mesh.flipped = flipped;
        }
        Ok(mesh)
    }

    /// Builds the edge list of a consistently wound closed surface.
    fn from_oriented(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        // (a, b) with a < b -> (plus, minus)
        let mut map: HashMap<(usize, usize), (Option<usize>, Option<usize>)> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let (p, q) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let key = (p.min(q), p.max(q));
                let slot = map.entry(key).or_default();
                if p < q {
                    slot.0 = Some(t);
                } else {
                    slot.1 = Some(t);
                }
            }
        }
        let mut keys: Vec<_> = map.keys().copied().collect();
        keys.sort_unstable();
        let mut index = HashMap::with_capacity(keys.len());
        let mut edges = Vec::with_capacity(keys.len());
        for (e, key) in keys.iter().enumerate() {
            let (plus, minus) = map[key];
            let (Some(plus), Some(minus)) = (plus, minus) else {
                return Err(Error::Topology(format!(
                    "edge ({}, {}) is not traversed in opposite directions",
                    key.0, key.1
                )));
            };
            index.insert(*key, e);
            edges.push(OrientedEdge {
                v_a: key.0,
                v_b: key.1,
                plus,
                minus,
                length: geom::dist(vertices[key.0], vertices[key.1]),
            });
        }
        let triangle_edges = triangles
            .iter()
            .enumerate()
            .map(|(t, tri)| {
                std::array::from_fn(|i| {
                    let (p, q) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                    let e = index[&(p.min(q), p.max(q))];
                    let sign = if edges[e].plus == t { 1.0 } else { -1.0 };
                    TriangleEdge { edge: e, sign }
                })
            })
            .collect();

        let chi = vertices.len() as i64 - edges.len() as i64 + triangles.len() as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(Error::Topology(format!(
                "Euler characteristic {chi} does not correspond to a closed orientable surface"
            )));
        }
        Ok(Self {
            vertices,
            triangles,
            edges,
            triangle_edges,
            genus: ((2 - chi) / 2) as usize,
            flipped: 0,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    /// Edges of triangle `t`; slot `i` is opposite local vertex `i`.
    pub fn triangle_edges(&self, t: usize) -> &[TriangleEdge; 3] {
        &self.triangle_edges[t]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_cells() as i64
    }

    /// Number of triangles whose winding was reversed during construction
    /// (not counting a global flip to outward orientation).
    pub fn repaired_triangles(&self) -> usize {
        self.flipped
    }

    pub fn corners(&self, t: usize) -> [Point3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unnormalised normal `(b - a) x (c - a)`, twice the area in length.
    pub fn area_normal(&self, t: usize) -> Point3 {
        let [a, b, c] = self.corners(t);
        geom::cross(geom::sub(b, a), geom::sub(c, a))
    }

    pub fn area(&self, t: usize) -> f64 {
        0.5 * geom::norm(self.area_normal(t))
    }

    pub fn unit_normal(&self, t: usize) -> Point3 {
        geom::normalize(self.area_normal(t))
    }

    pub fn centroid(&self, t: usize) -> Point3 {
        let [a, b, c] = self.corners(t);
        geom::barycentric(a, b, c, [1.0 / 3.0; 3])
    }

    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| {
                let (a, b, c) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                geom::dot(a, geom::cross(b, c)) / 6.0
            })
            .sum()
    }

    /// Same connectivity with new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Point3>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::Dimension(format!(
                "expected {} vertices, got {}",
                self.vertices.len(),
                vertices.len()
            )));
        }
        let mut mesh = Self::from_oriented(vertices, self.triangles.clone())?;
        mesh.flipped = self.flipped;
        Ok(mesh)
    }

    /// Applies `f` to every vertex, keeping connectivity and winding.
    pub fn map_vertices(&self, f: impl Fn(Point3) -> Point3) -> Result<Self> {
        self.with_vertices(self.vertices.iter().map(|&p| f(p)).collect())
    }

    pub fn stats(&self) -> MeshStats {
        mesh_stats(self)
    }
}

/// Counts, genus and edge-length statistics.
pub fn mesh_stats(mesh: &TriangleMesh) -> MeshStats {
    let lengths = mesh.edges.iter().map(|e| e.length);
    let sum: f64 = lengths.clone().sum();
    MeshStats {
        n_vertices: mesh.n_vertices(),
        n_cells: mesh.n_cells(),
        n_edges: mesh.n_edges(),
        genus: mesh.genus,
        h_avg: sum / mesh.n_edges() as f64,
        h_min: lengths.clone().fold(f64::INFINITY, f64::min),
        h_max: lengths.fold(0.0, f64::max),
    }
}

/// For each undirected edge, the incident triangles and whether each one
/// traverses it from the smaller to the larger vertex index.
type Incidence = HashMap<(usize, usize), Vec<(usize, bool)>>;

fn edge_incidence(triangles: &[[usize; 3]]) -> Result<Incidence> {
    let mut map: Incidence = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (p, q) = (tri[i], tri[(i + 1) % 3]);
            map.entry((p.min(q), p.max(q))).or_default().push((t, p < q));
        }
    }
    let mut keys: Vec<_> = map.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        match map[&key].len() {
            2 => {}
            1 => {
                return Err(Error::Topology(format!(
                    "boundary edge ({}, {}) in triangle {}",
                    key.0, key.1, map[&key][0].0
                )))
            }
            n => {
                return Err(Error::Topology(format!(
                    "non-manifold edge ({}, {}) shared by {n} triangles",
                    key.0, key.1
                )))
            }
        }
    }
    Ok(map)
}

/// Propagates the winding of triangle 0 across the surface.
fn orient(mut triangles: Vec<[usize; 3]>, incidence: &Incidence) -> Result<(Vec<[usize; 3]>, usize)> {
    let n = triangles.len();
    let mut flip: Vec<Option<bool>> = vec![None; n];
    let mut queue = VecDeque::from([0]);
    flip[0] = Some(false);
    while let Some(t) = queue.pop_front() {
        let ft = flip[t].unwrap_or(false);
        let tri = triangles[t];
        for i in 0..3 {
            let (p, q) = (tri[i], tri[(i + 1) % 3]);
            let key = (p.min(q), p.max(q));
            let dir_t = (p < q) ^ ft;
            for &(u, dir_u) in &incidence[&key] {
                if u == t {
                    continue;
                }
                // The neighbour must traverse the shared edge the other way.
                let want = dir_u == dir_t;
                match flip[u] {
                    None => {
                        flip[u] = Some(want);
                        queue.push_back(u);
                    }
                    Some(f) if f != want => {
                        return Err(Error::Topology(format!(
                            "surface is non-orientable (conflict at edge ({}, {}) between triangles {t} and {u})",
                            key.0, key.1
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    if let Some(t) = flip.iter().position(Option::is_none) {
        return Err(Error::Topology(format!(
            "surface is disconnected (triangle {t} unreachable from triangle 0)"
        )));
    }
    let mut count = 0;
    for (tri, f) in triangles.iter_mut().zip(&flip) {
        if *f == Some(true) {
            tri.swap(1, 2);
            count += 1;
        }
    }
    Ok((triangles, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tetrahedron() -> TriangleMesh {
        let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let t = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
        TriangleMesh::new(v, t).unwrap()
    }

    #[test]
    fn tetrahedron_counts() {
        let m = tetrahedron();
        let s = m.stats();
        assert_eq!((s.n_vertices, s.n_cells, s.n_edges, s.genus), (4, 4, 6, 0));
        assert!(m.signed_volume() > 0.0);
    }

    #[test]
    fn edges_traversed_oppositely() {
        let m = make_icosphere(2, 1.0).unwrap();
        for e in m.edges() {
            assert_ne!(e.plus, e.minus);
            let traverses = |t: usize, a: usize, b: usize| {
                let tri = m.triangles()[t];
                (0..3).any(|i| tri[i] == a && tri[(i + 1) % 3] == b)
            };
            assert!(traverses(e.plus, e.v_a, e.v_b));
            assert!(traverses(e.minus, e.v_b, e.v_a));
        }
    }

    #[test]
    fn inconsistent_winding_is_repaired() {
        let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let t = vec![[0, 1, 2], [0, 3, 2], [0, 3, 1], [1, 2, 3]];
        let m = TriangleMesh::new(v, t).unwrap();
        assert_eq!(m.n_edges(), 6);
        assert!(m.repaired_triangles() > 0);
        assert!(m.signed_volume() > 0.0);
    }

    #[test]
    fn inward_mesh_is_flipped_outward() {
        let v = vec![[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let t = vec![[0, 2, 1], [0, 3, 2], [0, 1, 3], [1, 2, 3]];
        let m = TriangleMesh::new(v, t).unwrap();
        assert!(m.signed_volume() > 0.0);
    }

    #[test]
    fn boundary_edge_rejected() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let t = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1]];
        let err = TriangleMesh::new(v, t).unwrap_err();
        assert!(matches!(err, Error::Topology(ref m) if m.contains("boundary")), "{err}");
    }

    #[test]
    fn non_manifold_edge_rejected() {
        // three triangles fanning around edge (0, 1)
        let v = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, -1.0, 0.0],
        ];
        let t = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        let err = TriangleMesh::new(v, t).unwrap_err();
        assert!(matches!(err, Error::Topology(ref m) if m.contains("non-manifold")), "{err}");
    }

    #[test]
    fn unreferenced_vertex_rejected() {
        let m = tetrahedron();
        let mut v = m.vertices().to_vec();
        v.push([5.0, 5.0, 5.0]);
        assert!(TriangleMesh::new(v, m.triangles().to_vec()).is_err());
    }

    #[test]
    fn icosphere_refinement_halves_h() {
        // level 0 is the flat icosahedron, whose edges shrink by ~1.8 on
        // the first projected refinement
        let h: Vec<f64> = (1..6).map(|s| make_icosphere(s, 1.0).unwrap().stats().h_avg).collect();
        for w in h.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
        }
    }

    #[test]
    fn h_avg_is_mean_edge_length() {
        let m = make_icosphere(2, 1.0).unwrap();
        let mut sum = 0.0;
        for e in m.edges() {
            sum += geom::dist(m.vertices()[e.v_a], m.vertices()[e.v_b]);
        }
        let s = m.stats();
        assert_eq!(s.n_edges, 480);
        assert!((s.h_avg - sum / 480.0).abs() < 1e-14);
        assert!(s.h_min <= s.h_avg && s.h_avg <= s.h_max);
    }
}
