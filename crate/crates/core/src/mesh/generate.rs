use std::collections::HashMap;

use super::TriangleMesh;
use crate::geom::{self, Point3};
use crate::{Error, Result};

/// Largest icosphere subdivision level accepted by [`make_icosphere`].
pub const MAX_SUBDIVISIONS: u32 = 8;

/// Icosahedron subdivided `subdivisions` times and projected onto a sphere.
///
/// Each level splits every triangle into four, so the mesh has
/// `20 * 4^s` triangles.
pub fn make_icosphere(subdivisions: u32, radius: f64) -> Result<TriangleMesh> {
    if subdivisions > MAX_SUBDIVISIONS {
        return Err(Error::Limit(format!(
            "icosphere subdivisions {subdivisions} exceed the limit of {MAX_SUBDIVISIONS}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Limit(format!("icosphere radius must be positive, got {radius}")));
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .iter()
    .map(|&p| geom::normalize(p))
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point3>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let m = geom::normalize(geom::scale(geom::add(vertices[a], vertices[b]), 0.5));
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }

    let vertices = vertices.into_iter().map(|p| geom::scale(p, radius)).collect();
    TriangleMesh::new(vertices, triangles)
}

/// Ring torus with `major_segments` around the central axis and
/// `minor_segments` around the tube. Each grid quad is split into two
/// triangles.
pub fn make_torus(
    major_segments: usize,
    minor_segments: usize,
    major_radius: f64,
    minor_radius: f64,
) -> Result<TriangleMesh> {
    if major_segments < 3 || minor_segments < 3 {
        return Err(Error::Limit(format!(
            "torus needs at least 3 segments in each direction, got ({major_segments}, {minor_segments})"
        )));
    }
    if !(minor_radius > 0.0 && minor_radius < major_radius) {
        return Err(Error::Limit(format!(
            "torus radii must satisfy 0 < r < R, got R = {major_radius}, r = {minor_radius}"
        )));
    }
    let idx = |i: usize, j: usize| (i % major_segments) * minor_segments + (j % minor_segments);
    let mut vertices = Vec::with_capacity(major_segments * minor_segments);
    for i in 0..major_segments {
        let u = std::f64::consts::TAU * i as f64 / major_segments as f64;
        for j in 0..minor_segments {
            let v = std::f64::consts::TAU * j as f64 / minor_segments as f64;
            let rho = major_radius + minor_radius * v.cos();
            vertices.push([rho * u.cos(), rho * u.sin(), minor_radius * v.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * major_segments * minor_segments);
    for i in 0..major_segments {
        for j in 0..minor_segments {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    TriangleMesh::new(vertices, triangles)
}

/// Surface of a `3 x (2h + 1)` slab of unit cubes with `h` square holes
/// punched through it, giving a closed surface of genus `h`.
pub fn make_holed_plate(holes: usize) -> Result<TriangleMesh> {
    if holes == 0 || holes > 16 {
        return Err(Error::Limit(format!("holed plate supports 1..=16 holes, got {holes}")));
    }
    let nx = 3usize;
    let ny = 2 * holes + 1;
    let filled = |x: i64, y: i64| {
        x >= 0 && y >= 0 && (x as usize) < nx && (y as usize) < ny && !(x == 1 && y % 2 == 1)
    };

    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut vertices: Vec<Point3> = Vec::new();
    let mut vertex = |p: [i64; 3], vertices: &mut Vec<Point3>| {
        *index.entry(p).or_insert_with(|| {
            vertices.push([p[0] as f64, p[1] as f64, p[2] as f64]);
            vertices.len() - 1
        })
    };

    let mut triangles = Vec::new();
    for x in 0..nx as i64 {
        for y in 0..ny as i64 {
            if !filled(x, y) {
                continue;
            }
            // (axis, side): neighbour offset and the quad corners, wound
            // counterclockwise seen from outside the cube
            let faces: [([i64; 2], [[i64; 3]; 4]); 6] = [
                ([-1, 0], [[0, 0, 0], [0, 0, 1], [0, 1, 1], [0, 1, 0]]),
                ([1, 0], [[1, 0, 0], [1, 1, 0], [1, 1, 1], [1, 0, 1]]),
                ([0, -1], [[0, 0, 0], [1, 0, 0], [1, 0, 1], [0, 0, 1]]),
                ([0, 1], [[0, 1, 0], [0, 1, 1], [1, 1, 1], [1, 1, 0]]),
                ([0, 0], [[0, 0, 0], [0, 1, 0], [1, 1, 0], [1, 0, 0]]),
                ([0, 0], [[0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]]),
            ];
            for (offset, corners) in faces {
                let exposed = offset == [0, 0] || !filled(x + offset[0], y + offset[1]);
                if !exposed {
                    continue;
                }
                let q: Vec<usize> = corners
                    .iter()
                    .map(|c| vertex([x + c[0], y + c[1], c[2]], &mut vertices))
                    .collect();
                triangles.push([q[0], q[1], q[2]]);
                triangles.push([q[0], q[2], q[3]]);
            }
        }
    }
    TriangleMesh::new(vertices, triangles)
}
