//! Marching cubes over a [`DensityField`].
//!
//! Field samples sit at cell centers, `(i + 0.5) / bins` along each axis.
//! The lattice is padded with one layer of zeros on every side, so for any
//! positive level the surface closes before the padded boundary and every
//! vertex lies within one cell width of the unit cube.
//!
//! Rather than a precomputed case table, each cube's polygons are traced from
//! its six faces. On a face, walking the corners counter-clockwise about the
//! outward normal, every crossing where the walk enters the inside region
//! (value >= level) is joined to the next crossing where it leaves. With four
//! crossings this always cuts off the two inside corners separately. Both
//! cubes sharing a face see the same corner values and so draw the same
//! segments, in opposite directions, which makes the mesh closed and
//! consistently oriented. Polygons with more than three vertices are fanned
//! around an added center vertex.

use alloc::vec;
use alloc::vec::Vec;

use super::density::DensityField;
use super::IsoMesh;
use crate::error::{Error, Result};

/// Cube edges as (corner, corner, axis); corner bits are x | y << 1 | z << 2.
const EDGES: [(usize, usize, usize); 12] = [
    (0, 1, 0),
    (2, 3, 0),
    (4, 5, 0),
    (6, 7, 0),
    (0, 2, 1),
    (1, 3, 1),
    (4, 6, 1),
    (5, 7, 1),
    (0, 4, 2),
    (1, 5, 2),
    (2, 6, 2),
    (3, 7, 2),
];

fn edge_between(a: usize, b: usize) -> usize {
    EDGES
        .iter()
        .position(|&(p, q, _)| (p == a && q == b) || (p == b && q == a))
        .expect("corners are adjacent")
}

/// Corners of each face, counter-clockwise seen from outside the cube.
fn faces() -> [[usize; 4]; 6] {
    let mut out = [[0; 4]; 6];
    for axis in 0..3 {
        let u = (axis + 1) % 3;
        let v = (axis + 2) % 3;
        for side in 0..2 {
            let corner = |cu: usize, cv: usize| (side << axis) | (cu << u) | (cv << v);
            out[axis * 2 + side] = if side == 1 {
                [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)]
            } else {
                [corner(0, 0), corner(0, 1), corner(1, 1), corner(1, 0)]
            };
        }
    }
    out
}

/// Closed loops of crossed edges for one cube configuration.
fn cube_loops(inside: [bool; 8], faces: &[[usize; 4]; 6]) -> Vec<Vec<usize>> {
    let mut next = [usize::MAX; 12];
    for face in faces {
        let mut crossings: [(usize, bool); 4] = [(0, false); 4];
        let mut m = 0;
        for j in 0..4 {
            let (a, b) = (face[j], face[(j + 1) % 4]);
            if inside[a] != inside[b] {
                crossings[m] = (edge_between(a, b), inside[b]);
                m += 1;
            }
        }
        for idx in 0..m {
            let (edge, entering) = crossings[idx];
            if !entering {
                continue;
            }
            for step in 1..m {
                let (exit, e) = crossings[(idx + step) % m];
                if !e {
                    next[edge] = exit;
                    break;
                }
            }
        }
    }
    let mut visited = [false; 12];
    let mut loops = Vec::new();
    for start in 0..12 {
        if next[start] == usize::MAX || visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut e = start;
        while !visited[e] {
            visited[e] = true;
            cycle.push(e);
            e = next[e];
        }
        loops.push(cycle);
    }
    loops
}

/// Triangulate the `level` set of `field`. Empty when no cell reaches
/// `level`; errors unless `level` is finite and positive.
pub fn isosurface(field: &DensityField, level: f64) -> Result<IsoMesh> {
    if !(level.is_finite() && level > 0.0) {
        return Err(Error::Range(level));
    }
    let n = field.bins();
    let mut mesh = IsoMesh::default();
    if field.max() < level {
        return Ok(mesh);
    }

    // padded lattice coordinates run 0..=n+1; coordinate c maps to cell c-1
    let p = n + 2;
    let sample = |x: usize, y: usize, z: usize| -> f64 {
        if (1..=n).contains(&x) && (1..=n).contains(&y) && (1..=n).contains(&z) {
            field.get(x - 1, y - 1, z - 1)
        } else {
            0.0
        }
    };
    let coord = |c: usize| (c as f64 - 0.5) / n as f64;
    let cell = 1.0 / n as f64;
    let faces = faces();
    let mut edge_vertex = vec![u32::MAX; p * p * p * 3];

    for z in 0..p - 1 {
        for y in 0..p - 1 {
            for x in 0..p - 1 {
                let mut values = [0.0; 8];
                let mut inside = [false; 8];
                for c in 0..8 {
                    values[c] = sample(x + (c & 1), y + ((c >> 1) & 1), z + ((c >> 2) & 1));
                    inside[c] = values[c] >= level;
                }
                if inside.iter().all(|&b| b) || inside.iter().all(|&b| !b) {
                    continue;
                }
                for cycle in cube_loops(inside, &faces) {
                    let ids: Vec<u32> = cycle
                        .iter()
                        .map(|&e| {
                            let (c0, c1, axis) = EDGES[e];
                            let (gx, gy, gz) = (x + (c0 & 1), y + ((c0 >> 1) & 1), z + ((c0 >> 2) & 1));
                            let key = ((gz * p + gy) * p + gx) * 3 + axis;
                            if edge_vertex[key] == u32::MAX {
                                let t = (level - values[c0]) / (values[c1] - values[c0]);
                                let mut pos = [coord(gx), coord(gy), coord(gz)];
                                pos[axis] += t * cell;
                                edge_vertex[key] = mesh.vertices.len() as u32;
                                mesh.vertices.push(pos);
                            }
                            edge_vertex[key]
                        })
                        .collect();
                    if ids.len() == 3 {
                        mesh.triangles.push([ids[0], ids[1], ids[2]]);
                        continue;
                    }
                    let mut center = [0.0; 3];
                    for &i in &ids {
                        let v = mesh.vertices[i as usize];
                        for d in 0..3 {
                            center[d] += v[d];
                        }
                    }
                    let k = ids.len() as f64;
                    let center_id = mesh.vertices.len() as u32;
                    mesh.vertices.push(center.map(|s| s / k));
                    for i in 0..ids.len() {
                        mesh.triangles.push([ids[i], ids[(i + 1) % ids.len()], center_id]);
                    }
                }
            }
        }
    }
    Ok(mesh)
}

/// Isosurface of the cellwise minimum of two fields: the region where both
/// clusters reach `level`.
pub fn overlap_mesh(a: &DensityField, b: &DensityField, level: f64) -> Result<IsoMesh> {
    isosurface(&a.min_with(b)?, level)
}
