use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::IsoMesh;
use crate::error::{Error, Result};
use crate::kmeans::FeaturePoint;

type Mat3 = [[f64; 3]; 3];

/// Ridge added to a singular covariance before factoring.
pub const COVARIANCE_RIDGE: f64 = 1e-6;
const PIVOT_FLOOR: f64 = 1e-12;
const MAX_SUBDIVISIONS: usize = 7;

/// Mean and covariance of one cluster's feature points.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterGaussian {
    pub mean: FeaturePoint,
    pub covariance: Mat3,
}

impl ClusterGaussian {
    pub fn new(mean: FeaturePoint, covariance: Mat3) -> Result<Self> {
        if !mean.is_finite() || covariance.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("mean and covariance must be finite".into()));
        }
        for i in 0..3 {
            for j in 0..i {
                if (covariance[i][j] - covariance[j][i]).abs() > 1e-12 {
                    return Err(Error::Domain(format!("covariance not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(ClusterGaussian { mean, covariance })
    }

    /// Sample mean and population covariance (divides by n).
    pub fn from_points(points: &[FeaturePoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Degenerate("no points to fit".into()));
        }
        let n = points.len() as f64;
        let mut mean = [0.0; 3];
        for p in points {
            for d in 0..3 {
                mean[d] += p.0[d];
            }
        }
        mean = mean.map(|s| s / n);
        let mut cov = [[0.0; 3]; 3];
        for p in points {
            let c = [p.0[0] - mean[0], p.0[1] - mean[1], p.0[2] - mean[2]];
            for i in 0..3 {
                for j in i..3 {
                    cov[i][j] += c[i] * c[j];
                }
            }
        }
        for i in 0..3 {
            for j in i..3 {
                cov[i][j] /= n;
                cov[j][i] = cov[i][j];
            }
        }
        ClusterGaussian::new(FeaturePoint(mean), cov)
    }

    /// Eigenvalues in descending order (closed form for symmetric 3×3).
    pub fn eigenvalues(&self) -> [f64; 3] {
        symmetric_eigenvalues(&self.covariance)
    }

    /// Lower-triangular `L` with `L Lᵀ = Σ`, adding [`COVARIANCE_RIDGE`] to
    /// the diagonal when `Σ` is singular.
    pub fn factor(&self) -> Result<Mat3> {
        if let Some(l) = cholesky(&self.covariance) {
            return Ok(l);
        }
        let mut ridged = self.covariance;
        for (i, row) in ridged.iter_mut().enumerate() {
            row[i] += COVARIANCE_RIDGE;
        }
        cholesky(&ridged).ok_or_else(|| {
            Error::Degenerate("covariance is not positive definite even after ridge".into())
        })
    }
}

fn cholesky(a: &Mat3) -> Option<Mat3> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > PIVOT_FLOOR) {
                    return None;
                }
                l[i][i] = libm::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn symmetric_eigenvalues(a: &Mat3) -> [f64; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if p1 == 0.0 {
        let mut d = [a[0][0], a[1][1], a[2][2]];
        d.sort_by(|x, y| y.total_cmp(x));
        return d;
    }
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let sq = |v: f64| v * v;
    let p2 = sq(a[0][0] - q) + sq(a[1][1] - q) + sq(a[2][2] - q) + 2.0 * p1;
    let p = libm::sqrt(p2 / 6.0);
    let mut b = *a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = libm::acos(r) / 3.0;
    let e1 = q + 2.0 * p * libm::cos(phi);
    let e3 = q + 2.0 * p * libm::cos(phi + 2.0 * core::f64::consts::PI / 3.0);
    [e1, 3.0 * q - e1 - e3, e3]
}

/// Unit icosphere, faces wound counter-clockwise seen from outside.
fn icosphere(subdivisions: usize) -> (Vec<[f64; 3]>, Vec<[u32; 3]>) {
    let t = (1.0 + libm::sqrt(5.0)) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let normalize = |v: [f64; 3]| {
        let len = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        v.map(|c| c / len)
    };
    let mut vertices: Vec<[f64; 3]> = raw.iter().map(|&v| normalize(v)).collect();
    let mut faces: Vec<[u32; 3]> = alloc::vec![
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
        let mut midpoints: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (va, vb) = (vertices[a as usize], vertices[b as usize]);
                vertices.push(normalize([
                    (va[0] + vb[0]) / 2.0,
                    (va[1] + vb[1]) / 2.0,
                    (va[2] + vb[2]) / 2.0,
                ]));
                (vertices.len() - 1) as u32
            })
        };
        let mut refined = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            refined.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = refined;
    }
    (vertices, faces)
}

/// Tessellated surface `{x : (x − μ)ᵀ Σ⁻¹ (x − μ) = scale²}`.
pub fn ellipsoid_mesh(g: &ClusterGaussian, scale: f64, subdivisions: usize) -> Result<IsoMesh> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    if subdivisions > MAX_SUBDIVISIONS {
        return Err(Error::Domain(format!(
            "at most {MAX_SUBDIVISIONS} subdivisions, got {subdivisions}"
        )));
    }
    let l = g.factor()?;
    let (unit, triangles) = icosphere(subdivisions);
    let mu = g.mean.0;
    let vertices = unit
        .iter()
        .map(|u| {
            let mut x = mu;
            for i in 0..3 {
                for j in 0..=i {
                    x[i] += scale * l[i][j] * u[j];
                }
            }
            x
        })
        .collect();
    Ok(IsoMesh {
        vertices,
        triangles,
        ..IsoMesh::default()
    })
}
