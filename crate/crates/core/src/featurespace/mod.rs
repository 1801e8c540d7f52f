//! Geometry in the RGB feature space.
//!
//! Each thematic cluster becomes a point cloud in the unit cube. From there:
//! a 3D histogram ([`density_grid`]), box-smoothed into a [`DensityField`];
//! isosurfaces of that field ([`isosurface`]); isosurfaces of the cellwise
//! minimum of two fields, which bound the region where both clusters are
//! dense ([`overlap_mesh`]); and mean-centered ellipsoids from each cluster's
//! covariance ([`ellipsoid_mesh`]).

mod density;
mod ellipsoid;
mod marching_cubes;
mod sampling;

use alloc::format;
use alloc::vec::Vec;

pub use density::{density_grid, DensityField, DensityGrid};
pub use ellipsoid::{ellipsoid_mesh, ClusterGaussian};
pub use marching_cubes::{isosurface, overlap_mesh};
pub use sampling::{cluster_points, sample_training_pixels, DEFAULT_SAMPLE_SIZE};

use crate::color::RgbColor;
use crate::error::{Error, Result};
use crate::kmeans::FeaturePoint;

/// Which color channel feeds each feature-space axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AxisOrder([usize; 3]);

impl AxisOrder {
    pub const RGB: AxisOrder = AxisOrder([0, 1, 2]);
    pub const BGR: AxisOrder = AxisOrder([2, 1, 0]);

    /// `channels[axis]` is the channel (0 = R, 1 = G, 2 = B) plotted on `axis`.
    pub fn new(channels: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &c in &channels {
            if c > 2 || seen[c] {
                return Err(Error::Domain(format!("{channels:?} is not a channel permutation")));
            }
            seen[c] = true;
        }
        Ok(AxisOrder(channels))
    }

    pub fn channels(&self) -> [usize; 3] {
        self.0
    }

    pub fn apply(&self, c: &RgbColor) -> FeaturePoint {
        let rgb = c.to_array();
        FeaturePoint([rgb[self.0[0]], rgb[self.0[1]], rgb[self.0[2]]])
    }

    /// Inverse of [`AxisOrder::apply`].
    pub fn color_of(&self, p: &FeaturePoint) -> RgbColor {
        let mut rgb = [0.0; 3];
        for axis in 0..3 {
            rgb[self.0[axis]] = p.0[axis];
        }
        RgbColor::from_array(rgb)
    }
}

impl Default for AxisOrder {
    fn default() -> Self {
        AxisOrder::RGB
    }
}

/// Triangle mesh for one cluster's surface in feature space.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsoMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
    pub color: RgbColor,
    pub cluster: usize,
}

impl IsoMesh {
    pub fn with_style(mut self, color: RgbColor, cluster: usize) -> Self {
        self.color = color;
        self.cluster = cluster;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Triangle indices in range and vertices finite.
    pub fn is_valid(&self) -> bool {
        let n = self.vertices.len();
        self.vertices.iter().all(|v| v.iter().all(|c| c.is_finite()))
            && self.triangles.iter().all(|t| t.iter().all(|&i| (i as usize) < n))
    }

    pub fn vertex_centroid(&self) -> Option<[f64; 3]> {
        if self.vertices.is_empty() {
            return None;
        }
        let mut s = [0.0; 3];
        for v in &self.vertices {
            for d in 0..3 {
                s[d] += v[d];
            }
        }
        let n = self.vertices.len() as f64;
        Some([s[0] / n, s[1] / n, s[2] / n])
    }

    /// Signed enclosed volume (divergence theorem). Positive when the
    /// triangles wind counter-clockwise seen from outside.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = self.vertices[t[0] as usize];
                let b = self.vertices[t[1] as usize];
                let c = self.vertices[t[2] as usize];
                (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                    + a[2] * (b[0] * c[1] - b[1] * c[0]))
                    / 6.0
            })
            .sum()
    }
}
