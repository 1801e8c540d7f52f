use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kmeans::FeaturePoint;

/// 3D histogram over the unit cube, `bins³` cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityGrid {
    bins: usize,
    counts: Vec<u64>,
    total_points: u64,
}

/// Real-valued scalar field on the same lattice as a [`DensityGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    bins: usize,
    values: Vec<f64>,
}

fn cell_index(bins: usize, i: usize, j: usize, l: usize) -> usize {
    i + bins * (j + bins * l)
}

fn bin_of(v: f64, bins: usize) -> usize {
    // 1.0 lands in the last bin
    ((v * bins as f64) as usize).min(bins - 1)
}

pub fn density_grid(points: &[FeaturePoint], bins_per_axis: usize) -> Result<DensityGrid> {
    if bins_per_axis < 2 {
        return Err(Error::Domain(format!("need at least 2 bins per axis, got {bins_per_axis}")));
    }
    let cells = bins_per_axis
        .checked_pow(3)
        .ok_or(Error::Overflow)?;
    let mut counts = vec![0u64; cells];
    for (n, p) in points.iter().enumerate() {
        if !p.0.iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(Error::Domain(format!("point {n} {:?} lies outside the unit cube", p.0)));
        }
        let [i, j, l] = p.0.map(|v| bin_of(v, bins_per_axis));
        counts[cell_index(bins_per_axis, i, j, l)] += 1;
    }
    Ok(DensityGrid {
        bins: bins_per_axis,
        counts,
        total_points: points.len() as u64,
    })
}

impl DensityGrid {
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_points(&self) -> u64 {
        self.total_points
    }

    pub fn count(&self, i: usize, j: usize, l: usize) -> u64 {
        self.counts[cell_index(self.bins, i, j, l)]
    }

    /// Cell containing `p`, or `None` outside the cube.
    pub fn cell_of(&self, p: &FeaturePoint) -> Option<[usize; 3]> {
        p.0.iter()
            .all(|v| (0.0..=1.0).contains(v))
            .then(|| p.0.map(|v| bin_of(v, self.bins)))
    }

    /// Raw counts as a real field.
    pub fn field(&self) -> DensityField {
        DensityField {
            bins: self.bins,
            values: self.counts.iter().map(|&c| c as f64).collect(),
        }
    }

    /// Counts after `passes` rounds of 3×3×3 box smoothing.
    pub fn smoothed(&self, passes: usize) -> DensityField {
        let mut f = self.field();
        for _ in 0..passes {
            f = f.box_smooth();
        }
        f
    }
}

impl DensityField {
    pub fn new(bins: usize, values: Vec<f64>) -> Result<Self> {
        if bins < 2 {
            return Err(Error::Domain(format!("need at least 2 bins per axis, got {bins}")));
        }
        if values.len() != bins.pow(3) {
            return Err(Error::Shape(format!(
                "{} values for a {bins}^3 field",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("field values must be finite".into()));
        }
        Ok(DensityField { bins, values })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.values[cell_index(self.bins, i, j, l)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Mean over the 27-cell neighborhood; cells outside the cube count as 0.
    pub fn box_smooth(&self) -> DensityField {
        let n = self.bins;
        // separable: three 1D passes of a 3-tap sum
        let mut cur = self.values.clone();
        let mut next = vec![0.0; cur.len()];
        for axis in 0..3 {
            let stride = match axis {
                0 => 1,
                1 => n,
                _ => n * n,
            };
            for idx in 0..cur.len() {
                let coord = (idx / stride) % n;
                let mut s = cur[idx];
                if coord > 0 {
                    s += cur[idx - stride];
                }
                if coord + 1 < n {
                    s += cur[idx + stride];
                }
                next[idx] = s;
            }
            core::mem::swap(&mut cur, &mut next);
        }
        cur.iter_mut().for_each(|v| *v /= 27.0);
        DensityField { bins: n, values: cur }
    }

    /// Cellwise minimum: density both clusters share.
    pub fn min_with(&self, other: &DensityField) -> Result<DensityField> {
        if self.bins != other.bins {
            return Err(Error::Shape(format!(
                "fields have {} and {} bins per axis",
                self.bins, other.bins
            )));
        }
        Ok(DensityField {
            bins: self.bins,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.min(*b))
                .collect(),
        })
    }

    /// Cells whose value reaches `level`.
    pub fn occupancy(&self, level: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v >= level).collect()
    }
}
