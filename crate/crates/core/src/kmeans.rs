//! Lloyd-style K-means over RGB feature points.
//!
//! The objective is the within-cluster sum of squares
//! `Σ_i Σ_{x ∈ S_i} ‖x − μ_i‖²`. Each iteration assigns every point to its
//! nearest mean (ties to the lowest index), re-seeds empty clusters, then
//! moves every mean to the centroid of its members. Neither half-step can
//! increase the objective, so [`KMeansResult::history`] is non-increasing.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::color::RgbColor;
use crate::error::{Error, Result};

/// A point in the 3D RGB feature space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct FeaturePoint(pub [f64; 3]);

impl FeaturePoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        FeaturePoint([x, y, z])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn distance_sq(&self, other: &FeaturePoint) -> f64 {
        let d0 = self.0[0] - other.0[0];
        let d1 = self.0[1] - other.0[1];
        let d2 = self.0[2] - other.0[2];
        d0 * d0 + d1 * d1 + d2 * d2
    }
}

impl From<RgbColor> for FeaturePoint {
    fn from(c: RgbColor) -> Self {
        FeaturePoint(c.to_array())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydConfig {
    pub max_iter: usize,
    /// Stop once no mean moves farther than this (Euclidean, RGB units).
    pub tol: f64,
}

impl Default for LloydConfig {
    fn default() -> Self {
        LloydConfig {
            max_iter: 100,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KMeansResult {
    pub means: Vec<FeaturePoint>,
    pub assignments: Vec<usize>,
    pub wcss: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each iteration's update step.
    pub history: Vec<f64>,
    /// Number of empty-cluster re-seeds performed.
    pub repairs: usize,
}

pub fn wcss(points: &[FeaturePoint], assignments: &[usize], means: &[FeaturePoint]) -> Result<f64> {
    if points.len() != assignments.len() {
        return Err(Error::Shape(format!(
            "{} points but {} assignments",
            points.len(),
            assignments.len()
        )));
    }
    let mut total = 0.0;
    for (p, &a) in points.iter().zip(assignments) {
        let mu = means.get(a).ok_or(Error::Index {
            index: a,
            len: means.len(),
        })?;
        total += p.distance_sq(mu);
    }
    Ok(total)
}

/// Centroid of each cluster's members; `None` for empty clusters.
pub fn centroids(points: &[FeaturePoint], assignments: &[usize], k: usize) -> Result<Vec<Option<FeaturePoint>>> {
    if points.len() != assignments.len() {
        return Err(Error::Shape(format!(
            "{} points but {} assignments",
            points.len(),
            assignments.len()
        )));
    }
    let mut sums = vec![[0.0f64; 3]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        if a >= k {
            return Err(Error::Index { index: a, len: k });
        }
        for d in 0..3 {
            sums[a][d] += p.0[d];
        }
        counts[a] += 1;
    }
    Ok(sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| {
            (n > 0).then(|| {
                let n = n as f64;
                FeaturePoint([s[0] / n, s[1] / n, s[2] / n])
            })
        })
        .collect())
}

fn nearest(p: &FeaturePoint, means: &[FeaturePoint]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, m) in means.iter().enumerate() {
        let d = p.distance_sq(m);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Move each empty cluster's mean onto the point farthest from its current
/// mean, taking that point from a cluster that keeps at least one member.
/// Returns the number of clusters re-seeded.
fn repair_empty_clusters(
    points: &[FeaturePoint],
    assignments: &mut [usize],
    means: &mut [FeaturePoint],
    counts: &mut [usize],
) -> usize {
    let mut repaired = 0;
    for empty in 0..means.len() {
        if counts[empty] != 0 {
            continue;
        }
        let mut donor = None;
        let mut far = f64::NEG_INFINITY;
        for (j, p) in points.iter().enumerate() {
            let a = assignments[j];
            if counts[a] < 2 {
                continue;
            }
            let d = p.distance_sq(&means[a]);
            if d > far {
                far = d;
                donor = Some(j);
            }
        }
        // k <= n guarantees some cluster has two members while one is empty.
        let Some(j) = donor else { break };
        counts[assignments[j]] -= 1;
        assignments[j] = empty;
        counts[empty] = 1;
        means[empty] = points[j];
        repaired += 1;
    }
    repaired
}

pub fn lloyd(points: &[FeaturePoint], initial_means: &[FeaturePoint], config: LloydConfig) -> Result<KMeansResult> {
    let n = points.len();
    let k = initial_means.len();
    if n == 0 {
        return Err(Error::Shape("no points to cluster".into()));
    }
    if k == 0 {
        return Err(Error::Shape("no initial means".into()));
    }
    if k > n {
        return Err(Error::Infeasible { k, n });
    }
    if let Some(bad) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::Domain(format!("point {bad} is not finite")));
    }
    for (i, m) in initial_means.iter().enumerate() {
        if !m.is_finite() {
            return Err(Error::Domain(format!("initial mean {i} is not finite")));
        }
        if initial_means[..i].contains(m) {
            return Err(Error::Domain(format!("initial mean {i} duplicates an earlier mean")));
        }
    }
    if config.max_iter == 0 {
        return Err(Error::Domain("max_iter must be at least 1".into()));
    }
    if !(config.tol >= 0.0) {
        return Err(Error::Domain("tolerance must be non-negative".into()));
    }

    let mut means = initial_means.to_vec();
    let mut assignments = vec![0usize; n];
    let mut counts = vec![0usize; k];
    let mut history = Vec::new();
    let mut repairs = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iter {
        iterations += 1;
        let previous = means.clone();

        counts.iter_mut().for_each(|c| *c = 0);
        for (a, p) in assignments.iter_mut().zip(points) {
            *a = nearest(p, &means);
            counts[*a] += 1;
        }
        let repaired = repair_empty_clusters(points, &mut assignments, &mut means, &mut counts);
        repairs += repaired;

        for (i, c) in centroids(points, &assignments, k)?.into_iter().enumerate() {
            if let Some(c) = c {
                means[i] = c;
            }
        }
        history.push(wcss(points, &assignments, &means)?);

        let shift = means
            .iter()
            .zip(&previous)
            .map(|(a, b)| libm::sqrt(a.distance_sq(b)))
            .fold(0.0, f64::max);
        if repaired == 0 && shift < config.tol {
            converged = true;
            break;
        }
    }

    let wcss = history.last().copied().unwrap_or(0.0);
    Ok(KMeansResult {
        means,
        assignments,
        wcss,
        iterations,
        converged,
        history,
        repairs,
    })
}
