//! classify → refine → count → masks → feature-space meshes.

use std::fs;
use std::path::Path;

use lulc_core::featurespace::cluster_points;
use lulc_core::kmeans::centroids;
use lulc_core::{
    area_report, classify_nearest, density_grid, individual_colormap, isosurface, lloyd, logical_mask, wcss,
    AxisOrder, BitMask, ClusterStats, ColorMap, FeaturePoint, IndexedImage, IsoMesh, KMeansResult, LloydConfig,
    RgbColor, RgbImage, SeedPalette,
};
use lulc_core::{sample_training_pixels, stats::cluster_mean_colors, Error as CoreError};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WorkbenchError};
use crate::formats;
use crate::imageio;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineOptions {
    /// Run K-means over all foreground pixels, seeded with the palette.
    /// When false, each class keeps its nearest-seed pixels.
    pub refine_means: bool,
    pub bins_per_axis: usize,
    /// Isosurface level as a fraction of the smoothed density peak.
    pub iso_level_fraction: f64,
    pub sample_n: usize,
    pub rng_seed: u64,
    pub smoothing_passes: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            refine_means: true,
            bins_per_axis: 32,
            iso_level_fraction: 0.1,
            sample_n: lulc_core::featurespace::DEFAULT_SAMPLE_SIZE,
            rng_seed: 0,
            smoothing_passes: 1,
        }
    }
}

impl PipelineOptions {
    pub fn validate(&self) -> Result<()> {
        if !(2..=256).contains(&self.bins_per_axis) {
            return Err(WorkbenchError::BadRequest(format!(
                "bins_per_axis must be in 2..=256, got {}",
                self.bins_per_axis
            )));
        }
        if !(self.iso_level_fraction > 0.0 && self.iso_level_fraction <= 1.0) {
            return Err(WorkbenchError::BadRequest(format!(
                "iso_level_fraction must be in (0, 1], got {}",
                self.iso_level_fraction
            )));
        }
        if self.smoothing_passes > 8 {
            return Err(WorkbenchError::BadRequest(format!(
                "at most 8 smoothing passes, got {}",
                self.smoothing_passes
            )));
        }
        Ok(())
    }
}

/// [`KMeansResult`] without the per-pixel assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansSummary {
    pub means: Vec<FeaturePoint>,
    pub wcss: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
    pub repairs: usize,
}

impl From<&KMeansResult> for KMeansSummary {
    fn from(r: &KMeansResult) -> Self {
        KMeansSummary {
            means: r.means.clone(),
            wcss: r.wcss,
            iterations: r.iterations,
            converged: r.converged,
            history: r.history.clone(),
            repairs: r.repairs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub indexed: IndexedImage,
    /// Thematic (foreground) clustering; `means[i]` belongs to cluster `i + 1`.
    pub kmeans: KMeansResult,
    pub stats: ClusterStats,
    pub masks: Vec<BitMask>,
    pub colormaps: Vec<ColorMap>,
    /// One per thematic cluster. `cluster` holds the 1-based cluster number,
    /// so `meshes[i].cluster == i + 2`.
    pub meshes: Vec<IsoMesh>,
    /// Training pixels per thematic cluster, same indexing as `meshes`.
    pub samples: Vec<Vec<FeaturePoint>>,
}

/// Smoothed density isosurface of the member pixels of cluster index `k`
/// (0-based); the mesh is tagged with the 1-based number.
pub fn cluster_mesh(
    img: &RgbImage,
    idx: &IndexedImage,
    k: usize,
    options: &PipelineOptions,
    color: RgbColor,
) -> Result<IsoMesh> {
    let field = cluster_field(img, idx, k, options)?;
    let level = options.iso_level_fraction * field.max();
    let mesh = if level > 0.0 { isosurface(&field, level)? } else { IsoMesh::default() };
    Ok(mesh.with_style(color, k + 1))
}

pub fn cluster_field(
    img: &RgbImage,
    idx: &IndexedImage,
    k: usize,
    options: &PipelineOptions,
) -> Result<lulc_core::DensityField> {
    let points = cluster_points(img, idx, k, AxisOrder::RGB)?;
    Ok(density_grid(&points, options.bins_per_axis)?.smoothed(options.smoothing_passes))
}

fn refine(img: &RgbImage, first: IndexedImage, palette: &SeedPalette, refine_means: bool) -> Result<(IndexedImage, KMeansResult)> {
    let fg: Vec<usize> = first
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l != 0)
        .map(|(p, _)| p)
        .collect();
    let points: Vec<FeaturePoint> = fg.iter().map(|&p| FeaturePoint::from(img.pixels()[p])).collect();
    let thematic: Vec<FeaturePoint> = palette.colors()[1..].iter().map(|&c| c.into()).collect();
    let k = thematic.len();
    if points.is_empty() {
        return Err(CoreError::Degenerate("no foreground pixels; every pixel is nearest the background seed".into()).into());
    }

    let result = if refine_means && points.len() >= k {
        lloyd(&points, &thematic, LloydConfig::default())?
    } else {
        let assignments: Vec<usize> = fg.iter().map(|&p| usize::from(first.labels()[p]) - 1).collect();
        let means: Vec<FeaturePoint> = centroids(&points, &assignments, k)?
            .into_iter()
            .zip(&thematic)
            .map(|(m, seed)| m.unwrap_or(*seed))
            .collect();
        let w = wcss(&points, &assignments, &means)?;
        KMeansResult {
            means,
            assignments,
            wcss: w,
            iterations: 0,
            converged: true,
            history: vec![w],
            repairs: 0,
        }
    };

    let mut labels = first.labels().to_vec();
    for (&p, &a) in fg.iter().zip(&result.assignments) {
        labels[p] = (a + 1) as u8;
    }
    let indexed = IndexedImage::new(first.width(), first.height(), labels, first.colormap().clone())?;
    Ok((indexed, result))
}

pub fn run_pipeline(img: &RgbImage, palette: &SeedPalette, options: &PipelineOptions) -> Result<PipelineOutput> {
    options.validate()?;
    let first = classify_nearest(img, palette)?;
    let (indexed, kmeans) = refine(img, first, palette, options.refine_means)?;

    let counts = lulc_core::cluster_areas(&indexed);
    let stats = area_report(&counts)?
        .with_palette(palette)?
        .with_mean_colors(&cluster_mean_colors(img, &indexed)?)?;

    let k = palette.len();
    let shared = palette.colormap();
    let masks = (0..k).map(|c| logical_mask(&indexed, c)).collect::<Result<Vec<_>, _>>()?;
    let colormaps = (0..k)
        .map(|c| individual_colormap(&shared, c, RgbColor::WHITE))
        .collect::<Result<Vec<_>, _>>()?;

    let colors = palette.colors();
    let meshes = std::thread::scope(|s| {
        let handles: Vec<_> = (1..k)
            .map(|c| {
                let (indexed, colors) = (&indexed, &colors);
                s.spawn(move || cluster_mesh(img, indexed, c, options, colors[c]))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("mesh worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;

    let samples = (1..k)
        .map(|c| match sample_training_pixels(img, &indexed, c, options.sample_n, options.rng_seed.wrapping_add(c as u64)) {
            Err(CoreError::EmptySample(_)) => Ok(Vec::new()),
            other => other,
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(PipelineOutput {
        indexed,
        kmeans,
        stats,
        masks,
        colormaps,
        meshes,
        samples,
    })
}

pub fn stats_json(stats: &ClusterStats) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec_pretty(stats)?)
}

/// Write every run artifact into `dir`, which must already exist.
pub fn write_artifacts(dir: &Path, out: &PipelineOutput) -> Result<()> {
    for (i, (mask, map)) in out.masks.iter().zip(&out.colormaps).enumerate() {
        fs::write(dir.join(formats::mask_file(i + 1)), imageio::encode_mask_png(mask)?)?;
        fs::write(dir.join(formats::colormap_file(i + 1)), formats::colormap_json(map)?)?;
    }
    fs::write(dir.join(formats::CLUSTERED_PNG), imageio::encode_label_png(&out.indexed)?)?;
    fs::write(dir.join(formats::CLUSTERED_MAP), formats::colormap_json(out.indexed.colormap())?)?;
    fs::write(dir.join(formats::STATS_JSON), stats_json(&out.stats)?)?;
    for mesh in &out.meshes {
        fs::write(dir.join(formats::mesh_file(mesh.cluster)), formats::mesh_json(mesh)?)?;
    }
    Ok(())
}
