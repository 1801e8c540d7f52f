//! Per-cluster pixel counts and the area report.
//!
//! Index 0 is the background. Its share is reported against the whole image;
//! thematic clusters carry both their share of the image and their share of
//! the foreground (non-background) area. The text report prints the
//! foreground share for thematic clusters, which is how the published LULC
//! area listings are computed.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::classify::SeedPalette;
use crate::color::RgbColor;
use crate::error::{Error, Result};
use crate::raster::{IndexedImage, RgbImage};

pub fn cluster_areas(img: &IndexedImage) -> Vec<u64> {
    let mut counts = vec![0u64; img.cluster_count()];
    for &l in img.labels() {
        counts[usize::from(l)] += 1;
    }
    counts
}

/// Centroid color of each cluster's member pixels; `None` when empty.
pub fn cluster_mean_colors(img: &RgbImage, idx: &IndexedImage) -> Result<Vec<Option<RgbColor>>> {
    if img.width() != idx.width() || img.height() != idx.height() {
        return Err(Error::Shape(format!(
            "image is {}x{} but labels are {}x{}",
            img.width(),
            img.height(),
            idx.width(),
            idx.height()
        )));
    }
    let k = idx.cluster_count();
    let mut sums = vec![[0.0f64; 3]; k];
    let mut counts = vec![0u64; k];
    for (p, &l) in img.pixels().iter().zip(idx.labels()) {
        let l = usize::from(l);
        sums[l][0] += p.r;
        sums[l][1] += p.g;
        sums[l][2] += p.b;
        counts[l] += 1;
    }
    Ok(sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| {
            (n > 0).then(|| {
                let n = n as f64;
                RgbColor::new(s[0] / n, s[1] / n, s[2] / n)
            })
        })
        .collect())
}

/// Round to two decimals, halves away from zero.
pub fn round_percent(pct: f64) -> f64 {
    libm::round(pct * 100.0) / 100.0
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterEntry {
    /// 0-based cluster index; reports print `index + 1`.
    pub index: usize,
    pub label: String,
    pub count: u64,
    /// Legend color (the seed color).
    pub color: Option<RgbColor>,
    /// Centroid of the member pixels.
    pub mean_color: Option<RgbColor>,
    pub pct_of_image: f64,
    /// `None` for the background cluster.
    pub pct_of_foreground: Option<f64>,
}

impl ClusterEntry {
    pub fn number(&self) -> usize {
        self.index + 1
    }

    pub fn is_background(&self) -> bool {
        self.index == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterStats {
    pub image_area: u64,
    pub background_area: u64,
    pub foreground_area: u64,
    pub clusters: Vec<ClusterEntry>,
}

fn default_label(index: usize) -> String {
    format!("Cluster{}", index + 1)
}

pub fn area_report(counts: &[u64]) -> Result<ClusterStats> {
    if counts.is_empty() {
        return Err(Error::Shape("no cluster counts".into()));
    }
    let image_area = counts
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or(Error::Overflow)?;
    let background_area = counts[0];
    let foreground_area = image_area - background_area;
    if foreground_area == 0 {
        return Err(Error::Degenerate("every pixel is background".into()));
    }
    let clusters = counts
        .iter()
        .enumerate()
        .map(|(index, &count)| ClusterEntry {
            index,
            label: default_label(index),
            count,
            color: None,
            mean_color: None,
            pct_of_image: 100.0 * count as f64 / image_area as f64,
            pct_of_foreground: (index > 0).then(|| 100.0 * count as f64 / foreground_area as f64),
        })
        .collect();
    Ok(ClusterStats {
        image_area,
        background_area,
        foreground_area,
        clusters,
    })
}

impl ClusterStats {
    pub fn background_pct(&self) -> f64 {
        self.clusters[0].pct_of_image
    }

    pub fn foreground_pct(&self) -> f64 {
        100.0 * self.foreground_area as f64 / self.image_area as f64
    }

    /// Attach seed labels and legend colors.
    pub fn with_palette(mut self, palette: &SeedPalette) -> Result<Self> {
        if palette.len() != self.clusters.len() {
            return Err(Error::Shape(format!(
                "palette has {} seeds, stats have {} clusters",
                palette.len(),
                self.clusters.len()
            )));
        }
        for (entry, seed) in self.clusters.iter_mut().zip(palette.seeds()) {
            if !seed.label.is_empty() {
                entry.label = seed.label.clone();
            }
            entry.color = Some(seed.color);
        }
        Ok(self)
    }

    pub fn with_mean_colors(mut self, means: &[Option<RgbColor>]) -> Result<Self> {
        if means.len() != self.clusters.len() {
            return Err(Error::Shape(format!(
                "{} mean colors for {} clusters",
                means.len(),
                self.clusters.len()
            )));
        }
        for (entry, m) in self.clusters.iter_mut().zip(means) {
            entry.mean_color = *m;
        }
        Ok(self)
    }

    /// Plain-text area listing.
    ///
    /// ```text
    /// Total image area= 345119 pixels
    /// Background area= 156877 pixels or 45.46% image area (i.e Cluster1/null data)
    /// Total LULC area= 188242 pixels or 54.54% image area.
    /// Cluster2 area= 616 pixels or 0.33% image area
    /// ```
    pub fn format_report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Total image area= {} pixels", self.image_area);
        let _ = writeln!(
            out,
            "Background area= {} pixels or {:.2}% image area (i.e Cluster1/null data)",
            self.background_area,
            round_percent(self.background_pct())
        );
        let _ = writeln!(
            out,
            "Total LULC area= {} pixels or {:.2}% image area.",
            self.foreground_area,
            round_percent(self.foreground_pct())
        );
        for c in self.clusters.iter().skip(1) {
            let pct = c.pct_of_foreground.unwrap_or(c.pct_of_image);
            let _ = write!(
                out,
                "Cluster{} area= {} pixels or {:.2}% image area",
                c.number(),
                c.count,
                round_percent(pct)
            );
            if c.label != default_label(c.index) {
                let _ = write!(out, " ({})", c.label);
            }
            out.push('\n');
        }
        out
    }
}

/// One bar of the percent-area chart.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bar {
    pub label: String,
    pub percent: f64,
    pub color: Option<RgbColor>,
}

/// Bars in palette order: background as a share of the image, thematic
/// clusters as a share of the foreground.
pub fn bar_chart_series(stats: &ClusterStats) -> Vec<Bar> {
    stats
        .clusters
        .iter()
        .map(|c| Bar {
            label: c.label.clone(),
            percent: c.pct_of_foreground.unwrap_or(c.pct_of_image),
            color: c.color.or(c.mean_color),
        })
        .collect()
}
