//! Raster and indexed-image data model.
//!
//! An [`IndexedImage`] is one shared label matrix plus a colormap. Viewing a
//! single cluster never copies the label matrix: it swaps in an individual
//! colormap where every other entry is muted (see [`individual_colormap`]).
//! [`memory_footprint`] quantifies what that buys over keeping one label
//! matrix per cluster.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::color::RgbColor;
use crate::error::{Error, Result};

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Dimension { width, height });
    }
    let expected = width
        .checked_mul(height)
        .ok_or(Error::Dimension { width, height })?;
    if expected != len {
        return Err(Error::Shape(format!(
            "{width}x{height} raster needs {expected} pixels, got {len}"
        )));
    }
    Ok(())
}

/// Row-major RGB raster with normalized channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<RgbColor>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<RgbColor>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        if let Some(bad) = pixels.iter().position(|p| !p.is_valid()) {
            return Err(Error::Domain(format!("pixel {bad} has a channel outside [0, 1]")));
        }
        Ok(RgbImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, color: RgbColor) -> Result<Self> {
        let len = width
            .checked_mul(height)
            .ok_or(Error::Dimension { width, height })?;
        RgbImage::new(width, height, vec![color; len])
    }

    /// Build from interleaved 8-bit RGB samples.
    pub fn from_rgb8(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        if !data.len().is_multiple_of(3) {
            return Err(Error::Shape(format!("{} bytes is not a whole number of RGB triples", data.len())));
        }
        let pixels = data
            .chunks_exact(3)
            .map(|c| RgbColor::from_u8([c[0], c[1], c[2]]))
            .collect();
        RgbImage::new(width, height, pixels)
    }

    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.to_u8()).collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[RgbColor] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Option<RgbColor> {
        (x < self.width && y < self.height).then(|| self.pixels[y * self.width + x])
    }
}

/// Ordered list of display colors, one per label.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ColorMap {
    entries: Vec<RgbColor>,
}

impl ColorMap {
    pub fn new(entries: Vec<RgbColor>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape("colormap needs at least one entry".into()));
        }
        if let Some(bad) = entries.iter().position(|c| !c.is_valid()) {
            return Err(Error::Domain(format!("colormap entry {bad} outside [0, 1]")));
        }
        Ok(ColorMap { entries })
    }

    pub fn entries(&self) -> &[RgbColor] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<RgbColor> {
        self.entries.get(index).copied()
    }
}

/// Shared label matrix plus its k-entry colormap. Label 0 is background.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedImage {
    width: usize,
    height: usize,
    labels: Vec<u8>,
    colormap: ColorMap,
}

impl IndexedImage {
    /// Largest number of clusters an 8-bit label raster can hold.
    pub const MAX_CLUSTERS: usize = 256;

    pub fn new(width: usize, height: usize, labels: Vec<u8>, colormap: ColorMap) -> Result<Self> {
        check_dims(width, height, labels.len())?;
        let k = colormap.len();
        if !(2..=Self::MAX_CLUSTERS).contains(&k) {
            return Err(Error::Shape(format!(
                "indexed image needs 2..=256 colormap entries, got {k}"
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| usize::from(l) >= k) {
            return Err(Error::Index {
                index: usize::from(bad),
                len: k,
            });
        }
        Ok(IndexedImage {
            width,
            height,
            labels,
            colormap,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn colormap(&self) -> &ColorMap {
        &self.colormap
    }

    /// Number of clusters, background included.
    pub fn cluster_count(&self) -> usize {
        self.colormap.len()
    }

    pub fn label_at(&self, x: usize, y: usize) -> Option<u8> {
        (x < self.width && y < self.height).then(|| self.labels[y * self.width + x])
    }
}

/// Row-major boolean raster marking one cluster's pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BitMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height, bits.len())?;
        Ok(BitMask {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Paint every pixel with its label's colormap entry.
pub fn render_indexed(img: &IndexedImage, map: &ColorMap) -> Result<RgbImage> {
    let needed = img.labels.iter().copied().max().map_or(0, usize::from) + 1;
    if map.len() < needed {
        return Err(Error::Index {
            index: needed - 1,
            len: map.len(),
        });
    }
    let pixels = img
        .labels
        .iter()
        .map(|&l| map.entries[usize::from(l)])
        .collect();
    Ok(RgbImage {
        width: img.width,
        height: img.height,
        pixels,
    })
}

/// Copy of `shared` where only entry `k` keeps its color and every other
/// entry shows `mute`.
pub fn individual_colormap(shared: &ColorMap, k: usize, mute: RgbColor) -> Result<ColorMap> {
    if k >= shared.len() {
        return Err(Error::Index {
            index: k,
            len: shared.len(),
        });
    }
    if !mute.is_valid() {
        return Err(Error::Domain("mute color outside [0, 1]".into()));
    }
    let entries = shared
        .entries
        .iter()
        .enumerate()
        .map(|(i, &c)| if i == k { c } else { mute })
        .collect();
    Ok(ColorMap { entries })
}

pub fn logical_mask(img: &IndexedImage, k: usize) -> Result<BitMask> {
    if k >= img.cluster_count() {
        return Err(Error::Index {
            index: k,
            len: img.cluster_count(),
        });
    }
    let bits = img.labels.iter().map(|&l| usize::from(l) == k).collect();
    Ok(BitMask {
        width: img.width,
        height: img.height,
        bits,
    })
}

/// How per-cluster views are materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskingMethod {
    /// One indexed image per cluster, all sharing one colormap.
    PerClusterImages,
    /// One shared indexed image with one individual colormap per cluster.
    PerClusterColormaps,
}

impl MaskingMethod {
    /// Methods are numbered 1 and 2 in reports.
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(MaskingMethod::PerClusterImages),
            2 => Some(MaskingMethod::PerClusterColormaps),
            _ => None,
        }
    }
}

/// Element counts needed to hold all per-cluster views.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Footprint {
    pub index_elements: u64,
    pub colormap_elements: u64,
    pub total: u64,
}

impl Footprint {
    /// How many times larger `self` is than `other`.
    pub fn ratio_to(&self, other: &Footprint) -> f64 {
        self.total as f64 / other.total as f64
    }
}

pub fn memory_footprint(
    width: u64,
    height: u64,
    k: u64,
    method: MaskingMethod,
) -> Result<Footprint> {
    if width == 0 || height == 0 || k == 0 {
        return Err(Error::Domain("width, height and k must be at least 1".into()));
    }
    let area = width.checked_mul(height).ok_or(Error::Overflow)?;
    let one_map = k.checked_mul(3).ok_or(Error::Overflow)?;
    let (index_elements, colormap_elements) = match method {
        MaskingMethod::PerClusterImages => (area.checked_mul(k).ok_or(Error::Overflow)?, one_map),
        MaskingMethod::PerClusterColormaps => (area, one_map.checked_mul(k).ok_or(Error::Overflow)?),
    };
    let total = index_elements
        .checked_add(colormap_elements)
        .ok_or(Error::Overflow)?;
    Ok(Footprint {
        index_elements,
        colormap_elements,
        total,
    })
}
