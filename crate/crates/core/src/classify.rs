//! Seed picking and minimum-distance classification.
//!
//! Pixels are labeled with the nearest seed color in RGB (squared Euclidean
//! distance, ties to the lowest index). Seed 0 is the background / null data
//! class.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::color::RgbColor;
use crate::error::{Error, Result};
use crate::raster::{ColorMap, IndexedImage, RgbImage};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Seed {
    pub label: String,
    #[cfg_attr(feature = "serde", serde(rename = "rgb"))]
    pub color: RgbColor,
}

impl Seed {
    pub fn new(label: impl Into<String>, color: RgbColor) -> Self {
        Seed {
            label: label.into(),
            color,
        }
    }
}

/// Ordered user-picked class colors. Index 0 is background.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct SeedPalette {
    seeds: Vec<Seed>,
}

impl SeedPalette {
    pub fn new(seeds: Vec<Seed>) -> Result<Self> {
        if seeds.len() < 2 {
            return Err(Error::Palette(format!(
                "need a background seed plus at least one class, got {} seed(s)",
                seeds.len()
            )));
        }
        if seeds.len() > IndexedImage::MAX_CLUSTERS {
            return Err(Error::Palette(format!("at most 256 seeds, got {}", seeds.len())));
        }
        for (i, s) in seeds.iter().enumerate() {
            if !s.color.is_valid() {
                return Err(Error::Palette(format!("seed {i} color outside [0, 1]")));
            }
            if let Some(j) = seeds[..i].iter().position(|t| t.color == s.color) {
                return Err(Error::Palette(format!("seeds {j} and {i} share color {}", s.color)));
            }
        }
        Ok(SeedPalette { seeds })
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn background(&self) -> &Seed {
        &self.seeds[0]
    }

    pub fn colors(&self) -> Vec<RgbColor> {
        self.seeds.iter().map(|s| s.color).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.seeds.iter().map(|s| s.label.clone()).collect()
    }

    pub fn colormap(&self) -> ColorMap {
        ColorMap::new(self.colors()).expect("palette colors are validated")
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for SeedPalette {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let seeds = Vec::<Seed>::deserialize(d)?;
        SeedPalette::new(seeds).map_err(serde::de::Error::custom)
    }
}

pub fn pick_seed(img: &RgbImage, x: usize, y: usize) -> Result<RgbColor> {
    img.get(x, y).ok_or(Error::Bounds {
        x,
        y,
        width: img.width(),
        height: img.height(),
    })
}

/// Mean of the 3×3 neighborhood around `(x, y)`, clipped at the image edge.
pub fn pick_seed_mean(img: &RgbImage, x: usize, y: usize) -> Result<RgbColor> {
    pick_seed(img, x, y)?;
    let (mut r, mut g, mut b, mut n) = (0.0, 0.0, 0.0, 0.0);
    for yy in y.saturating_sub(1)..=(y + 1).min(img.height() - 1) {
        for xx in x.saturating_sub(1)..=(x + 1).min(img.width() - 1) {
            let p = img.pixels()[yy * img.width() + xx];
            r += p.r;
            g += p.g;
            b += p.b;
            n += 1.0;
        }
    }
    Ok(RgbColor::new(r / n, g / n, b / n))
}

/// Index of the closest color; ties go to the lowest index.
pub fn nearest_index(color: &RgbColor, candidates: &[RgbColor]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in candidates.iter().enumerate() {
        let d = color.distance_sq(c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

pub fn classify_nearest(img: &RgbImage, palette: &SeedPalette) -> Result<IndexedImage> {
    let colors = palette.colors();
    let labels = img
        .pixels()
        .iter()
        .map(|p| nearest_index(p, &colors) as u8)
        .collect();
    IndexedImage::new(img.width(), img.height(), labels, palette.colormap())
}
