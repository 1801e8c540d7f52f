//! Core algorithms for land-use / land-cover (LULC) visual data mining.
//!
//! Everything in this crate is a pure function over in-memory values and
//! builds without `std`; only `alloc` is required. File formats, the
//! session store, the HTTP API and the CLI live in `lulc-workbench`.
//!
//! The pipeline, in order:
//!
//! 1. [`classify`]: pick seed colors (seed 0 is background / null data) and
//!    label every pixel with its nearest seed, producing an [`IndexedImage`].
//! 2. [`kmeans`]: refine the thematic class means with Lloyd iterations
//!    minimizing the within-cluster sum of squares.
//! 3. [`raster`]: derive per-cluster logical masks and individual colormaps
//!    that all share the one label matrix.
//! 4. [`stats`]: count pixels per cluster and build the area report.
//! 5. [`featurespace`]: sample training pixels, histogram them in the RGB
//!    cube and extract isosurfaces, ellipsoids and overlap surfaces.

#![no_std]
#![warn(missing_debug_implementations)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod color;
pub mod error;
pub mod featurespace;
pub mod kmeans;
pub mod raster;
pub mod stats;

pub use classify::{classify_nearest, pick_seed, pick_seed_mean, Seed, SeedPalette};
pub use color::RgbColor;
pub use error::{Error, Result};
pub use featurespace::{
    density_grid, ellipsoid_mesh, isosurface, overlap_mesh, sample_training_pixels, AxisOrder,
    ClusterGaussian, DensityField, DensityGrid, IsoMesh,
};
pub use kmeans::{lloyd, wcss, FeaturePoint, KMeansResult, LloydConfig};
pub use raster::{
    individual_colormap, logical_mask, memory_footprint, render_indexed, BitMask, ColorMap,
    Footprint, IndexedImage, MaskingMethod, RgbImage,
};
pub use stats::{area_report, bar_chart_series, cluster_areas, Bar, ClusterEntry, ClusterStats};
