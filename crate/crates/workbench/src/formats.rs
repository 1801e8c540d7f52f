//! On-disk names and JSON / OBJ encodings.
//!
//! A run directory holds, for a k-seed palette:
//!
//! | file                               | count |
//! |------------------------------------|-------|
//! | `cluster_mask_{n}.png`             | k     |
//! | `individual_colormap_{n}.json`     | k     |
//! | `clustered.png` + `clustered_map.json` | 1 pair |
//! | `stats.json`                       | 1     |
//! | `mesh_{n}.json` (n ≥ 2)            | k − 1 |
//!
//! `n` is the 1-based cluster number; cluster 1 is background.

use std::fmt::Write;

use lulc_core::{ColorMap, IsoMesh, SeedPalette};

use crate::error::Result;

pub const CLUSTERED_PNG: &str = "clustered.png";
pub const CLUSTERED_MAP: &str = "clustered_map.json";
pub const STATS_JSON: &str = "stats.json";

pub fn mask_file(number: usize) -> String {
    format!("cluster_mask_{number}.png")
}

pub fn colormap_file(number: usize) -> String {
    format!("individual_colormap_{number}.json")
}

pub fn mesh_file(number: usize) -> String {
    format!("mesh_{number}.json")
}

/// `[{"label": ..., "rgb": [r, g, b]}, ...]`, background first.
pub fn parse_palette(bytes: &[u8]) -> Result<SeedPalette> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn palette_json(palette: &SeedPalette) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec_pretty(palette)?)
}

/// `[[r, g, b], ...]`
pub fn colormap_json(map: &ColorMap) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec(map)?)
}

pub fn parse_colormap(bytes: &[u8]) -> Result<ColorMap> {
    Ok(serde_json::from_slice(bytes)?)
}

/// `{"vertices": [[x,y,z]...], "triangles": [[i,j,k]...], "color": [r,g,b], "cluster": n}`
pub fn mesh_json(mesh: &IsoMesh) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec(mesh)?)
}

pub fn parse_mesh(bytes: &[u8]) -> Result<IsoMesh> {
    Ok(serde_json::from_slice(bytes)?)
}

/// Wavefront OBJ with positions and faces only.
pub fn mesh_obj(mesh: &IsoMesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 32 + mesh.triangles.len() * 24);
    let _ = writeln!(out, "# cluster {}", mesh.cluster);
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}
