#![allow(dead_code)]

use lulc_core::{RgbColor, RgbImage, Seed, SeedPalette};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Black null data plus the six thematic colors of the Latur legend.
pub fn legend_palette() -> SeedPalette {
    let seeds = [
        ("null data", [0.0, 0.0, 0.0]),
        ("constructed", [1.0, 0.24706, 0.26275]),
        ("vegetation", [0.60784, 0.81176, 0.1451]),
        ("ground water", [0.42353, 0.59216, 0.96471]),
        ("agriculture", [1.0, 1.0, 0.5098]),
        ("rocky/barren", [0.94118, 0.90196, 0.79608]),
        ("scrub", [0.80784, 0.69412, 0.52941]),
    ];
    SeedPalette::new(
        seeds
            .iter()
            .map(|&(label, c)| Seed::new(label, RgbColor::from_array(c)))
            .collect(),
    )
    .unwrap()
}

pub fn min_seed_distance(palette: &SeedPalette) -> f64 {
    let c = palette.colors();
    let mut best = f64::INFINITY;
    for i in 0..c.len() {
        for j in 0..i {
            best = best.min(c[i].distance_sq(&c[j]).sqrt());
        }
    }
    best
}

/// Blocky label map painted from `palette` with every pixel displaced by
/// less than `noise` (Euclidean), then clamped to the unit cube.
pub fn painted(width: usize, height: usize, palette: &SeedPalette, noise: f64, seed: u64) -> (RgbImage, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = palette.len();
    let block = 8;
    let bw = width.div_ceil(block);
    let bh = height.div_ceil(block);
    let blocks: Vec<u8> = (0..bw * bh).map(|_| rng.random_range(0..k) as u8).collect();
    let labels: Vec<u8> = (0..width * height)
        .map(|p| blocks[(p / width / block) * bw + (p % width) / block])
        .collect();
    let colors = palette.colors();
    let pixels = labels
        .iter()
        .map(|&l| {
            let c = colors[usize::from(l)];
            let dir = loop {
                let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n > 1e-9 && n <= 1.0 {
                    break v.map(|x| x / n);
                }
            };
            let r = noise * rng.random::<f64>();
            RgbColor::new(
                (c.r + r * dir[0]).clamp(0.0, 1.0),
                (c.g + r * dir[1]).clamp(0.0, 1.0),
                (c.b + r * dir[2]).clamp(0.0, 1.0),
            )
        })
        .collect();
    (RgbImage::new(width, height, pixels).unwrap(), labels)
}

/// Painted image quantized to 8 bits and encoded as PNG, with the palette
/// moved onto the same 8-bit grid.
pub fn painted_png(width: usize, height: usize, seed: u64) -> (Vec<u8>, SeedPalette, Vec<u8>) {
    let palette = legend_palette();
    let quantized = SeedPalette::new(
        palette
            .seeds()
            .iter()
            .map(|s| Seed::new(s.label.clone(), RgbColor::from_u8(s.color.to_u8())))
            .collect(),
    )
    .unwrap();
    let (img, labels) = painted(width, height, &quantized, 0.05, seed);
    (lulc_workbench::imageio::encode_rgb_png(&img).unwrap(), quantized, labels)
}
