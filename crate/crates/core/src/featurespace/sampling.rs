use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::AxisOrder;
use crate::error::{Error, Result};
use crate::kmeans::FeaturePoint;
use crate::raster::{IndexedImage, RgbImage};

/// Training pixels drawn per cluster.
pub const DEFAULT_SAMPLE_SIZE: usize = 160;

fn check_pair(img: &RgbImage, idx: &IndexedImage, k: usize) -> Result<()> {
    if img.width() != idx.width() || img.height() != idx.height() {
        return Err(Error::Shape(format!(
            "image is {}x{} but labels are {}x{}",
            img.width(),
            img.height(),
            idx.width(),
            idx.height()
        )));
    }
    if k >= idx.cluster_count() {
        return Err(Error::Index {
            index: k,
            len: idx.cluster_count(),
        });
    }
    Ok(())
}

/// Every member pixel of cluster `k`, in raster order.
pub fn cluster_points(img: &RgbImage, idx: &IndexedImage, k: usize, axes: AxisOrder) -> Result<Vec<FeaturePoint>> {
    check_pair(img, idx, k)?;
    Ok(img
        .pixels()
        .iter()
        .zip(idx.labels())
        .filter(|(_, &l)| usize::from(l) == k)
        .map(|(p, _)| axes.apply(p))
        .collect())
}

/// Uniform sample without replacement of `min(n, |cluster k|)` member
/// pixels, returned in raster order. Reproducible for a given `seed`.
pub fn sample_training_pixels(
    img: &RgbImage,
    idx: &IndexedImage,
    k: usize,
    n: usize,
    seed: u64,
) -> Result<Vec<FeaturePoint>> {
    check_pair(img, idx, k)?;
    let members: Vec<usize> = idx
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &l)| usize::from(l) == k)
        .map(|(p, _)| p)
        .collect();
    if members.is_empty() {
        return Err(Error::EmptySample(k));
    }
    let take = n.min(members.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = rand::seq::index::sample(&mut rng, members.len(), take).into_vec();
    chosen.sort_unstable();
    Ok(chosen
        .into_iter()
        .map(|i| FeaturePoint::from(img.pixels()[members[i]]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_nearest, Seed, SeedPalette};
    use crate::color::RgbColor;
    use crate::raster::ColorMap;
    use alloc::vec;
    use rand::Rng;

    fn two_class(width: usize, height: usize, members: usize) -> (RgbImage, IndexedImage) {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = width * height;
        let labels: Vec<u8> = (0..n).map(|p| u8::from(p < members)).collect();
        let pixels = labels
            .iter()
            .map(|&l| {
                let base = if l == 1 { 0.8 } else { 0.1 };
                RgbColor::new(base, rng.random_range(0.0..0.1), rng.random_range(0.0..0.1))
            })
            .collect();
        let map = ColorMap::new(vec![RgbColor::BLACK, RgbColor::new(0.8, 0.0, 0.0)]).unwrap();
        (
            RgbImage::new(width, height, pixels).unwrap(),
            IndexedImage::new(width, height, labels, map).unwrap(),
        )
    }

    #[test]
    fn small_cluster_is_exhausted() {
        let (img, idx) = two_class(20, 20, 100);
        let s = sample_training_pixels(&img, &idx, 1, DEFAULT_SAMPLE_SIZE, 5).unwrap();
        assert_eq!(s.len(), 100);
        let all = cluster_points(&img, &idx, 1, AxisOrder::RGB).unwrap();
        assert_eq!(s, all);
    }

    #[test]
    fn large_cluster_gives_exactly_n_members() {
        let (img, idx) = two_class(100, 100, 10_000 - 37);
        let s = sample_training_pixels(&img, &idx, 1, 160, 5).unwrap();
        assert_eq!(s.len(), 160);
        let members = cluster_points(&img, &idx, 1, AxisOrder::RGB).unwrap();
        assert!(s.iter().all(|p| members.contains(p)));
        // without replacement: colors are continuous, so duplicates would
        // mean the same pixel twice
        for (i, p) in s.iter().enumerate() {
            assert!(!s[..i].contains(p));
        }
    }

    #[test]
    fn seed_reproducibility() {
        let (img, idx) = two_class(100, 100, 10_000);
        let a = sample_training_pixels(&img, &idx, 1, 160, 42).unwrap();
        let b = sample_training_pixels(&img, &idx, 1, 160, 42).unwrap();
        let c = sample_training_pixels(&img, &idx, 1, 160, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn errors() {
        let (img, idx) = two_class(4, 4, 16);
        assert_eq!(sample_training_pixels(&img, &idx, 0, 160, 0), Err(Error::EmptySample(0)));
        assert!(matches!(
            sample_training_pixels(&img, &idx, 2, 160, 0),
            Err(Error::Index { .. })
        ));
        let other = RgbImage::filled(2, 2, RgbColor::BLACK).unwrap();
        assert!(matches!(
            sample_training_pixels(&other, &idx, 1, 160, 0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn samples_reclassify_to_their_cluster() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pixels: Vec<RgbColor> = (0..64 * 64)
            .map(|_| RgbColor::new(rng.random(), rng.random(), rng.random()))
            .collect();
        let img = RgbImage::new(64, 64, pixels).unwrap();
        let palette = SeedPalette::new(vec![
            Seed::new("bg", RgbColor::BLACK),
            Seed::new("a", RgbColor::new(1.0, 0.2, 0.2)),
            Seed::new("b", RgbColor::new(0.2, 1.0, 0.2)),
            Seed::new("c", RgbColor::new(0.3, 0.3, 1.0)),
        ])
        .unwrap();
        let idx = classify_nearest(&img, &palette).unwrap();
        for k in 1..4 {
            let s = sample_training_pixels(&img, &idx, k, 160, 9).unwrap();
            let back = RgbImage::new(s.len(), 1, s.iter().map(|p| RgbColor::from_array(p.0)).collect()).unwrap();
            let re = classify_nearest(&back, &palette).unwrap();
            assert!(re.labels().iter().all(|&l| usize::from(l) == k));
        }
    }
}
