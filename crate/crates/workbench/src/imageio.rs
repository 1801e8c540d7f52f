//! Raster decoding and PNG encoding.

use std::io::Cursor;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};
use lulc_core::{BitMask, ColorMap, IndexedImage, RgbImage};

use crate::error::{Result, WorkbenchError};

/// Decode PNG or JPEG bytes. Alpha is dropped and 16-bit samples are
/// reduced to 8 bits before normalizing.
pub fn load_image(bytes: &[u8]) -> Result<RgbImage> {
    let decoded = image::load_from_memory(bytes).map_err(|e| WorkbenchError::Decode(e.to_string()))?;
    let rgb = decoded.to_rgb8();
    let (w, h) = rgb.dimensions();
    if w == 0 || h == 0 {
        return Err(WorkbenchError::EmptyImage);
    }
    Ok(RgbImage::from_rgb8(w as usize, h as usize, rgb.as_raw())?)
}

pub fn load_image_path(path: &Path) -> Result<RgbImage> {
    load_image(&std::fs::read(path)?)
}

/// Short format name for stored uploads.
pub fn sniff_format(bytes: &[u8]) -> Option<&'static str> {
    match image::guess_format(bytes).ok()? {
        image::ImageFormat::Png => Some("png"),
        image::ImageFormat::Jpeg => Some("jpg"),
        _ => None,
    }
}

fn encode_png(width: usize, height: usize, data: &[u8], color: ExtendedColorType) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    PngEncoder::new(&mut out)
        .write_image(data, width as u32, height as u32, color)
        .map_err(|e| WorkbenchError::Encode(e.to_string()))?;
    Ok(out.into_inner())
}

/// 24-bit PNG.
pub fn encode_rgb_png(img: &RgbImage) -> Result<Vec<u8>> {
    encode_png(img.width(), img.height(), &img.to_rgb8(), ExtendedColorType::Rgb8)
}

/// 8-bit grayscale PNG, members 255 and everything else 0.
pub fn encode_mask_png(mask: &BitMask) -> Result<Vec<u8>> {
    let data: Vec<u8> = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    encode_png(mask.width(), mask.height(), &data, ExtendedColorType::L8)
}

/// 8-bit single-channel PNG holding raw label values.
pub fn encode_label_png(img: &IndexedImage) -> Result<Vec<u8>> {
    encode_png(img.width(), img.height(), img.labels(), ExtendedColorType::L8)
}

pub fn decode_label_png(bytes: &[u8], colormap: ColorMap) -> Result<IndexedImage> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| WorkbenchError::Decode(e.to_string()))?;
    let image::DynamicImage::ImageLuma8(gray) = decoded else {
        return Err(WorkbenchError::Decode("label raster must be 8-bit single-channel".into()));
    };
    let (w, h) = gray.dimensions();
    Ok(IndexedImage::new(w as usize, h as usize, gray.into_raw(), colormap)?)
}

pub fn decode_mask_png(bytes: &[u8]) -> Result<BitMask> {
    let gray = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| WorkbenchError::Decode(e.to_string()))?
        .to_luma8();
    let (w, h) = gray.dimensions();
    Ok(BitMask::new(w as usize, h as usize, gray.pixels().map(|p| p.0[0] >= 128).collect())?)
}
