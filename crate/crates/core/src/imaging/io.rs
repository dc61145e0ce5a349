//! PNG/PPM reading and 8-bit PNG writing.
//!
//! Images stay real-valued in memory and are quantized only on save
//! (round half up, then clamp). Masks are 8-bit grayscale PNGs with 0 for
//! missing and 255 for observed pixels.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageBuffer, Luma, Rgb};

use super::RgbImage;
use crate::error::{Error, Result};
use crate::mask::MaskMatrix;

fn codec_err(path: &Path) -> impl FnOnce(image::ImageError) -> Error + '_ {
    move |source| match source {
        image::ImageError::IoError(e) => Error::Io {
            path: path.to_path_buf(),
            source: e,
        },
        other => Error::Codec {
            path: path.to_path_buf(),
            source: other,
        },
    }
}

/// Round half up, then clamp to `0..=255`.
#[inline]
pub fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Interleaved 8-bit RGB bytes of an image.
pub fn to_rgb8_bytes(img: &RgbImage) -> Vec<u8> {
    let [r, g, b] = img.channels();
    r.iter()
        .zip(g)
        .zip(b)
        .flat_map(|((&r, &g), &b)| [quantize(r), quantize(g), quantize(b)])
        .collect()
}

pub fn from_rgb8_bytes(rows: usize, cols: usize, bytes: &[u8]) -> Result<RgbImage> {
    if bytes.len() != rows * cols * 3 {
        return Err(Error::InvalidImage(format!(
            "expected {} RGB bytes, got {}",
            rows * cols * 3,
            bytes.len()
        )));
    }
    RgbImage::from_fn(rows, cols, |i, j| {
        let k = 3 * (i * cols + j);
        [bytes[k] as f64, bytes[k + 1] as f64, bytes[k + 2] as f64]
    })
}

/// Reads a color image (PNG or binary PPM). Grayscale inputs are replicated
/// across channels and alpha is dropped.
pub fn read_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let img = image::ImageReader::open(path)
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?
        .with_guessed_format()
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?
        .decode()
        .map_err(codec_err(path))?;
    let rgb = img.to_rgb8();
    from_rgb8_bytes(rgb.height() as usize, rgb.width() as usize, rgb.as_raw())
}

pub fn write_png(path: impl AsRef<Path>, img: &RgbImage) -> Result<()> {
    let path = path.as_ref();
    let buf: ImageBuffer<Rgb<u8>, Vec<u8>> =
        ImageBuffer::from_raw(img.cols() as u32, img.rows() as u32, to_rgb8_bytes(img))
            .ok_or_else(|| Error::InvalidImage("buffer size mismatch".into()))?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(codec_err(path))
}

/// Single-channel image as row-major real values in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayPlane {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

/// Reads an 8- or 16-bit single-channel PNG. 8-bit values pass through;
/// 16-bit values are mapped linearly onto `[0, 255]`.
pub fn read_gray(path: impl AsRef<Path>) -> Result<GrayPlane> {
    let path = path.as_ref();
    let img = image::open(path).map_err(codec_err(path))?;
    let (cols, rows) = (img.width() as usize, img.height() as usize);
    let values = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(f64::from).collect(),
        DynamicImage::ImageLuma16(buf) => buf
            .into_raw()
            .into_iter()
            .map(|v| f64::from(v) * 255.0 / 65535.0)
            .collect(),
        other => {
            return Err(Error::InvalidImage(format!(
                "{}: expected a single-channel 8- or 16-bit image, found {:?}",
                path.display(),
                other.color()
            )))
        }
    };
    Ok(GrayPlane { rows, cols, values })
}

/// Writes real values as an 8-bit grayscale PNG.
pub fn write_gray(path: impl AsRef<Path>, rows: usize, cols: usize, values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = values.iter().map(|&v| quantize(v)).collect();
    let buf: GrayImage = ImageBuffer::from_raw(cols as u32, rows as u32, bytes)
        .ok_or_else(|| Error::InvalidImage("buffer size mismatch".into()))?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(codec_err(path))
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<MaskMatrix> {
    let path = path.as_ref();
    let img = image::open(path).map_err(codec_err(path))?.to_luma8();
    let (cols, rows) = (img.width() as usize, img.height() as usize);
    let observed = img
        .pixels()
        .map(|Luma([v])| match v {
            0 => Ok(false),
            255 => Ok(true),
            other => Err(Error::InvalidImage(format!(
                "{}: mask pixels must be 0 or 255, found {other}",
                path.display()
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    MaskMatrix::from_bools(rows, cols, observed)
}

pub fn write_mask(path: impl AsRef<Path>, mask: &MaskMatrix) -> Result<()> {
    let values: Vec<f64> = mask
        .as_slice()
        .iter()
        .map(|&o| if o { 255.0 } else { 0.0 })
        .collect();
    write_gray(path, mask.rows(), mask.cols(), &values)
}
