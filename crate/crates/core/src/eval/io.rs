//! Image and kernel files.
//!
//! Images are read as luminance normalized to `[0, 1]` and written as 8-bit
//! grayscale. Kernel files are plain text: the side `h` on the first line,
//! then `h` rows of `h` space-separated taps at 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, GrayImage, ImageEncoder, ImageFormat};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::kernel::BlurKernel;

pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let img = image::open(path.as_ref()).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::Io(io),
        other => Error::Image(other),
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(|v| v as f64 / 65535.0).collect(),
        other => other.to_luma8().into_raw().into_iter().map(|v| v as f64 / 255.0).collect(),
    };
    Image::new(w, h, data)
}

fn quantize(img: &Image) -> Vec<u8> {
    img.as_slice()
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect()
}

/// Writes an 8-bit grayscale PNG or binary PGM, chosen by extension.
pub fn write_image(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let path = path.as_ref();
    let bytes = quantize(img);
    let (w, h) = (img.width() as u32, img.height() as u32);
    match ImageFormat::from_path(path)? {
        ImageFormat::Pnm => {
            let file = fs::File::create(path)?;
            PnmEncoder::new(std::io::BufWriter::new(file))
                .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
                .write_image(&bytes, w, h, ExtendedColorType::L8)?;
        }
        ImageFormat::Png => {
            let buf = GrayImage::from_raw(w, h, bytes).expect("buffer matches dimensions");
            buf.save_with_format(path, ImageFormat::Png)?;
        }
        other => {
            return Err(Error::Format(format!(
                "unsupported image format {other:?}; use .png or .pgm"
            )))
        }
    }
    Ok(())
}

/// Writes `path` and a sibling with the other supported extension.
/// Returns both paths.
pub fn write_image_pair(path: impl AsRef<Path>, img: &Image) -> Result<(PathBuf, PathBuf)> {
    let path = path.as_ref();
    let other = match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
        Some(e) if e == "pgm" => path.with_extension("png"),
        _ => path.with_extension("pgm"),
    };
    write_image(path, img)?;
    write_image(&other, img)?;
    Ok((path.to_path_buf(), other))
}

pub fn format_kernel(k: &BlurKernel) -> String {
    let mut s = format!("{}\n", k.side());
    for row in k.taps().chunks(k.side()) {
        let cells: Vec<String> = row.iter().map(|t| format!("{t:.16e}")).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_kernel(text: &str) -> Result<BlurKernel> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let side: usize = lines
        .next()
        .ok_or_else(|| Error::Format("empty kernel file".into()))?
        .parse()
        .map_err(|e| Error::Format(format!("bad kernel side: {e}")))?;
    let mut taps = Vec::with_capacity(side * side);
    for (r, line) in lines.enumerate() {
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| Error::Format(format!("row {r}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != side {
            return Err(Error::Format(format!("row {r} has {} taps, expected {side}", row.len())));
        }
        taps.extend(row);
    }
    if taps.len() != side * side {
        return Err(Error::Format(format!("expected {side} rows, got {}", taps.len() / side.max(1))));
    }
    BlurKernel::new(side, taps).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_kernel(path: impl AsRef<Path>, k: &BlurKernel) -> Result<()> {
    fs::write(path, format_kernel(k))?;
    Ok(())
}

/// Reads a kernel file. PNG/PGM paths are accepted too and normalized to unit sum.
pub fn read_kernel(path: impl AsRef<Path>) -> Result<BlurKernel> {
    let path = path.as_ref();
    if ImageFormat::from_path(path).is_ok() {
        let img = read_image(path)?;
        if img.width() != img.height() {
            return Err(Error::Format("kernel image must be square".into()));
        }
        return BlurKernel::normalized(img.width(), img.into_vec());
    }
    parse_kernel(&fs::read_to_string(path)?)
}
