//! Dataset scanning, decoding, resizing, and sampling.

use std::fmt;
use std::path::{Path, PathBuf};

use image::imageops::FilterType;
use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("no PNG or JPEG images found in {0}")]
    DatasetEmpty(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot decode {path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("cannot encode {path}: {source}")]
    Encode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("shortest side must be at least 1")]
    InvalidShortestSide,
    #[error("sample count must be at least 1")]
    InvalidSampleCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Synthetic,
    Real,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Synthetic => "synthetic",
            Domain::Real => "real",
        })
    }
}

/// An immutable, sorted listing of the images in one directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetHandle {
    root: PathBuf,
    files: Vec<PathBuf>,
    domain: Domain,
}

impl DatasetHandle {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

fn is_image_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
        .unwrap_or(false)
}

/// Lists the PNG/JPEG files directly inside `dir`, sorted lexicographically.
pub fn scan_dataset(dir: impl AsRef<Path>, domain: Domain) -> Result<DatasetHandle, DatasetError> {
    let dir = dir.as_ref();
    let io_err = |source| DatasetError::Io { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    let mut skipped = 0usize;
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if !path.is_file() {
            continue;
        }
        if is_image_path(&path) {
            files.push(path);
        } else {
            skipped += 1;
        }
    }
    if skipped > 0 {
        log::info!("{domain} dataset {}: skipped {skipped} non-image files", dir.display());
    }
    if files.is_empty() {
        return Err(DatasetError::DatasetEmpty(dir.to_path_buf()));
    }
    files.sort();
    Ok(DatasetHandle { root: dir.to_path_buf(), files, domain })
}

/// Target dimensions so that the shorter side equals `shortest_side`.
pub fn resized_dims(width: u32, height: u32, shortest_side: u32) -> (u32, u32) {
    let short = width.min(height) as f64;
    let scale = shortest_side as f64 / short;
    let scaled = |v: u32| ((v as f64 * scale).round() as u32).max(1);
    if width <= height {
        (shortest_side, scaled(height))
    } else {
        (scaled(width), shortest_side)
    }
}

/// Bilinear resize so `min(width, height) == shortest_side`. Already conforming
/// images are returned untouched.
pub fn resize_shortest_side(img: &Image, shortest_side: u32) -> Result<Image, DatasetError> {
    if shortest_side == 0 {
        return Err(DatasetError::InvalidShortestSide);
    }
    let (w, h) = resized_dims(img.width(), img.height(), shortest_side);
    Ok(resize_exact(img, w, h))
}

pub(crate) fn resize_exact(img: &Image, width: u32, height: u32) -> Image {
    if img.width() == width && img.height() == height {
        return img.clone();
    }
    let buf = image::RgbImage::from_raw(img.width(), img.height(), img.data().to_vec())
        .expect("Image invariants guarantee a valid buffer");
    let out = image::imageops::resize(&buf, width, height, FilterType::Triangle);
    Image::from_raw(width, height, out.into_raw()).expect("resize yields requested dimensions")
}

/// Decodes any PNG/JPEG (gray or RGB, alpha dropped) into an RGB image.
pub fn decode(path: impl AsRef<Path>) -> Result<Image, DatasetError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| DatasetError::Io { path: path.into(), source })?;
    let dynamic = image::load_from_memory(&bytes)
        .map_err(|source| DatasetError::Decode { path: path.into(), source })?;
    let rgb = dynamic.to_rgb8();
    let (w, h) = rgb.dimensions();
    Image::from_raw(w, h, rgb.into_raw()).map_err(|e| DatasetError::Decode {
        path: path.into(),
        source: image::ImageError::Parameter(image::error::ParameterError::from_kind(
            image::error::ParameterErrorKind::Generic(e.to_string()),
        )),
    })
}

pub fn decode_and_resize(path: impl AsRef<Path>, shortest_side: u32) -> Result<Image, DatasetError> {
    if shortest_side == 0 {
        return Err(DatasetError::InvalidShortestSide);
    }
    let img = decode(path)?;
    resize_shortest_side(&img, shortest_side)
}

/// Writes `img` as PNG.
pub fn save_png(img: &Image, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    image::save_buffer_with_format(
        path,
        img.data(),
        img.width(),
        img.height(),
        image::ExtendedColorType::Rgb8,
        image::ImageFormat::Png,
    )
    .map_err(|source| match source {
        image::ImageError::IoError(source) => DatasetError::Io { path: path.into(), source },
        source => DatasetError::Encode { path: path.into(), source },
    })
}

/// Indices of `n` draws: without replacement when `n <= len`, otherwise with.
pub fn sample_indices<R: Rng + ?Sized>(len: usize, n: usize, rng: &mut R) -> Vec<usize> {
    if n <= len {
        index::sample(rng, len, n).into_vec()
    } else {
        (0..n).map(|_| rng.random_range(0..len)).collect()
    }
}

/// Draws `n` images from the handle and decodes them at `shortest_side`.
pub fn sample<R: Rng + ?Sized>(
    handle: &DatasetHandle,
    n: usize,
    shortest_side: u32,
    rng: &mut R,
) -> Result<Vec<Image>, DatasetError> {
    if n == 0 {
        return Err(DatasetError::InvalidSampleCount);
    }
    sample_indices(handle.len(), n, rng)
        .into_iter()
        .map(|i| decode_and_resize(&handle.files[i], shortest_side))
        .collect()
}

/// Decoded images of a dataset, loaded eagerly when small enough and decoded
/// on demand otherwise.
#[derive(Debug)]
pub struct ImageSource {
    handle: DatasetHandle,
    shortest_side: u32,
    preloaded: Option<Vec<Image>>,
}

impl ImageSource {
    pub fn new(handle: DatasetHandle, shortest_side: u32, preload_limit: usize) -> Result<Self, DatasetError> {
        if shortest_side == 0 {
            return Err(DatasetError::InvalidShortestSide);
        }
        let preloaded = if handle.len() <= preload_limit {
            use rayon::prelude::*;
            let images = handle
                .files
                .par_iter()
                .map(|p| decode_and_resize(p, shortest_side))
                .collect::<Result<Vec<_>, _>>()?;
            Some(images)
        } else {
            None
        };
        Ok(Self { handle, shortest_side, preloaded })
    }

    pub fn handle(&self) -> &DatasetHandle {
        &self.handle
    }

    pub fn shortest_side(&self) -> u32 {
        self.shortest_side
    }

    pub fn len(&self) -> usize {
        self.handle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.handle.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<Image, DatasetError> {
        match &self.preloaded {
            Some(images) => Ok(images[index].clone()),
            None => decode_and_resize(&self.handle.files[index], self.shortest_side),
        }
    }

    pub fn load(&self, indices: &[usize]) -> Result<Vec<Image>, DatasetError> {
        indices.iter().map(|&i| self.get(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn write_png(dir: &Path, name: &str, w: u32, h: u32) {
        let img = Image::from_fn(w, h, |x, y| [(x * 7) as u8, (y * 5) as u8, ((x + y) * 3) as u8]).unwrap();
        save_png(&img, dir.join(name)).unwrap();
    }

    #[test]
    fn scan_sorts_and_filters() {
        let dir = tempfile::tempdir().unwrap();
        write_png(dir.path(), "b.png", 4, 4);
        image::RgbImage::new(4, 4).save(dir.path().join("a.jpg")).unwrap();
        write_png(dir.path(), "C.PNG", 4, 4);
        std::fs::write(dir.path().join("notes.txt"), "hi").unwrap();
        let h = scan_dataset(dir.path(), Domain::Real).unwrap();
        let names: Vec<_> = h.files().iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
        assert_eq!(names, ["C.PNG", "a.jpg", "b.png"]);
        assert_eq!(h.domain(), Domain::Real);
    }

    #[test]
    fn scan_empty_and_missing() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("notes.txt"), "hi").unwrap();
        assert!(matches!(scan_dataset(dir.path(), Domain::Synthetic), Err(DatasetError::DatasetEmpty(_))));
        assert!(matches!(
            scan_dataset(dir.path().join("nope"), Domain::Synthetic),
            Err(DatasetError::Io { .. })
        ));
    }

    #[test]
    fn resize_dimensions() {
        assert_eq!(resized_dims(1200, 600, 600), (1200, 600));
        assert_eq!(resized_dims(2048, 1024, 512), (1024, 512));
        assert_eq!(resized_dims(100, 300, 50), (50, 150));
        assert_eq!(resized_dims(1000, 1, 1), (1000, 1));
        assert_eq!(resized_dims(3, 1000, 1), (1, 333));
    }

    #[test]
    fn resize_is_idempotent_on_conforming_images() {
        let img = Image::from_fn(30, 20, |x, y| [x as u8, y as u8, 9]).unwrap();
        let same = resize_shortest_side(&img, 20).unwrap();
        assert_eq!(same, img);
        let small = resize_shortest_side(&img, 10).unwrap();
        assert_eq!((small.width(), small.height()), (15, 10));
        assert_eq!(resize_shortest_side(&small, 10).unwrap(), small);
    }

    #[test]
    fn decode_grayscale_replicates_channels_and_corrupt_fails() {
        let dir = tempfile::tempdir().unwrap();
        let gray = image::GrayImage::from_fn(6, 3, |x, _| image::Luma([x as u8 * 10]));
        gray.save(dir.path().join("g.png")).unwrap();
        let img = decode_and_resize(dir.path().join("g.png"), 3).unwrap();
        assert_eq!(img.pixel(2, 1), [20, 20, 20]);
        std::fs::write(dir.path().join("bad.png"), b"not a png").unwrap();
        assert!(matches!(decode(dir.path().join("bad.png")), Err(DatasetError::Decode { .. })));
    }

    #[test]
    fn sampling_modes() {
        let mut r = rng::seeded(3);
        let mut all = sample_indices(5, 5, &mut r);
        all.sort();
        assert_eq!(all, [0, 1, 2, 3, 4]);
        let over = sample_indices(3, 6, &mut r);
        assert_eq!(over.len(), 6);
        assert!(over.iter().all(|&i| i < 3));
        assert_eq!(sample_indices(10, 4, &mut rng::seeded(9)), sample_indices(10, 4, &mut rng::seeded(9)));
    }

    #[test]
    fn sample_decodes_deterministically() {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..4 {
            write_png(dir.path(), &format!("{i}.png"), 8 + i, 8);
        }
        let h = scan_dataset(dir.path(), Domain::Synthetic).unwrap();
        let a = sample(&h, 6, 4, &mut rng::seeded(1)).unwrap();
        let b = sample(&h, 6, 4, &mut rng::seeded(1)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|img| img.height() == 4));
        assert!(matches!(sample(&h, 0, 4, &mut rng::seeded(1)), Err(DatasetError::InvalidSampleCount)));

        let lazy = ImageSource::new(h.clone(), 4, 0).unwrap();
        let eager = ImageSource::new(h, 4, 100).unwrap();
        assert_eq!(lazy.load(&[3, 1]).unwrap(), eager.load(&[3, 1]).unwrap());
    }
}
