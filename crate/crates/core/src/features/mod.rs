//! Image-to-feature extraction and the cached real-domain features.

mod builtin;
mod matrix;
#[cfg(feature = "onnx")]
mod onnx;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matrix::{FeatureMatrix, MatrixError};

use crate::dataset::{sample_indices, DatasetError, ImageSource};
use crate::image::Image;
use crate::rng;

pub const BUILTIN_DIM: usize = builtin::DIM;
pub const IMAGENET_MEAN: [f32; 3] = [0.485, 0.456, 0.406];
pub const IMAGENET_STD: [f32; 3] = [0.229, 0.224, 0.225];

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("cannot load model: {0}")]
    ModelLoad(String),
    #[error("unsupported model shape: {0}")]
    ModelShape(String),
    #[error("feature extraction failed: {0}")]
    Extract(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

fn default_side() -> u32 {
    224
}

fn default_mean() -> [f32; 3] {
    IMAGENET_MEAN
}

fn default_std() -> [f32; 3] {
    IMAGENET_STD
}

/// Which extractor to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExtractorSpec {
    BuiltinStats,
    ExternalModel {
        model_path: PathBuf,
        #[serde(default = "default_side")]
        input_side: u32,
        #[serde(default = "default_mean")]
        mean: [f32; 3],
        #[serde(default = "default_std")]
        std: [f32; 3],
    },
}

impl Default for ExtractorSpec {
    fn default() -> Self {
        ExtractorSpec::BuiltinStats
    }
}

#[derive(Debug)]
enum Backend {
    BuiltinStats,
    #[cfg(feature = "onnx")]
    Onnx(onnx::OnnxBackbone),
}

/// A loaded extractor. Shareable across threads; counts every extraction.
#[derive(Debug)]
pub struct FeatureExtractor {
    backend: Backend,
    dim: usize,
    key: String,
    extractions: AtomicUsize,
}

pub fn load_extractor(spec: &ExtractorSpec) -> Result<FeatureExtractor, FeatureError> {
    let (backend, dim) = match spec {
        ExtractorSpec::BuiltinStats => (Backend::BuiltinStats, builtin::DIM),
        #[cfg(feature = "onnx")]
        ExtractorSpec::ExternalModel { model_path, input_side, mean, std } => {
            if *input_side == 0 {
                return Err(FeatureError::ModelShape("input_side must be at least 1".into()));
            }
            if std.iter().any(|&s| !(s > 0.0)) {
                return Err(FeatureError::ModelShape("normalization std must be positive".into()));
            }
            let model = onnx::OnnxBackbone::load(model_path, *input_side, *mean, *std)?;
            let dim = model.dim();
            (Backend::Onnx(model), dim)
        }
        #[cfg(not(feature = "onnx"))]
        ExtractorSpec::ExternalModel { .. } => {
            return Err(FeatureError::ModelLoad("built without ONNX support".into()));
        }
    };
    let key = serde_json::to_string(spec).expect("extractor spec serializes");
    Ok(FeatureExtractor { backend, dim, key, extractions: AtomicUsize::new(0) })
}

impl FeatureExtractor {
    pub fn builtin() -> Self {
        load_extractor(&ExtractorSpec::BuiltinStats).expect("builtin extractor always loads")
    }

    /// Length of every vector this extractor produces.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of images extracted so far.
    pub fn extraction_count(&self) -> usize {
        self.extractions.load(Ordering::Relaxed)
    }

    pub fn extract(&self, img: &Image) -> Result<Vec<f64>, FeatureError> {
        self.extractions.fetch_add(1, Ordering::Relaxed);
        let v = match &self.backend {
            Backend::BuiltinStats => builtin::extract(img),
            #[cfg(feature = "onnx")]
            Backend::Onnx(model) => model.extract(img)?,
        };
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(FeatureError::Extract(format!("feature {i} is not finite")));
        }
        Ok(v)
    }

    /// Row `i` is the features of `images[i]`.
    pub fn extract_batch(&self, images: &[Image]) -> Result<FeatureMatrix, FeatureError> {
        let rows = images.par_iter().map(|img| self.extract(img)).collect::<Result<Vec<_>, _>>()?;
        Ok(FeatureMatrix::from_rows(&rows)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    root: PathBuf,
    shortest_side: u32,
    extractor: String,
    n: usize,
    seed: u64,
}

/// In-memory cache of unaugmented real-domain features, keyed by
/// (dataset, extractor, sample count, seed).
#[derive(Debug, Default)]
pub struct RealFeatureCache {
    entries: Mutex<HashMap<CacheKey, Arc<FeatureMatrix>>>,
}

/// Stream key for drawing the real-image sample.
const REAL_SAMPLE_STREAM: u64 = 0x7265_616c;

impl RealFeatureCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Features of `n` real images sampled with `seed`, computed on first use.
    pub fn get(
        &self,
        source: &ImageSource,
        extractor: &FeatureExtractor,
        n: usize,
        seed: u64,
    ) -> Result<Arc<FeatureMatrix>, FeatureError> {
        let key = CacheKey {
            root: source.handle().root().to_path_buf(),
            shortest_side: source.shortest_side(),
            extractor: extractor.key.clone(),
            n,
            seed,
        };
        if let Some(hit) = self.entries.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let features = Arc::new(cache_real_features(source, extractor, n, seed)?);
        self.entries.lock().expect("cache lock").insert(key, Arc::clone(&features));
        Ok(features)
    }
}

/// Extracts features from `n` real images drawn with `seed`, without any augmentation.
pub fn cache_real_features(
    source: &ImageSource,
    extractor: &FeatureExtractor,
    n: usize,
    seed: u64,
) -> Result<FeatureMatrix, FeatureError> {
    if n == 0 {
        return Err(DatasetError::InvalidSampleCount.into());
    }
    let mut r = rng::stream(seed, REAL_SAMPLE_STREAM);
    let images = source.load(&sample_indices(source.len(), n, &mut r))?;
    extractor.extract_batch(&images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{save_png, scan_dataset, Domain};

    fn toy_source(n: u32) -> (tempfile::TempDir, ImageSource) {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..n {
            let img = Image::from_fn(16, 16, |x, y| [(x * 9 + i) as u8, (y * 11) as u8, (i * 30) as u8]).unwrap();
            save_png(&img, dir.path().join(format!("{i:02}.png"))).unwrap();
        }
        let h = scan_dataset(dir.path(), Domain::Real).unwrap();
        let src = ImageSource::new(h, 16, 100).unwrap();
        (dir, src)
    }

    #[test]
    fn builtin_reports_dim() {
        let ex = FeatureExtractor::builtin();
        assert_eq!(ex.dim(), 448);
        let v = ex.extract(&Image::filled(5, 5, [9, 9, 9]).unwrap()).unwrap();
        assert_eq!(v.len(), ex.dim());
        assert_eq!(ex.extraction_count(), 1);
    }

    #[test]
    fn batch_matches_single_and_permutes() {
        let ex = FeatureExtractor::builtin();
        let imgs: Vec<Image> = (0..3u8)
            .map(|i| Image::from_fn(20, 12, |x, y| [x as u8 * i, y as u8, 3]).unwrap())
            .collect();
        let m = ex.extract_batch(&imgs).unwrap();
        for (i, img) in imgs.iter().enumerate() {
            assert_eq!(m.row(i), ex.extract(img).unwrap().as_slice());
        }
        let rev: Vec<Image> = imgs.iter().rev().cloned().collect();
        let mr = ex.extract_batch(&rev).unwrap();
        assert_eq!(mr.row(0), m.row(2));
        let one = ex.extract_batch(&imgs[..1]).unwrap();
        assert_eq!((one.rows(), one.cols()), (1, 448));
    }

    #[test]
    fn real_cache_hits_do_not_extract() {
        let (_dir, src) = toy_source(5);
        let ex = FeatureExtractor::builtin();
        let cache = RealFeatureCache::new();
        let a = cache.get(&src, &ex, 4, 7).unwrap();
        assert_eq!(ex.extraction_count(), 4);
        let b = cache.get(&src, &ex, 4, 7).unwrap();
        assert_eq!(ex.extraction_count(), 4);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, cache_real_features(&src, &ex, 4, 7).unwrap());
        let single = cache.get(&src, &ex, 1, 7).unwrap();
        assert_eq!(single.rows(), 1);
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn missing_model_fails_to_load() {
        let spec = ExtractorSpec::ExternalModel {
            model_path: "/nonexistent/model.onnx".into(),
            input_side: 224,
            mean: IMAGENET_MEAN,
            std: IMAGENET_STD,
        };
        assert!(matches!(load_extractor(&spec), Err(FeatureError::ModelLoad(_))));
    }

    #[test]
    fn spec_json_shape() {
        let spec: ExtractorSpec =
            serde_json::from_str(r#"{"variant":"external_model","model_path":"m.onnx"}"#).unwrap();
        assert_eq!(
            spec,
            ExtractorSpec::ExternalModel {
                model_path: "m.onnx".into(),
                input_side: 224,
                mean: IMAGENET_MEAN,
                std: IMAGENET_STD
            }
        );
        let b: ExtractorSpec = serde_json::from_str(r#"{"variant":"builtin_stats"}"#).unwrap();
        assert_eq!(b, ExtractorSpec::BuiltinStats);
    }
}
