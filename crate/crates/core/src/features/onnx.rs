//! ONNX backbone inference through tract.

use std::path::Path;

use tract_onnx::prelude::*;

use super::FeatureError;
use crate::dataset::resize_exact;
use crate::image::Image;


pub struct OnnxBackbone {
    plan: Arc<TypedRunnableModel>,
    side: u32,
    mean: [f32; 3],
    std: [f32; 3],
    dim: usize,
}

impl std::fmt::Debug for OnnxBackbone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OnnxBackbone").field("side", &self.side).field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl OnnxBackbone {
    pub fn load(path: &Path, side: u32, mean: [f32; 3], std: [f32; 3]) -> Result<Self, FeatureError> {
        let load_err = |e: TractError| FeatureError::ModelLoad(format!("{}: {e:#}", path.display()));
        if !path.is_file() {
            return Err(FeatureError::ModelLoad(format!("{}: no such file", path.display())));
        }
        let model = tract_onnx::onnx().model_for_path(path).map_err(load_err)?;
        if model.inputs.len() != 1 || model.outputs.len() != 1 {
            return Err(FeatureError::ModelShape(format!(
                "expected one input and one output, model has {} and {}",
                model.inputs.len(),
                model.outputs.len()
            )));
        }
        let side_dim = side as usize;
        let typed = model
            .with_input_fact(0, f32::fact([1, 3, side_dim, side_dim]).into())
            .and_then(|m| m.into_optimized())
            .map_err(load_err)?;
        let out_fact = typed.output_fact(0).map_err(load_err)?;
        let shape = out_fact
            .shape
            .as_concrete()
            .ok_or_else(|| FeatureError::ModelShape(format!("output shape {:?} is not static", out_fact.shape)))?;
        let dim: usize = shape.iter().product();
        if dim == 0 {
            return Err(FeatureError::ModelShape(format!("output shape {shape:?} is empty")));
        }
        let plan = typed.into_runnable().map_err(load_err)?;
        Ok(Self { plan, side, mean, std, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extract(&self, img: &Image) -> Result<Vec<f64>, FeatureError> {
        let side = self.side as usize;
        let img = resize_exact(img, self.side, self.side);
        let data = img.data();
        let input = tract_ndarray::Array4::from_shape_fn((1, 3, side, side), |(_, c, y, x)| {
            (data[(y * side + x) * 3 + c] as f32 / 255.0 - self.mean[c]) / self.std[c]
        });
        let outputs = self
            .plan
            .run(tvec!(Tensor::from(input).into()))
            .map_err(|e| FeatureError::Extract(format!("{e:#}")))?;
        let view = outputs[0].to_plain_array_view::<f32>().map_err(|e| FeatureError::Extract(format!("{e:#}")))?;
        let values: Vec<f64> = view.iter().map(|&v| v as f64).collect();
        if values.len() != self.dim {
            return Err(FeatureError::Extract(format!("expected {} features, got {}", self.dim, values.len())));
        }
        Ok(values)
    }
}
