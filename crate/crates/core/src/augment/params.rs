//! Default parameters per kind and the strength-scaling rules.
//!
//! Scaling rules: scalars are multiplied by the strength; for a range `(a, b)`
//! only `b` is scaled and never drops below `a`; kernel sizes are rounded down
//! to an odd integer no smaller than 3; posterize bits scale inversely.

use thiserror::Error;

use super::kind::AugKind;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("strength must be positive, got {0}")]
pub struct InvalidStrength(pub f64);

/// Parameters for one kernel invocation. At strength 1 these are the defaults.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    None,
    GaussianBlur { kernel: (u32, u32) },
    Blur { kernel_limit: u32 },
    Defocus { radius: (f64, f64) },
    GlassBlur { sigma: f64, max_delta: u32 },
    MedianBlur { kernel_limit: u32 },
    MotionBlur { kernel_limit: u32 },
    ZoomBlur { max_factor: f64 },
    Clahe { clip_limit: f64 },
    Brightness { jitter: f64 },
    Contrast { jitter: f64 },
    Saturation { jitter: f64 },
    Hue { jitter: f64 },
    FancyPca { alpha: f64 },
    Posterize { num_bits: u8 },
    Gamma { limits: (f64, f64) },
    ToneCurve { scale: f64 },
    Emboss { strength: (f64, f64) },
    Sharpen { alpha: (f64, f64) },
    UnsharpMask { kernel: (u32, u32), alpha: f64 },
    GaussNoise { var_limit: f64 },
    IsoNoise { color_shift: (f64, f64), intensity: (f64, f64) },
    MultiplicativeNoise { multiplier: f64 },
    PixelDropout { dropout_prob: f64 },
    UniformNoise { strength: f64 },
}

/// Offset range of glass blur pixel swaps at strength 1.
const GLASS_MAX_DELTA: f64 = 4.0;
const HUE_JITTER_CAP: f64 = 0.5;

pub fn base_params(kind: AugKind) -> Params {
    use AugKind::*;
    match kind {
        GaussianBlur => Params::GaussianBlur { kernel: (3, 15) },
        Blur => Params::Blur { kernel_limit: 7 },
        Defocus => Params::Defocus { radius: (3.0, 10.0) },
        GlassBlur => Params::GlassBlur { sigma: 0.7, max_delta: GLASS_MAX_DELTA as u32 },
        MedianBlur => Params::MedianBlur { kernel_limit: 7 },
        MotionBlur => Params::MotionBlur { kernel_limit: 7 },
        ZoomBlur => Params::ZoomBlur { max_factor: 1.09 },
        ChannelShuffle | Equalize | Invert => Params::None,
        Clahe => Params::Clahe { clip_limit: 4.0 },
        Brightness => Params::Brightness { jitter: 0.3 },
        Contrast => Params::Contrast { jitter: 0.3 },
        Saturation => Params::Saturation { jitter: 0.3 },
        Hue => Params::Hue { jitter: 0.3 },
        FancyPca => Params::FancyPca { alpha: 0.3 },
        Posterize => Params::Posterize { num_bits: 4 },
        Gamma => Params::Gamma { limits: (80.0, 120.0) },
        ToneCurve => Params::ToneCurve { scale: 0.1 },
        Emboss => Params::Emboss { strength: (0.2, 0.5) },
        Sharpen => Params::Sharpen { alpha: (0.2, 0.5) },
        UnsharpMask => Params::UnsharpMask { kernel: (3, 15), alpha: 0.5 },
        GaussNoise => Params::GaussNoise { var_limit: 75.0 },
        IsoNoise => Params::IsoNoise { color_shift: (0.01, 0.05), intensity: (0.1, 0.5) },
        MultiplicativeNoise => Params::MultiplicativeNoise { multiplier: 0.9 },
        PixelDropout => Params::PixelDropout { dropout_prob: 0.01 },
        UniformNoise => Params::UniformNoise { strength: 0.2 },
    }
}

/// Largest odd integer not above `v`, floored at 3.
pub(crate) fn odd_floor(v: f64) -> u32 {
    // Tolerate products such as 15 * 0.6 landing a hair below an integer.
    let n = (v + 1e-9).floor().max(3.0) as u32;
    if n % 2 == 0 {
        n - 1
    } else {
        n
    }
}

fn range(r: (f64, f64), s: f64) -> (f64, f64) {
    (r.0, r.0.max(r.1 * s))
}

fn kernel_range(r: (u32, u32), s: f64) -> (u32, u32) {
    (r.0, r.0.max(odd_floor(r.1 as f64 * s)))
}

/// Concrete kernel parameters for `kind` at `strength`.
pub fn scale_params(kind: AugKind, strength: f64) -> Result<Params, InvalidStrength> {
    if !(strength > 0.0) || !strength.is_finite() {
        return Err(InvalidStrength(strength));
    }
    let s = strength;
    Ok(match base_params(kind) {
        Params::None => Params::None,
        Params::GaussianBlur { kernel } => Params::GaussianBlur { kernel: kernel_range(kernel, s) },
        Params::Blur { kernel_limit } => Params::Blur { kernel_limit: odd_floor(kernel_limit as f64 * s) },
        Params::Defocus { radius } => Params::Defocus { radius: range(radius, s) },
        Params::GlassBlur { sigma, .. } => {
            Params::GlassBlur { sigma: sigma * s, max_delta: (GLASS_MAX_DELTA * s).round() as u32 }
        }
        Params::MedianBlur { kernel_limit } => {
            Params::MedianBlur { kernel_limit: odd_floor(kernel_limit as f64 * s) }
        }
        Params::MotionBlur { kernel_limit } => {
            Params::MotionBlur { kernel_limit: odd_floor(kernel_limit as f64 * s) }
        }
        Params::ZoomBlur { max_factor } => Params::ZoomBlur { max_factor: max_factor * s },
        Params::Clahe { clip_limit } => Params::Clahe { clip_limit: clip_limit * s },
        Params::Brightness { jitter } => Params::Brightness { jitter: jitter * s },
        Params::Contrast { jitter } => Params::Contrast { jitter: jitter * s },
        Params::Saturation { jitter } => Params::Saturation { jitter: jitter * s },
        Params::Hue { jitter } => Params::Hue { jitter: (jitter * s).min(HUE_JITTER_CAP) },
        Params::FancyPca { alpha } => Params::FancyPca { alpha: alpha * s },
        Params::Posterize { num_bits } => {
            Params::Posterize { num_bits: (num_bits as f64 / s).round().clamp(1.0, 8.0) as u8 }
        }
        Params::Gamma { limits } => Params::Gamma { limits: range(limits, s) },
        Params::ToneCurve { scale } => Params::ToneCurve { scale: scale * s },
        Params::Emboss { strength } => Params::Emboss { strength: range(strength, s) },
        Params::Sharpen { alpha } => Params::Sharpen { alpha: range(alpha, s) },
        Params::UnsharpMask { kernel, alpha } => {
            Params::UnsharpMask { kernel: kernel_range(kernel, s), alpha: alpha * s }
        }
        Params::GaussNoise { var_limit } => Params::GaussNoise { var_limit: var_limit * s },
        Params::IsoNoise { color_shift, intensity } => {
            Params::IsoNoise { color_shift: range(color_shift, s), intensity: range(intensity, s) }
        }
        Params::MultiplicativeNoise { multiplier } => {
            Params::MultiplicativeNoise { multiplier: multiplier * s }
        }
        Params::PixelDropout { dropout_prob } => {
            Params::PixelDropout { dropout_prob: (dropout_prob * s).min(1.0) }
        }
        Params::UniformNoise { strength } => Params::UniformNoise { strength: strength * s },
    })
}
