//! Kernel implementations. Each takes concrete parameters and an rng and
//! returns a new image of the same dimensions.

mod blur;
mod color;
mod noise;
mod sharpen;

use rand::Rng;

use super::params::Params;
use crate::image::Image;

/// Runs the kernel that `params` belongs to.
pub(crate) fn run<R: Rng + ?Sized>(params: &Params, img: &Image, rng: &mut R) -> Image {
    use Params as P;
    match *params {
        P::None => unreachable!("parameterless kinds are dispatched by kind"),
        P::GaussianBlur { kernel } => blur::gaussian_blur(img, kernel, rng),
        P::Blur { kernel_limit } => blur::box_blur(img, kernel_limit, rng),
        P::Defocus { radius } => blur::defocus(img, radius, rng),
        P::GlassBlur { sigma, max_delta } => blur::glass_blur(img, sigma, max_delta, rng),
        P::MedianBlur { kernel_limit } => blur::median_blur(img, kernel_limit, rng),
        P::MotionBlur { kernel_limit } => blur::motion_blur(img, kernel_limit, rng),
        P::ZoomBlur { max_factor } => blur::zoom_blur(img, max_factor),
        P::Clahe { clip_limit } => color::clahe(img, clip_limit, rng),
        P::Brightness { jitter } => color::brightness(img, jitter, rng),
        P::Contrast { jitter } => color::contrast(img, jitter, rng),
        P::Saturation { jitter } => color::saturation(img, jitter, rng),
        P::Hue { jitter } => color::hue(img, jitter, rng),
        P::FancyPca { alpha } => color::fancy_pca(img, alpha, rng),
        P::Posterize { num_bits } => color::posterize(img, num_bits),
        P::Gamma { limits } => color::gamma(img, limits, rng),
        P::ToneCurve { scale } => color::tone_curve(img, scale, rng),
        P::Emboss { strength } => sharpen::emboss(img, strength, rng),
        P::Sharpen { alpha } => sharpen::sharpen(img, alpha, rng),
        P::UnsharpMask { kernel, alpha } => sharpen::unsharp_mask(img, kernel, alpha, rng),
        P::GaussNoise { var_limit } => noise::gauss_noise(img, var_limit, rng),
        P::IsoNoise { color_shift, intensity } => noise::iso_noise(img, color_shift, intensity, rng),
        P::MultiplicativeNoise { multiplier } => noise::multiplicative_noise(img, multiplier, rng),
        P::PixelDropout { dropout_prob } => noise::pixel_dropout(img, dropout_prob, rng),
        P::UniformNoise { strength } => noise::uniform_noise(img, strength, rng),
    }
}

pub(crate) use color::{channel_shuffle, equalize, invert};

/// Continuous uniform draw from `[lo, hi]` (order-insensitive).
pub(crate) fn uniform<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Discrete uniform draw over the odd sizes in `[lo, hi]`.
pub(crate) fn odd_size<R: Rng + ?Sized>(rng: &mut R, lo: u32, hi: u32) -> u32 {
    let lo = lo | 1;
    let hi = hi.max(lo);
    let choices = (hi - lo) / 2 + 1;
    lo + 2 * rng.random_range(0..choices)
}

/// Applies a 256-entry lookup table to every sample.
pub(crate) fn map_lut(img: &Image, lut: &[u8; 256]) -> Image {
    img.with_data(img.data().iter().map(|&v| lut[v as usize]).collect())
}
