use rand::Rng;

use super::{odd_size, uniform};
use crate::augment::filter;
use crate::image::Image;

/// `(1 - alpha) * identity + alpha * effect` for 3x3 kernels.
fn blend3(effect: [f32; 9], alpha: f32) -> [f32; 9] {
    let mut k = effect.map(|v| v * alpha);
    k[4] += 1.0 - alpha;
    k
}

pub(crate) fn emboss_effect(strength: f32) -> [f32; 9] {
    let s = strength;
    [-1.0 - s, -s, 0.0, -s, 1.0, s, 0.0, s, 1.0 + s]
}

pub(crate) const SHARPEN_EFFECT: [f32; 9] = [-1.0, -1.0, -1.0, -1.0, 9.0, -1.0, -1.0, -1.0, -1.0];

fn apply3(img: &Image, kernel: [f32; 9]) -> Image {
    let (w, h) = (img.width() as usize, img.height() as usize);
    img.from_f32_like(&filter::convolve2d(&img.to_f32(), w, h, &kernel, 3))
}

pub(super) fn emboss<R: Rng + ?Sized>(img: &Image, strength: (f64, f64), rng: &mut R) -> Image {
    let alpha = uniform(rng, strength.0, strength.1) as f32;
    apply3(img, blend3(emboss_effect(1.0), alpha.min(1.0)))
}

pub(super) fn sharpen<R: Rng + ?Sized>(img: &Image, alpha: (f64, f64), rng: &mut R) -> Image {
    let a = uniform(rng, alpha.0, alpha.1) as f32;
    apply3(img, blend3(SHARPEN_EFFECT, a.min(1.0)))
}

pub(super) fn unsharp_mask<R: Rng + ?Sized>(img: &Image, kernel: (u32, u32), alpha: f64, rng: &mut R) -> Image {
    let k = odd_size(rng, kernel.0, kernel.1);
    let (w, h) = (img.width() as usize, img.height() as usize);
    let src = img.to_f32();
    let blurred = filter::gaussian_blur(&src, w, h, k, filter::sigma_for_kernel(k));
    let a = alpha as f32;
    let out: Vec<f32> = src.iter().zip(&blurred).map(|(&v, &b)| v + a * (v - b)).collect();
    img.from_f32_like(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn effect_kernels_preserve_flat_regions() {
        assert!((emboss_effect(0.7).iter().sum::<f32>() - 1.0).abs() < 1e-6);
        assert!((SHARPEN_EFFECT.iter().sum::<f32>() - 1.0).abs() < 1e-6);
        let flat = Image::filled(6, 6, [120, 30, 240]).unwrap();
        let mut r = rng::seeded(4);
        assert_eq!(emboss(&flat, (0.2, 0.5), &mut r), flat);
        assert_eq!(sharpen(&flat, (0.2, 0.5), &mut r), flat);
        assert_eq!(unsharp_mask(&flat, (3, 15), 0.5, &mut r), flat);
    }

    #[test]
    fn sharpen_increases_edge_contrast() {
        let img = Image::from_fn(8, 4, |x, _| if x < 4 { [100; 3] } else { [150; 3] }).unwrap();
        let out = sharpen(&img, (0.5, 0.5), &mut rng::seeded(0));
        assert!(out.pixel(3, 1)[0] < 100);
        assert!(out.pixel(4, 1)[0] > 150);
    }
}
