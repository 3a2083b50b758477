use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::uniform;
use crate::augment::color_space::{hls_to_rgb, luma, rgb_to_hls};
use crate::image::{clamp_u8, Image};

pub(super) fn gauss_noise<R: Rng + ?Sized>(img: &Image, var_limit: f64, rng: &mut R) -> Image {
    let sigma = uniform(rng, 0.0, var_limit).sqrt();
    if sigma == 0.0 {
        return img.clone();
    }
    let normal = Normal::new(0.0f32, sigma as f32).expect("finite sigma");
    img.with_data(img.data().iter().map(|&v| clamp_u8(v as f32 + normal.sample(rng))).collect())
}

/// Camera-sensor noise: Poisson-like luminance noise (Gaussian approximation)
/// plus per-pixel hue jitter.
pub(super) fn iso_noise<R: Rng + ?Sized>(
    img: &Image,
    color_shift: (f64, f64),
    intensity: (f64, f64),
    rng: &mut R,
) -> Image {
    let shift = uniform(rng, color_shift.0, color_shift.1);
    let intensity = uniform(rng, intensity.0, intensity.1);
    let src = img.data();
    let n = img.pixel_count() as f64;
    let lum: Vec<f64> = src.chunks_exact(3).map(|p| luma(p[0] as f32, p[1] as f32, p[2] as f32) as f64 / 255.0).collect();
    let mean = lum.iter().sum::<f64>() / n;
    let std = (lum.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let lambda = std * intensity * 255.0;
    let lum_noise = Normal::new(lambda, lambda.sqrt()).expect("finite lambda");
    let hue_noise = Normal::new(0.0, shift * intensity).expect("finite shift");
    let mut out = src.to_vec();
    for px in out.chunks_exact_mut(3) {
        let [h, l, s] = rgb_to_hls([px[0] as f32 / 255.0, px[1] as f32 / 255.0, px[2] as f32 / 255.0]);
        let dl = (lum_noise.sample(rng).max(0.0) / 255.0) as f32;
        let dh = hue_noise.sample(rng) as f32;
        let l = (l + dl * (1.0 - l)).clamp(0.0, 1.0);
        let rgb = hls_to_rgb([h + dh, l, s]);
        for c in 0..3 {
            px[c] = clamp_u8(rgb[c] * 255.0);
        }
    }
    img.with_data(out)
}

/// One global factor from `[min(m, 1), max(m, 1)]`.
pub(super) fn multiplicative_noise<R: Rng + ?Sized>(img: &Image, multiplier: f64, rng: &mut R) -> Image {
    let f = uniform(rng, multiplier.min(1.0), multiplier.max(1.0)) as f32;
    img.with_data(img.data().iter().map(|&v| clamp_u8(v as f32 * f)).collect())
}

pub(super) fn pixel_dropout<R: Rng + ?Sized>(img: &Image, dropout_prob: f64, rng: &mut R) -> Image {
    let mut out = img.data().to_vec();
    for px in out.chunks_exact_mut(3) {
        if rng.random::<f64>() < dropout_prob {
            px.fill(0);
        }
    }
    img.with_data(out)
}

pub(super) fn uniform_noise<R: Rng + ?Sized>(img: &Image, strength: f64, rng: &mut R) -> Image {
    let a = (strength * 255.0) as f32;
    if a <= 0.0 {
        return img.clone();
    }
    img.with_data(img.data().iter().map(|&v| clamp_u8(v as f32 + rng.random_range(-a..=a))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn dropout_rate_is_close_to_target() {
        let img = Image::filled(256, 256, [200, 200, 200]).unwrap();
        let out = pixel_dropout(&img, 0.01, &mut rng::seeded(8));
        let dropped = out.data().chunks(3).filter(|p| p == &[0, 0, 0]).count();
        let rate = dropped as f64 / 65536.0;
        assert!((rate - 0.01).abs() <= 0.005, "rate {rate}");
    }

    #[test]
    fn multiplicative_noise_range() {
        let img = Image::filled(4, 4, [200, 100, 50]).unwrap();
        let out = multiplicative_noise(&img, 0.9, &mut rng::seeded(2));
        let p = out.pixel(0, 0);
        assert!(p[0] >= 180 && p[0] <= 200);
        assert!(out.data().chunks(3).all(|q| q == p));
        let brighter = multiplicative_noise(&img, 1.8, &mut rng::seeded(2));
        assert!(brighter.pixel(0, 0)[1] >= 100);
    }

    #[test]
    fn noise_is_bounded() {
        let img = Image::filled(32, 32, [128, 128, 128]).unwrap();
        let out = uniform_noise(&img, 0.2, &mut rng::seeded(1));
        let a = 0.2 * 255.0;
        assert!(out.data().iter().all(|&v| (v as f64 - 128.0).abs() <= a + 0.5));
        assert_ne!(out, img);
        let g = gauss_noise(&img, 75.0, &mut rng::seeded(1));
        let mean = g.data().iter().map(|&v| v as f64).sum::<f64>() / g.data().len() as f64;
        assert!((mean - 128.0).abs() < 1.0);
    }

    #[test]
    fn iso_noise_on_flat_image_changes_nothing_in_luminance() {
        // A flat image has zero luminance std, so only hue jitter acts; gray has no hue.
        let img = Image::filled(8, 8, [90, 90, 90]).unwrap();
        let out = iso_noise(&img, (0.01, 0.05), (0.1, 0.5), &mut rng::seeded(3));
        assert_eq!(out, img);
    }
}
