use rand::Rng;

use super::{odd_size, uniform};
use crate::augment::filter;
use crate::image::Image;

const GLASS_ITERATIONS: usize = 2;
const ZOOM_STEP: f64 = 0.01;

fn dims(img: &Image) -> (usize, usize) {
    (img.width() as usize, img.height() as usize)
}

pub(super) fn gaussian_blur<R: Rng + ?Sized>(img: &Image, kernel: (u32, u32), rng: &mut R) -> Image {
    let k = odd_size(rng, kernel.0, kernel.1);
    let (w, h) = dims(img);
    img.from_f32_like(&filter::gaussian_blur(&img.to_f32(), w, h, k, filter::sigma_for_kernel(k)))
}

pub(super) fn box_blur<R: Rng + ?Sized>(img: &Image, limit: u32, rng: &mut R) -> Image {
    let k = odd_size(rng, 3, limit);
    let (w, h) = dims(img);
    img.from_f32_like(&filter::box_blur(&img.to_f32(), w, h, k))
}

pub(crate) fn disk_kernel(radius: u32) -> (Vec<f32>, usize) {
    let size = 2 * radius as usize + 1;
    let r = radius as isize;
    let r2 = (radius * radius) as isize;
    let mut k: Vec<f32> = (0..size * size)
        .map(|i| {
            let dx = (i % size) as isize - r;
            let dy = (i / size) as isize - r;
            if dx * dx + dy * dy <= r2 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let sum: f32 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    (k, size)
}

pub(super) fn defocus<R: Rng + ?Sized>(img: &Image, radius: (f64, f64), rng: &mut R) -> Image {
    let lo = radius.0.round() as u32;
    let hi = (radius.1.floor() as u32).max(lo);
    let r = rng.random_range(lo..=hi);
    let (kernel, size) = disk_kernel(r);
    let (w, h) = dims(img);
    img.from_f32_like(&filter::convolve2d(&img.to_f32(), w, h, &kernel, size))
}

pub(super) fn glass_blur<R: Rng + ?Sized>(img: &Image, sigma: f64, max_delta: u32, rng: &mut R) -> Image {
    let (w, h) = dims(img);
    let blurred = filter::gaussian_blur(&img.to_f32(), w, h, filter::kernel_for_sigma(sigma), sigma);
    let mut px = img.from_f32_like(&blurred).into_raw();
    let d = max_delta as i64;
    for _ in 0..GLASS_ITERATIONS {
        for y in (0..h).rev() {
            for x in (0..w).rev() {
                let dx = rng.random_range(-d..=d);
                let dy = rng.random_range(-d..=d);
                let sx = (x as i64 + dx).clamp(0, w as i64 - 1) as usize;
                let sy = (y as i64 + dy).clamp(0, h as i64 - 1) as usize;
                let (a, b) = ((y * w + x) * 3, (sy * w + sx) * 3);
                for c in 0..3 {
                    px.swap(a + c, b + c);
                }
            }
        }
    }
    img.with_data(px)
}

pub(super) fn median_blur<R: Rng + ?Sized>(img: &Image, limit: u32, rng: &mut R) -> Image {
    let k = odd_size(rng, 3, limit);
    let (w, h) = dims(img);
    img.with_data(filter::median_filter(img.data(), w, h, k))
}

/// A normalized `size x size` line through the centre at `angle` radians.
pub(crate) fn line_kernel(size: u32, angle: f64) -> Vec<f32> {
    let n = size as usize;
    let c = (size as f64 - 1.0) / 2.0;
    let mut k = vec![0.0f32; n * n];
    let steps = 4 * n;
    for i in 0..=steps {
        let t = -c + 2.0 * c * i as f64 / steps as f64;
        let x = (c + t * angle.cos()).round().clamp(0.0, c * 2.0) as usize;
        let y = (c + t * angle.sin()).round().clamp(0.0, c * 2.0) as usize;
        k[y * n + x] = 1.0;
    }
    let sum: f32 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

pub(super) fn motion_blur<R: Rng + ?Sized>(img: &Image, limit: u32, rng: &mut R) -> Image {
    let k = odd_size(rng, 3, limit);
    let angle = uniform(rng, 0.0, std::f64::consts::PI);
    let kernel = line_kernel(k, angle);
    let (w, h) = dims(img);
    img.from_f32_like(&filter::convolve2d(&img.to_f32(), w, h, &kernel, k as usize))
}

/// Zoom factors `1, 1.01, ...` up to `max_factor`.
pub(crate) fn zoom_factors(max_factor: f64) -> Vec<f64> {
    let steps = ((max_factor - 1.0) / ZOOM_STEP + 1e-9).floor().max(0.0) as usize;
    (0..=steps).map(|i| 1.0 + ZOOM_STEP * i as f64).collect()
}

pub(super) fn zoom_blur(img: &Image, max_factor: f64) -> Image {
    let factors = zoom_factors(max_factor);
    if factors.len() == 1 {
        return img.clone();
    }
    let (w, h) = dims(img);
    let src = img.to_f32();
    let mut acc: Vec<f32> = src.clone();
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    for &f in &factors[1..] {
        for y in 0..h {
            for x in 0..w {
                let sx = cx + (x as f64 - cx) / f;
                let sy = cy + (y as f64 - cy) / f;
                let p = filter::bilinear(&src, w, h, sx, sy);
                let i = (y * w + x) * 3;
                for c in 0..3 {
                    acc[i + c] += p[c];
                }
            }
        }
    }
    let n = factors.len() as f32;
    acc.iter_mut().for_each(|v| *v /= n);
    img.from_f32_like(&acc)
}
