use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{map_lut, uniform};
use crate::augment::color_space::{hsv_to_rgb, luma, rgb_to_hsv, rgb_to_ycbcr, ycbcr_to_rgb};
use crate::image::{clamp_u8, Image};

const CLAHE_TILES: usize = 8;

pub(crate) fn invert(img: &Image) -> Image {
    img.with_data(img.data().iter().map(|&v| 255 - v).collect())
}

pub(crate) fn channel_shuffle<R: Rng + ?Sized>(img: &Image, rng: &mut R) -> Image {
    let mut perm = [0usize, 1, 2];
    perm.shuffle(rng);
    let src = img.data();
    let mut out = vec![0u8; src.len()];
    for (o, s) in out.chunks_exact_mut(3).zip(src.chunks_exact(3)) {
        for c in 0..3 {
            o[c] = s[perm[c]];
        }
    }
    img.with_data(out)
}

pub(super) fn posterize(img: &Image, num_bits: u8) -> Image {
    let bits = num_bits.clamp(1, 8);
    let mask = if bits == 8 { 0xFF } else { 0xFFu8 << (8 - bits) };
    img.with_data(img.data().iter().map(|&v| v & mask).collect())
}

pub(crate) fn equalize(img: &Image) -> Image {
    let src = img.data();
    let n = img.pixel_count() as u64;
    let mut luts = [[0u8; 256]; 3];
    for (c, lut) in luts.iter_mut().enumerate() {
        let mut hist = [0u64; 256];
        for px in src.chunks_exact(3) {
            hist[px[c] as usize] += 1;
        }
        let cdf_min = hist.iter().copied().find(|&h| h > 0).unwrap_or(0);
        if n == cdf_min {
            for (v, l) in lut.iter_mut().enumerate() {
                *l = v as u8;
            }
            continue;
        }
        let mut cdf = 0u64;
        for (v, l) in lut.iter_mut().enumerate() {
            cdf += hist[v];
            let scaled = (cdf.saturating_sub(cdf_min)) as f64 * 255.0 / (n - cdf_min) as f64;
            *l = scaled.round().clamp(0.0, 255.0) as u8;
        }
    }
    let mut out = src.to_vec();
    for px in out.chunks_exact_mut(3) {
        for c in 0..3 {
            px[c] = luts[c][px[c] as usize];
        }
    }
    img.with_data(out)
}

fn gamma_lut(gamma: f64) -> [u8; 256] {
    let mut lut = [0u8; 256];
    for (v, l) in lut.iter_mut().enumerate() {
        *l = clamp_u8((255.0 * (v as f64 / 255.0).powf(gamma)) as f32);
    }
    lut
}

pub(super) fn gamma<R: Rng + ?Sized>(img: &Image, limits: (f64, f64), rng: &mut R) -> Image {
    let g = uniform(rng, limits.0 / 100.0, limits.1 / 100.0);
    map_lut(img, &gamma_lut(g))
}

pub(super) fn brightness<R: Rng + ?Sized>(img: &Image, jitter: f64, rng: &mut R) -> Image {
    let f = uniform(rng, (1.0 - jitter).max(0.0), 1.0 + jitter) as f32;
    img.with_data(img.data().iter().map(|&v| clamp_u8(v as f32 * f)).collect())
}

pub(super) fn contrast<R: Rng + ?Sized>(img: &Image, jitter: f64, rng: &mut R) -> Image {
    let f = uniform(rng, (1.0 - jitter).max(0.0), 1.0 + jitter) as f32;
    let src = img.data();
    let mean = src
        .chunks_exact(3)
        .map(|p| luma(p[0] as f32, p[1] as f32, p[2] as f32) as f64)
        .sum::<f64>() as f32
        / img.pixel_count() as f32;
    img.with_data(src.iter().map(|&v| clamp_u8(mean + f * (v as f32 - mean))).collect())
}

pub(super) fn saturation<R: Rng + ?Sized>(img: &Image, jitter: f64, rng: &mut R) -> Image {
    let f = uniform(rng, (1.0 - jitter).max(0.0), 1.0 + jitter) as f32;
    let mut out = img.data().to_vec();
    for px in out.chunks_exact_mut(3) {
        let gray = luma(px[0] as f32, px[1] as f32, px[2] as f32);
        for v in px.iter_mut() {
            *v = clamp_u8(gray + f * (*v as f32 - gray));
        }
    }
    img.with_data(out)
}

pub(super) fn hue<R: Rng + ?Sized>(img: &Image, jitter: f64, rng: &mut R) -> Image {
    let shift = uniform(rng, -jitter, jitter) as f32;
    let mut out = img.data().to_vec();
    for px in out.chunks_exact_mut(3) {
        let [h, s, v] = rgb_to_hsv([px[0] as f32 / 255.0, px[1] as f32 / 255.0, px[2] as f32 / 255.0]);
        let rgb = hsv_to_rgb([h + shift, s, v]);
        for c in 0..3 {
            px[c] = clamp_u8(rgb[c] * 255.0);
        }
    }
    img.with_data(out)
}

pub(super) fn fancy_pca<R: Rng + ?Sized>(img: &Image, alpha: f64, rng: &mut R) -> Image {
    let src = img.data();
    let n = img.pixel_count() as f64;
    let mut mean = Vector3::zeros();
    for p in src.chunks_exact(3) {
        mean += Vector3::new(p[0] as f64, p[1] as f64, p[2] as f64) / 255.0;
    }
    mean /= n;
    let mut cov = Matrix3::zeros();
    for p in src.chunks_exact(3) {
        let d = Vector3::new(p[0] as f64, p[1] as f64, p[2] as f64) / 255.0 - mean;
        cov += d * d.transpose();
    }
    if n > 1.0 {
        cov /= n - 1.0;
    }
    let eig = SymmetricEigen::new(cov);
    let normal = Normal::new(0.0, alpha).expect("alpha is finite and non-negative");
    let mut delta = Vector3::zeros();
    for i in 0..3 {
        let a: f64 = normal.sample(rng);
        delta += eig.eigenvectors.column(i) * (a * eig.eigenvalues[i]);
    }
    let delta = delta * 255.0;
    let mut out = src.to_vec();
    for px in out.chunks_exact_mut(3) {
        for c in 0..3 {
            px[c] = clamp_u8((px[c] as f64 + delta[c]) as f32);
        }
    }
    img.with_data(out)
}

/// Cubic Bezier through (0,0), (1/3,y1), (2/3,y2), (1,1). The x coordinate of
/// that curve is exactly `t`, so the y values form the lookup table directly.
pub(crate) fn tone_lut(y1: f64, y2: f64) -> [u8; 256] {
    let mut lut = [0u8; 256];
    for (v, l) in lut.iter_mut().enumerate() {
        let t = v as f64 / 255.0;
        let u = 1.0 - t;
        let y = 3.0 * u * u * t * y1 + 3.0 * u * t * t * y2 + t * t * t;
        *l = clamp_u8((y * 255.0) as f32);
    }
    lut
}

fn remap_luma(img: &Image, lut: &[u8; 256]) -> Image {
    let mut out = img.data().to_vec();
    for px in out.chunks_exact_mut(3) {
        let [y, cb, cr] = rgb_to_ycbcr([px[0] as f32, px[1] as f32, px[2] as f32]);
        let mapped = lut[clamp_u8(y) as usize] as f32;
        let rgb = ycbcr_to_rgb([mapped, cb, cr]);
        for c in 0..3 {
            px[c] = clamp_u8(rgb[c]);
        }
    }
    img.with_data(out)
}

pub(super) fn tone_curve<R: Rng + ?Sized>(img: &Image, scale: f64, rng: &mut R) -> Image {
    let normal = Normal::new(0.0, scale).expect("scale is finite and non-negative");
    let a: f64 = (1.0 / 3.0 + normal.sample(rng)).clamp(0.0, 1.0);
    let b: f64 = (2.0 / 3.0 + normal.sample(rng)).clamp(0.0, 1.0);
    let (y1, y2) = if a <= b { (a, b) } else { (b, a) };
    remap_luma(img, &tone_lut(y1, y2))
}

/// Contrast-limited histogram equalization of one 8-bit plane.
pub(crate) fn clahe_plane(plane: &[u8], w: usize, h: usize, clip_limit: f64) -> Vec<u8> {
    let tiles_x = CLAHE_TILES.min(w);
    let tiles_y = CLAHE_TILES.min(h);
    // Tile t spans [t * len / tiles, (t + 1) * len / tiles); none is empty.
    let bound = |t: usize, len: usize, tiles: usize| t * len / tiles;
    let mut luts = vec![[0u8; 256]; tiles_x * tiles_y];
    for ty in 0..tiles_y {
        for tx in 0..tiles_x {
            let (x0, x1) = (bound(tx, w, tiles_x), bound(tx + 1, w, tiles_x));
            let (y0, y1) = (bound(ty, h, tiles_y), bound(ty + 1, h, tiles_y));
            let mut hist = [0u32; 256];
            for y in y0..y1 {
                for &v in &plane[y * w + x0..y * w + x1] {
                    hist[v as usize] += 1;
                }
            }
            let area = ((x1 - x0) * (y1 - y0)).max(1) as u32;
            let clip = ((clip_limit * area as f64 / 256.0) as u32).max(1);
            let mut excess = 0u32;
            for b in hist.iter_mut() {
                if *b > clip {
                    excess += *b - clip;
                    *b = clip;
                }
            }
            let add = excess / 256;
            let residual = (excess % 256) as usize;
            for (i, b) in hist.iter_mut().enumerate() {
                *b += add + u32::from(i < residual);
            }
            let lut = &mut luts[ty * tiles_x + tx];
            let mut cdf = 0u32;
            for (v, l) in lut.iter_mut().enumerate() {
                cdf += hist[v];
                *l = (cdf as f64 * 255.0 / area as f64).round().min(255.0) as u8;
            }
        }
    }
    let coord = |p: usize, len: usize, tiles: usize| {
        let f = (p as f64 + 0.5) * tiles as f64 / len as f64 - 0.5;
        if f <= 0.0 {
            (0, 0, 0.0)
        } else if f >= (tiles - 1) as f64 {
            (tiles - 1, tiles - 1, 0.0)
        } else {
            let i = f.floor() as usize;
            (i, i + 1, f - i as f64)
        }
    };
    let mut out = vec![0u8; plane.len()];
    for y in 0..h {
        let (ty0, ty1, ay) = coord(y, h, tiles_y);
        for x in 0..w {
            let (tx0, tx1, ax) = coord(x, w, tiles_x);
            let v = plane[y * w + x] as usize;
            let l = |ty: usize, tx: usize| luts[ty * tiles_x + tx][v] as f64;
            let top = l(ty0, tx0) * (1.0 - ax) + l(ty0, tx1) * ax;
            let bot = l(ty1, tx0) * (1.0 - ax) + l(ty1, tx1) * ax;
            out[y * w + x] = (top * (1.0 - ay) + bot * ay).round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

pub(super) fn clahe<R: Rng + ?Sized>(img: &Image, clip_limit: f64, rng: &mut R) -> Image {
    let clip = uniform(rng, 1.0, clip_limit);
    let (w, h) = (img.width() as usize, img.height() as usize);
    let ycc: Vec<[f32; 3]> = img
        .data()
        .chunks_exact(3)
        .map(|p| rgb_to_ycbcr([p[0] as f32, p[1] as f32, p[2] as f32]))
        .collect();
    let plane: Vec<u8> = ycc.iter().map(|p| clamp_u8(p[0])).collect();
    let eq = clahe_plane(&plane, w, h, clip);
    let mut out = Vec::with_capacity(img.data().len());
    for (p, &y) in ycc.iter().zip(&eq) {
        let rgb = ycbcr_to_rgb([y as f32, p[1], p[2]]);
        out.extend(rgb.iter().map(|&v| clamp_u8(v)));
    }
    img.with_data(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn noisy(w: u32, h: u32) -> Image {
        let mut r = rng::seeded(11);
        Image::from_fn(w, h, |_, _| [r.random(), r.random(), r.random()]).unwrap()
    }

    #[test]
    fn invert_is_involution() {
        let img = noisy(13, 7);
        assert_eq!(invert(&invert(&img)), img);
        assert_eq!(invert(&Image::filled(1, 1, [0, 100, 255]).unwrap()).pixel(0, 0), [255, 155, 0]);
    }

    #[test]
    fn posterize_masks_low_bits() {
        let img = Image::filled(1, 1, [0b1011_0111, 255, 1]).unwrap();
        assert_eq!(posterize(&img, 4).pixel(0, 0), [0b1011_0000, 0b1111_0000, 0]);
        assert_eq!(posterize(&img, 1).pixel(0, 0), [128, 128, 0]);
        let n = noisy(9, 9);
        assert_eq!(posterize(&n, 8), n);
    }

    #[test]
    fn unit_gamma_is_identity() {
        let lut = gamma_lut(1.0);
        assert!(lut.iter().enumerate().all(|(v, &l)| (l as i32 - v as i32).abs() <= 1));
    }

    #[test]
    fn flat_tone_curve_is_identity() {
        let lut = tone_lut(1.0 / 3.0, 2.0 / 3.0);
        assert!(lut.iter().enumerate().all(|(v, &l)| (l as i32 - v as i32).abs() <= 1));
        let bent = tone_lut(0.6, 0.9);
        assert!(bent.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn equalize_stretches_range_and_keeps_constant() {
        let img = Image::from_fn(4, 1, |x, _| [50 + x as u8, 7, 7]).unwrap();
        let out = equalize(&img);
        assert_eq!(out.pixel(0, 0)[0], 0);
        assert_eq!(out.pixel(3, 0)[0], 255);
        assert_eq!(out.pixel(2, 0)[1], 7);
    }

    #[test]
    fn channel_shuffle_permutes() {
        let img = noisy(8, 8);
        let out = channel_shuffle(&img, &mut rng::seeded(3));
        for (a, b) in img.data().chunks(3).zip(out.data().chunks(3)) {
            let (mut a, mut b) = (a.to_vec(), b.to_vec());
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_jitter_color_ops_are_near_identity() {
        let img = noisy(10, 10);
        let mut r = rng::seeded(1);
        for out in [brightness(&img, 0.0, &mut r), contrast(&img, 0.0, &mut r), saturation(&img, 0.0, &mut r)] {
            assert_eq!(out, img);
        }
        let h = hue(&img, 0.0, &mut r);
        assert!(h.data().iter().zip(img.data()).all(|(&a, &b)| (a as i32 - b as i32).abs() <= 1));
        let pca = fancy_pca(&img, 0.0, &mut r);
        assert_eq!(pca, img);
    }

    #[test]
    fn clahe_shared_histogram_is_one_monotone_map() {
        // Every 8x6 tile holds the same values, so all tile LUTs coincide.
        let plane: Vec<u8> = (0..64 * 48).map(|i| (((i % 64) % 8) * 20 + ((i / 64) % 6) * 3) as u8).collect();
        let out = clahe_plane(&plane, 64, 48, 4.0);
        assert_eq!(out.len(), plane.len());
        let mut pairs: Vec<(u8, u8)> = plane.iter().copied().zip(out.iter().copied()).collect();
        pairs.sort();
        assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1));

        let flat = clahe_plane(&[77; 40 * 30], 40, 30, 2.0);
        assert!(flat.iter().all(|&v| v == flat[0]));
        assert_eq!(clahe_plane(&[10, 200, 30], 3, 1, 2.0).len(), 3);
    }
}
