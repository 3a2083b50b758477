//! Convolution and resampling helpers shared by the kernels. All borders use
//! clamp-to-edge (replicate) padding. Buffers are interleaved RGB `f32`.

const C: usize = 3;

#[inline]
fn clamp_idx(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Separable convolution with a horizontal and a vertical kernel of odd length.
pub(crate) fn convolve_separable(src: &[f32], w: usize, h: usize, kx: &[f32], ky: &[f32]) -> Vec<f32> {
    let rx = (kx.len() / 2) as isize;
    let ry = (ky.len() / 2) as isize;
    let mut tmp = vec![0.0f32; src.len()];
    for y in 0..h {
        let row = &src[y * w * C..(y + 1) * w * C];
        for x in 0..w {
            let mut acc = [0.0f32; C];
            for (i, &k) in kx.iter().enumerate() {
                let sx = clamp_idx(x as isize + i as isize - rx, w);
                for c in 0..C {
                    acc[c] += k * row[sx * C + c];
                }
            }
            tmp[(y * w + x) * C..(y * w + x) * C + C].copy_from_slice(&acc);
        }
    }
    let mut out = vec![0.0f32; src.len()];
    for y in 0..h {
        for (i, &k) in ky.iter().enumerate() {
            let sy = clamp_idx(y as isize + i as isize - ry, h);
            let src_row = &tmp[sy * w * C..(sy + 1) * w * C];
            let dst_row = &mut out[y * w * C..(y + 1) * w * C];
            for (d, s) in dst_row.iter_mut().zip(src_row) {
                *d += k * s;
            }
        }
    }
    out
}

/// Dense 2-D convolution; `kernel` is `size x size`, row-major, `size` odd.
/// Zero taps are skipped, which keeps sparse line kernels cheap.
pub(crate) fn convolve2d(src: &[f32], w: usize, h: usize, kernel: &[f32], size: usize) -> Vec<f32> {
    debug_assert_eq!(kernel.len(), size * size);
    let r = (size / 2) as isize;
    let taps: Vec<(isize, isize, f32)> = kernel
        .iter()
        .enumerate()
        .filter(|(_, &k)| k != 0.0)
        .map(|(i, &k)| ((i % size) as isize - r, (i / size) as isize - r, k))
        .collect();
    let mut out = vec![0.0f32; src.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f32; C];
            for &(dx, dy, k) in &taps {
                let sx = clamp_idx(x as isize + dx, w);
                let sy = clamp_idx(y as isize + dy, h);
                let base = (sy * w + sx) * C;
                for c in 0..C {
                    acc[c] += k * src[base + c];
                }
            }
            out[(y * w + x) * C..(y * w + x) * C + C].copy_from_slice(&acc);
        }
    }
    out
}

/// OpenCV's default sigma for a Gaussian of size `k`.
pub(crate) fn sigma_for_kernel(k: u32) -> f64 {
    0.3 * ((k as f64 - 1.0) / 2.0 - 1.0) + 0.8
}

/// Smallest odd kernel size covering +-3 sigma, at least 3.
pub(crate) fn kernel_for_sigma(sigma: f64) -> u32 {
    let half = (3.0 * sigma).ceil().max(1.0) as u32;
    2 * half + 1
}

pub(crate) fn gaussian_kernel_1d(size: u32, sigma: f64) -> Vec<f32> {
    let r = (size / 2) as f64;
    let sigma = sigma.max(1e-6);
    let raw: Vec<f64> = (0..size).map(|i| (-(i as f64 - r).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| (v / sum) as f32).collect()
}

pub(crate) fn gaussian_blur(src: &[f32], w: usize, h: usize, size: u32, sigma: f64) -> Vec<f32> {
    let k = gaussian_kernel_1d(size, sigma);
    convolve_separable(src, w, h, &k, &k)
}

pub(crate) fn box_blur(src: &[f32], w: usize, h: usize, size: u32) -> Vec<f32> {
    let k = vec![1.0 / size as f32; size as usize];
    convolve_separable(src, w, h, &k, &k)
}

/// Per-channel median over a `size x size` window.
pub(crate) fn median_filter(src: &[u8], w: usize, h: usize, size: u32) -> Vec<u8> {
    let r = (size / 2) as isize;
    let mut out = vec![0u8; src.len()];
    let mut window = Vec::with_capacity((size * size) as usize);
    for y in 0..h {
        for x in 0..w {
            for c in 0..C {
                window.clear();
                for dy in -r..=r {
                    let sy = clamp_idx(y as isize + dy, h);
                    for dx in -r..=r {
                        let sx = clamp_idx(x as isize + dx, w);
                        window.push(src[(sy * w + sx) * C + c]);
                    }
                }
                let mid = window.len() / 2;
                let (_, m, _) = window.select_nth_unstable(mid);
                out[(y * w + x) * C + c] = *m;
            }
        }
    }
    out
}

/// Bilinear sample at continuous coordinates, clamped to the image.
#[inline]
pub(crate) fn bilinear(src: &[f32], w: usize, h: usize, fx: f64, fy: f64) -> [f32; C] {
    let fx = fx.clamp(0.0, (w - 1) as f64);
    let fy = fy.clamp(0.0, (h - 1) as f64);
    let x0 = fx.floor() as usize;
    let y0 = fy.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let ax = (fx - x0 as f64) as f32;
    let ay = (fy - y0 as f64) as f32;
    let mut px = [0.0f32; C];
    for (c, p) in px.iter_mut().enumerate() {
        let top = src[(y0 * w + x0) * C + c] * (1.0 - ax) + src[(y0 * w + x1) * C + c] * ax;
        let bot = src[(y1 * w + x0) * C + c] * (1.0 - ax) + src[(y1 * w + x1) * C + c] * ax;
        *p = top * (1.0 - ay) + bot * ay;
    }
    px
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_kernel_normalized_and_symmetric() {
        let k = gaussian_kernel_1d(7, sigma_for_kernel(7));
        let sum: f32 = k.iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert!((k[0] - k[6]).abs() < 1e-7);
        assert!((sigma_for_kernel(3) - 0.8).abs() < 1e-12);
        assert_eq!(kernel_for_sigma(0.7), 7);
        assert_eq!(kernel_for_sigma(0.2), 3);
    }

    #[test]
    fn constant_image_is_fixed_point() {
        let src = vec![42.0f32; 5 * 4 * 3];
        let blurred = box_blur(&src, 5, 4, 3);
        assert!(blurred.iter().all(|&v| (v - 42.0).abs() < 1e-4));
        let mut k = vec![0.0f32; 9];
        k[4] = 1.0;
        assert_eq!(convolve2d(&src, 5, 4, &k, 3), src);
    }

    #[test]
    fn median_removes_isolated_spike() {
        let mut src = vec![10u8; 5 * 5 * 3];
        src[(2 * 5 + 2) * 3] = 250;
        let out = median_filter(&src, 5, 5, 3);
        assert!(out.iter().all(|&v| v == 10));
    }

    #[test]
    fn bilinear_interpolates() {
        let src = vec![0.0, 0.0, 0.0, 10.0, 20.0, 30.0];
        assert_eq!(bilinear(&src, 2, 1, 0.5, 0.0), [5.0, 10.0, 15.0]);
        assert_eq!(bilinear(&src, 2, 1, 9.0, -3.0), [10.0, 20.0, 30.0]);
    }
}
