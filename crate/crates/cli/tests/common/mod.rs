#![allow(dead_code)]

use std::path::Path;

use genaug_core::dataset::save_png;
use genaug_core::Image;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A procedural "photo": smooth two-tone gradient sky, a few soft blobs, a
/// horizon edge, and mild sensor grain.
pub fn photo(index: u64, side: u32) -> Image {
    let mut r = ChaCha8Rng::seed_from_u64(0x5eed_0000 + index);
    let top: [f32; 3] = std::array::from_fn(|_| r.random_range(60.0..230.0));
    let bottom: [f32; 3] = std::array::from_fn(|_| r.random_range(20.0..200.0));
    let horizon = r.random_range(0.3..0.7) * side as f32;
    let ground: [f32; 3] = std::array::from_fn(|_| r.random_range(30.0..160.0));
    let blobs: Vec<(f32, f32, f32, [f32; 3])> = (0..r.random_range(2..6))
        .map(|_| {
            let c = std::array::from_fn(|_| r.random_range(0.0..255.0));
            (r.random_range(0.0..side as f32), r.random_range(0.0..side as f32), r.random_range(2.0..(side as f32 / 4.0).max(3.0)), c)
        })
        .collect();
    let grain: Vec<f32> = (0..side * side).map(|_| r.random_range(-6.0..6.0)).collect();
    Image::from_fn(side, side, |x, y| {
        let (fx, fy) = (x as f32, y as f32);
        let t = fy / side as f32;
        let mut px: [f32; 3] = if fy < horizon {
            std::array::from_fn(|c| top[c] * (1.0 - t) + bottom[c] * t)
        } else {
            std::array::from_fn(|c| ground[c] + 20.0 * ((fx * 0.3).sin() * (fy * 0.2).cos()))
        };
        for &(bx, by, rad, col) in &blobs {
            let d2 = ((fx - bx).powi(2) + (fy - by).powi(2)) / (rad * rad);
            let w = (-d2).exp();
            for c in 0..3 {
                px[c] = px[c] * (1.0 - w) + col[c] * w;
            }
        }
        let g = grain[(y * side + x) as usize];
        px.map(|v| (v + g).round().clamp(0.0, 255.0) as u8)
    })
    .unwrap()
}

pub fn write_photos(dir: &Path, count: u64, side: u32) {
    std::fs::create_dir_all(dir).unwrap();
    for i in 0..count {
        save_png(&photo(i, side), dir.join(format!("photo_{i:03}.png"))).unwrap();
    }
}

/// Darkens with gamma 1.8 then applies a 5x5 Gaussian blur (sigma 1.1,
/// clamped borders).
pub fn simulate(img: &Image) -> Image {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let dark: Vec<f64> = img.data().iter().map(|&v| 255.0 * (v as f64 / 255.0).powf(1.8)).collect();
    let sigma = 1.1f64;
    let taps: Vec<f64> = (-2..=2).map(|i: i32| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let norm: f64 = taps.iter().sum();
    let at = |buf: &[f64], x: i64, y: i64, c: usize| buf[((y.clamp(0, h - 1) * w + x.clamp(0, w - 1)) * 3) as usize + c];
    let mut horiz = vec![0.0; dark.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                horiz[((y * w + x) * 3) as usize + c] =
                    (-2..=2).map(|i| taps[(i + 2) as usize] * at(&dark, x + i, y, c)).sum::<f64>() / norm;
            }
        }
    }
    let mut out = vec![0u8; dark.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let v = (-2..=2).map(|i| taps[(i + 2) as usize] * at(&horiz, x, y + i, c)).sum::<f64>() / norm;
                out[((y * w + x) * 3) as usize + c] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    Image::from_raw(img.width(), img.height(), out).unwrap()
}

pub fn write_simulated(dir: &Path, count: u64, side: u32) {
    std::fs::create_dir_all(dir).unwrap();
    for i in 0..count {
        save_png(&simulate(&photo(i, side)), dir.join(format!("photo_{i:03}.png"))).unwrap();
    }
}

/// Runs the CLI in-process, returning (exit code, stdout).
pub fn genaug(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("genaug").chain(args.iter().copied());
    let code = genaug_cli::run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

pub fn write_config(path: &Path, synthetic: &Path, real: &Path, output: &Path, extra: serde_json::Value) {
    let mut cfg = serde_json::json!({
        "synthetic_dir": synthetic,
        "real_dir": real,
        "output_dir": output,
    });
    for (k, v) in extra.as_object().unwrap() {
        cfg[k] = v.clone();
    }
    std::fs::write(path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
}
