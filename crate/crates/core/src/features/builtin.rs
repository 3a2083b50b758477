//! A deterministic hand-crafted extractor: colour statistics and edge energy
//! on a coarse grid.

use crate::dataset::resize_exact;
use crate::image::Image;

pub const SIDE: u32 = 64;
pub const GRID: usize = 8;
const CELL: usize = SIDE as usize / GRID;
/// 8x8 cells x 3 channels x (mean, std) + 8x8 gradient cells.
pub const DIM: usize = GRID * GRID * 3 * 2 + GRID * GRID;

pub fn extract(img: &Image) -> Vec<f64> {
    let img = resize_exact(img, SIDE, SIDE);
    let side = SIDE as usize;
    let px: Vec<f64> = img.data().iter().map(|&v| v as f64 / 255.0).collect();
    let mut out = Vec::with_capacity(DIM);

    let n = (CELL * CELL) as f64;
    for gy in 0..GRID {
        for gx in 0..GRID {
            for c in 0..3 {
                let mut sum = 0.0;
                let mut sq = 0.0;
                for y in gy * CELL..(gy + 1) * CELL {
                    for x in gx * CELL..(gx + 1) * CELL {
                        let v = px[(y * side + x) * 3 + c];
                        sum += v;
                        sq += v * v;
                    }
                }
                let mean = sum / n;
                out.push(mean);
                out.push((sq / n - mean * mean).max(0.0).sqrt());
            }
        }
    }

    let lum: Vec<f64> = px.chunks_exact(3).map(|p| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]).collect();
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, side as isize - 1) as usize;
        let y = y.clamp(0, side as isize - 1) as usize;
        lum[y * side + x]
    };
    for gy in 0..GRID {
        for gx in 0..GRID {
            let mut sum = 0.0;
            for y in gy * CELL..(gy + 1) * CELL {
                for x in gx * CELL..(gx + 1) * CELL {
                    let (x, y) = (x as isize, y as isize);
                    let dx = at(x + 1, y) - at(x - 1, y);
                    let dy = at(x, y + 1) - at(x, y - 1);
                    sum += (dx * dx + dy * dy).sqrt();
                }
            }
            out.push(sum / n);
        }
    }
    debug_assert_eq!(out.len(), DIM);
    out
}
