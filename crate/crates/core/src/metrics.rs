//! The two fitness metrics and rank correlation.
//!
//! `mean_feature_variance` is the mean over feature points of the population
//! variance (divisor N). `mean_wasserstein1` is the mean over feature points of
//! the 1-D Wasserstein-1 distance between the two empirical distributions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("feature dimensions differ: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("correlation undefined: {0}")]
    CorrelationUndefined(&'static str),
}

/// Fitness of one policy: variance to maximize, distance to minimize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPair {
    pub variance: f64,
    pub distance: f64,
}

impl MetricPair {
    pub fn new(variance: f64, distance: f64) -> Self {
        Self { variance, distance }
    }

    /// At least as good in both objectives and strictly better in one.
    pub fn dominates(&self, other: &MetricPair) -> bool {
        self.variance >= other.variance
            && self.distance <= other.distance
            && (self.variance > other.variance || self.distance < other.distance)
    }
}

pub fn mean_feature_variance(features: &FeatureMatrix) -> Result<f64, MetricError> {
    let n = features.rows();
    if n < 2 {
        return Err(MetricError::InsufficientSamples { needed: 2, got: n });
    }
    let d = features.cols();
    let mut mean = vec![0.0; d];
    for row in features.iter_rows() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut ss = vec![0.0; d];
    for row in features.iter_rows() {
        for ((s, &m), &v) in ss.iter_mut().zip(&mean).zip(row) {
            *s += (v - m) * (v - m);
        }
    }
    Ok(ss.iter().map(|s| s / n as f64).sum::<f64>() / d as f64)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// W1 between two sorted samples.
fn wasserstein1_sorted(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == b.len() {
        let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
        return sum / a.len() as f64;
    }
    wasserstein1_sorted_merge(a, b)
}

/// Integral of |F_a - F_b| by walking the merged sorted samples.
pub(crate) fn wasserstein1_sorted_merge(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = a[0].min(b[0]);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i] <= b[j]);
        let x = if take_a { a[i] } else { b[j] };
        total += (i as f64 / na - j as f64 / nb).abs() * (x - prev);
        prev = x;
        if take_a {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

/// Wasserstein-1 distance between the empirical distributions of `a` and `b`.
pub fn wasserstein1_1d(a: &[f64], b: &[f64]) -> Result<f64, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::InsufficientSamples { needed: 1, got: 0 });
    }
    Ok(wasserstein1_sorted(&sorted(a), &sorted(b)))
}

/// Per-feature W1 averaged over all feature points. Columns are sorted once and
/// processed in parallel; the reduction runs in column order.
pub fn mean_wasserstein1(synthetic: &FeatureMatrix, real: &FeatureMatrix) -> Result<f64, MetricError> {
    if synthetic.cols() != real.cols() {
        return Err(MetricError::ShapeMismatch(synthetic.cols(), real.cols()));
    }
    let (sc, rc) = (synthetic.columns(), real.columns());
    let per_column: Vec<f64> = sc
        .par_iter()
        .zip(rc.par_iter())
        .map(|(s, r)| wasserstein1_sorted(&sorted(r), &sorted(s)))
        .collect();
    Ok(per_column.iter().sum::<f64>() / per_column.len() as f64)
}

/// Average (fractional) ranks, 1-based.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::CorrelationUndefined("length mismatch"));
    }
    if x.len() < 2 {
        return Err(MetricError::InsufficientSamples { needed: 2, got: x.len() });
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricError::CorrelationUndefined("constant input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
