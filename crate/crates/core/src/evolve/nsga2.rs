//! Non-dominated sorting, crowding distance, and environmental selection.
//! Objectives: maximize variance, minimize distance.

use std::cmp::Ordering;

use super::{EvolveError, Genome};
use crate::metrics::MetricPair;

/// Fronts of indices into `fits`, best first; indices ascend within each front.
pub fn fast_non_dominated_sort(fits: &[MetricPair]) -> Vec<Vec<usize>> {
    let n = fits.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            if fits[p].dominates(&fits[q]) {
                dominated_by_me[p].push(q);
                domination_count[q] += 1;
            } else if fits[q].dominates(&fits[p]) {
                dominated_by_me[q].push(p);
                domination_count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_by_me[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Objective ranges `(variance, distance)` over all of `fits`.
pub fn objective_ranges(fits: &[MetricPair]) -> (f64, f64) {
    let span = |f: fn(&MetricPair) -> f64| {
        let (lo, hi) = fits.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if fits.is_empty() { 0.0 } else { hi - lo }
    };
    (span(|m| m.variance), span(|m| m.distance))
}

/// Crowding distance of each member of `front` (indices into `fits`), with
/// per-objective gaps divided by the given range. Extremes of each objective
/// get +inf; an objective with zero range contributes nothing. Ties in an
/// objective are ordered by `ids`.
pub fn crowding_distance(fits: &[MetricPair], ids: &[u64], front: &[usize], ranges: (f64, f64)) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    let objectives: [(fn(&MetricPair) -> f64, f64); 2] = [(|f| f.variance, ranges.0), (|f| f.distance, ranges.1)];
    for (value, range) in objectives {
        if range <= 0.0 {
            continue;
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            value(&fits[front[a]])
                .total_cmp(&value(&fits[front[b]]))
                .then(ids[front[a]].cmp(&ids[front[b]]))
        });
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        for w in 1..m.saturating_sub(1) {
            let gap = value(&fits[front[order[w + 1]]]) - value(&fits[front[order[w - 1]]]);
            dist[order[w]] += gap / range;
        }
    }
    dist
}

/// Orders by crowding descending, then id ascending.
fn crowded_cmp(ca: f64, ida: u64, cb: f64, idb: u64) -> Ordering {
    cb.total_cmp(&ca).then(ida.cmp(&idb))
}

/// Per-member (front rank, crowding distance) for binary tournaments.
pub fn rank_and_crowding(genomes: &[Genome]) -> Vec<(usize, f64)> {
    let fits: Vec<MetricPair> = genomes.iter().map(Genome::expect_fitness).collect();
    let ids: Vec<u64> = genomes.iter().map(|g| g.id).collect();
    let ranges = objective_ranges(&fits);
    let mut out = vec![(0, 0.0); genomes.len()];
    for (rank, front) in fast_non_dominated_sort(&fits).iter().enumerate() {
        for (&i, c) in front.iter().zip(crowding_distance(&fits, &ids, front, ranges)) {
            out[i] = (rank, c);
        }
    }
    out
}

/// Indices of the `k` members chosen by NSGA-II environmental selection, in
/// selection order: whole fronts first, then the boundary front by crowding.
pub fn select_indices(fits: &[MetricPair], ids: &[u64], k: usize) -> Result<Vec<usize>, EvolveError> {
    if fits.len() < k {
        return Err(EvolveError::SelectionUnderflow { needed: k, got: fits.len() });
    }
    let ranges = objective_ranges(fits);
    let mut chosen = Vec::with_capacity(k);
    for front in fast_non_dominated_sort(fits) {
        if chosen.len() == k {
            break;
        }
        let crowd = crowding_distance(fits, ids, &front, ranges);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| crowded_cmp(crowd[a], ids[front[a]], crowd[b], ids[front[b]]));
        let take = (k - chosen.len()).min(front.len());
        chosen.extend(order[..take].iter().map(|&o| front[o]));
    }
    Ok(chosen)
}

/// Selects `k` genomes from an evaluated pool.
pub fn nsga2_select(pool: Vec<Genome>, k: usize) -> Result<Vec<Genome>, EvolveError> {
    let fits: Vec<MetricPair> = pool.iter().map(Genome::expect_fitness).collect();
    let ids: Vec<u64> = pool.iter().map(|g| g.id).collect();
    let chosen = select_indices(&fits, &ids, k)?;
    let mut slots: Vec<Option<Genome>> = pool.into_iter().map(Some).collect();
    Ok(chosen.into_iter().map(|i| slots[i].take().expect("index chosen once")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mp(v: f64, d: f64) -> MetricPair {
        MetricPair::new(v, d)
    }

    #[test]
    fn two_incomparable_points() {
        let fits = [mp(2.0, 1.0), mp(1.0, 2.0)];
        assert_eq!(select_indices(&fits, &[0, 1], 2).unwrap().len(), 2);
    }

    #[test]
    fn dominated_point_left_out() {
        // Second coordinate negated: distance is minimized.
        let fits = [mp(2.0, -1.0), mp(1.0, -2.0), mp(1.5, -1.5), mp(1.0, -1.0)];
        let fronts = fast_non_dominated_sort(&fits);
        assert_eq!(fronts, vec![vec![0, 1, 2], vec![3]]);
        let mut sel = select_indices(&fits, &[0, 1, 2, 3], 3).unwrap();
        sel.sort();
        assert_eq!(sel, vec![0, 1, 2]);
    }

    #[test]
    fn lower_distance_dominates() {
        let fits = [mp(2.0, 1.0), mp(1.0, 2.0)];
        assert_eq!(fast_non_dominated_sort(&fits), vec![vec![0], vec![1]]);
    }

    #[test]
    fn underflow() {
        let err = select_indices(&[mp(1.0, 1.0)], &[0], 2).unwrap_err();
        assert!(matches!(err, EvolveError::SelectionUnderflow { needed: 2, got: 1 }));
    }

    #[test]
    fn crowding_boundaries_and_interior() {
        let fits = [mp(0.0, 0.0), mp(1.0, 1.0), mp(3.0, 3.0), mp(4.0, 4.0)];
        let ids = [0, 1, 2, 3];
        let c = crowding_distance(&fits, &ids, &[0, 1, 2, 3], objective_ranges(&fits));
        assert!(c[0].is_infinite() && c[3].is_infinite());
        // Each objective contributes (3 - 0) / 4 for point 1 and (4 - 1) / 4 for point 2.
        assert!((c[1] - 1.5).abs() < 1e-12 && (c[2] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_range_objective_ignored() {
        let fits = [mp(1.0, 0.0), mp(1.0, 0.0), mp(1.0, 0.0)];
        let c = crowding_distance(&fits, &[0, 1, 2], &[0, 1, 2], objective_ranges(&fits));
        assert_eq!(c, vec![0.0; 3]);
        // Equal crowding falls back to id order.
        assert_eq!(select_indices(&fits, &[5, 3, 4], 2).unwrap(), vec![1, 2]);
    }

    fn brute_first_front(fits: &[MetricPair]) -> Vec<usize> {
        (0..fits.len()).filter(|&i| !fits.iter().any(|f| f.dominates(&fits[i]))).collect()
    }

    proptest! {
        #[test]
        fn first_front_is_non_dominated_set(points in prop::collection::vec((0u8..20, 0u8..20), 1..200)) {
            let fits: Vec<MetricPair> = points.iter().map(|&(v, d)| mp(v as f64, d as f64)).collect();
            let fronts = fast_non_dominated_sort(&fits);
            prop_assert_eq!(&fronts[0], &brute_first_front(&fits));
            prop_assert_eq!(fronts.iter().map(Vec::len).sum::<usize>(), fits.len());
        }

        #[test]
        fn selection_is_a_subset(points in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..100), frac in 0.0f64..1.0) {
            let fits: Vec<MetricPair> = points.iter().map(|&(v, d)| mp(v, d)).collect();
            let ids: Vec<u64> = (0..fits.len() as u64).collect();
            let k = ((fits.len() as f64) * frac) as usize;
            let sel = select_indices(&fits, &ids, k).unwrap();
            let mut uniq = sel.clone();
            uniq.sort();
            uniq.dedup();
            prop_assert_eq!(uniq.len(), k);
            prop_assert!(sel.iter().all(|&i| i < fits.len()));
        }
    }
}
