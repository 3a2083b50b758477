use super::Genome;
use crate::metrics::MetricPair;

/// Mutually non-dominated evaluated genomes, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParetoArchive {
    entries: Vec<Genome>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[Genome] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merges `genomes`, keeping the non-dominated subset of the union.
    /// Entries equal in both policy and fitness are stored once.
    pub fn update<'a>(&mut self, genomes: impl IntoIterator<Item = &'a Genome>) {
        for g in genomes {
            let fit = g.expect_fitness();
            let rejected = self.entries.iter().any(|e| {
                let ef = e.expect_fitness();
                ef.dominates(&fit) || (ef == fit && e.policy == g.policy)
            });
            if rejected {
                continue;
            }
            self.entries.retain(|e| !fit.dominates(&e.expect_fitness()));
            self.entries.push(g.clone());
        }
    }

    pub fn min_distance(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.expect_fitness().distance).min_by(f64::total_cmp)
    }

    pub fn max_variance(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.expect_fitness().variance).max_by(f64::total_cmp)
    }

    /// Entry with the lowest distance; ties go to higher variance, then lower id.
    pub fn best_by_distance(&self) -> Option<&Genome> {
        self.entries.iter().min_by(|a, b| {
            let (fa, fb): (MetricPair, MetricPair) = (a.expect_fitness(), b.expect_fitness());
            fa.distance
                .total_cmp(&fb.distance)
                .then(fb.variance.total_cmp(&fa.variance))
                .then(a.id.cmp(&b.id))
        })
    }

    /// Entries ordered by distance ascending, then variance descending, then id.
    pub fn sorted(&self) -> Vec<&Genome> {
        let mut out: Vec<&Genome> = self.entries.iter().collect();
        out.sort_by(|a, b| {
            let (fa, fb) = (a.expect_fitness(), b.expect_fitness());
            fa.distance
                .total_cmp(&fb.distance)
                .then(fb.variance.total_cmp(&fa.variance))
                .then(a.id.cmp(&b.id))
        });
        out
    }
}
