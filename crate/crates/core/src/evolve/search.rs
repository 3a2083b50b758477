use std::sync::Arc;

use rayon::prelude::*;

use super::config::SearchConfig;
use super::nsga2::nsga2_select;
use super::variation::{breed, random_policy, VariationStats};
use super::{EvolveError, Genome, ParetoArchive};
use crate::augment::Policy;
use crate::dataset::{sample_indices, ImageSource};
use crate::features::{cache_real_features, FeatureExtractor, FeatureMatrix};
use crate::image::Image;
use crate::metrics::{mean_feature_variance, mean_wasserstein1, MetricPair};
use crate::rng::{self, StreamRng};

const SYNTHETIC_SAMPLE_STREAM: u64 = 0x7379_6e74;
const VARIATION_STREAM: u64 = 0x6576_6f6c;
/// Genome augmentation streams live above every fixed stream key.
const GENOME_STREAM_BASE: u64 = 1 << 32;

/// Population summary after one generation's selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub var_min: f64,
    pub var_mean: f64,
    pub var_max: f64,
    pub dist_min: f64,
    pub dist_mean: f64,
    pub dist_max: f64,
    pub mean_length: f64,
}

impl GenerationRecord {
    pub fn summarize(generation: usize, population: &[Genome]) -> Self {
        let n = population.len() as f64;
        let stats = |f: fn(&MetricPair) -> f64| {
            let vals = population.iter().map(|g| f(&g.expect_fitness()));
            let (lo, hi, sum) = vals.fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), v| {
                (lo.min(v), hi.max(v), s + v)
            });
            // Summation rounding can push the mean a hair outside [lo, hi].
            (lo, (sum / n).clamp(lo, hi), hi)
        };
        let (var_min, var_mean, var_max) = stats(|m| m.variance);
        let (dist_min, dist_mean, dist_max) = stats(|m| m.distance);
        let mean_length = population.iter().map(|g| g.policy.len() as f64).sum::<f64>() / n;
        Self { generation, var_min, var_mean, var_max, dist_min, dist_mean, dist_max, mean_length }
    }
}

/// Fixed evaluation inputs shared by every genome of a run.
pub struct EvalContext<'a> {
    synthetic: Vec<Image>,
    real: Arc<FeatureMatrix>,
    extractor: &'a FeatureExtractor,
    seed: u64,
}

impl<'a> EvalContext<'a> {
    /// Draws `eval_samples` synthetic images and extracts features of
    /// `real_samples` real images, both from streams of `seed`.
    pub fn prepare(
        synthetic: &ImageSource,
        real: &ImageSource,
        extractor: &'a FeatureExtractor,
        eval_samples: usize,
        real_samples: usize,
        seed: u64,
    ) -> Result<Self, EvolveError> {
        let real = Arc::new(cache_real_features(real, extractor, real_samples, seed)?);
        Self::with_real_features(synthetic, real, extractor, eval_samples, seed)
    }

    /// As `prepare`, reusing already-extracted real features.
    pub fn with_real_features(
        synthetic: &ImageSource,
        real: Arc<FeatureMatrix>,
        extractor: &'a FeatureExtractor,
        eval_samples: usize,
        seed: u64,
    ) -> Result<Self, EvolveError> {
        let mut r = rng::stream(seed, SYNTHETIC_SAMPLE_STREAM);
        let indices = sample_indices(synthetic.len(), eval_samples, &mut r);
        let synthetic = synthetic.load(&indices)?;
        Ok(Self { synthetic, real, extractor, seed })
    }

    pub fn real_features(&self) -> &FeatureMatrix {
        &self.real
    }

    /// Fitness of `policy` applied once to every evaluation image, with
    /// augmentation randomness drawn from the stream of `genome_id`.
    pub fn evaluate(&self, policy: &Policy, genome_id: u64) -> Result<MetricPair, EvolveError> {
        let mut parent = rng::stream(self.seed, GENOME_STREAM_BASE + genome_id);
        let image_rngs: Vec<StreamRng> = (0..self.synthetic.len()).map(|_| rng::fork(&mut parent)).collect();
        let rows = self
            .synthetic
            .par_iter()
            .zip(image_rngs)
            .map(|(img, mut r)| self.extractor.extract(&policy.apply(img, &mut r)))
            .collect::<Result<Vec<_>, _>>()?;
        self.score(&FeatureMatrix::from_rows(&rows).map_err(crate::features::FeatureError::from)?)
    }

    /// Fitness of the unaugmented evaluation images.
    pub fn baseline(&self) -> Result<MetricPair, EvolveError> {
        let features = self.extractor.extract_batch(&self.synthetic)?;
        self.score(&features)
    }

    fn score(&self, features: &FeatureMatrix) -> Result<MetricPair, EvolveError> {
        Ok(MetricPair::new(mean_feature_variance(features)?, mean_wasserstein1(features, &self.real)?))
    }
}

pub struct SearchOutcome {
    pub archive: ParetoArchive,
    pub history: Vec<GenerationRecord>,
    pub final_genome: Genome,
    pub baseline: MetricPair,
    pub variation: VariationStats,
    /// Archive (max variance, min distance) after each generation.
    pub archive_trace: Vec<MetricPair>,
}

struct Search<'c, 'a> {
    ctx: &'c EvalContext<'a>,
    rng: StreamRng,
    next_id: u64,
    stats: VariationStats,
}

impl Search<'_, '_> {
    fn fresh(&mut self, policy: Policy) -> Genome {
        let g = Genome::new(self.next_id, policy);
        self.next_id += 1;
        g
    }

    fn evaluate_all(&self, genomes: &mut [Genome]) -> Result<(), EvolveError> {
        let fits = genomes
            .par_iter()
            .map(|g| self.ctx.evaluate(&g.policy, g.id))
            .collect::<Result<Vec<_>, _>>()?;
        for (g, f) in genomes.iter_mut().zip(fits) {
            g.fitness = Some(f);
        }
        Ok(())
    }
}

/// Runs the full search. `workers` caps evaluation threads (`None` uses all
/// cores); results do not depend on it.
pub fn run_search(
    cfg: &SearchConfig,
    ctx: &EvalContext<'_>,
    workers: Option<usize>,
) -> Result<SearchOutcome, EvolveError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| EvolveError::WorkerPool(e.to_string()))?;
    pool.install(|| search_loop(cfg, ctx))
}

fn search_loop(cfg: &SearchConfig, ctx: &EvalContext<'_>) -> Result<SearchOutcome, EvolveError> {
    let baseline = ctx.baseline()?;
    let mut s = Search { ctx, rng: rng::stream(cfg.seed, VARIATION_STREAM), next_id: 0, stats: VariationStats::default() };

    let mut population: Vec<Genome> = (0..cfg.population_size)
        .map(|_| {
            let p = random_policy(cfg, &mut s.rng);
            s.fresh(p)
        })
        .collect();
    s.evaluate_all(&mut population)?;
    let mut archive = ParetoArchive::new();
    archive.update(&population);

    let mut history = Vec::with_capacity(cfg.generations);
    let mut archive_trace = Vec::with_capacity(cfg.generations);
    for generation in 0..cfg.generations {
        let mut children: Vec<Genome> = breed(&population, cfg, &mut s.rng, &mut s.stats)
            .into_iter()
            .map(|p| s.fresh(p))
            .collect();
        s.evaluate_all(&mut children)?;
        archive.update(&children);
        population.extend(children);
        population = nsga2_select(population, cfg.population_size)?;
        let record = GenerationRecord::summarize(generation, &population);
        log::info!(
            "generation {generation}: distance min {:.5} mean {:.5}, variance max {:.5}, archive {}",
            record.dist_min,
            record.dist_mean,
            record.var_max,
            archive.len()
        );
        history.push(record);
        archive_trace.push(MetricPair::new(
            archive.max_variance().expect("archive non-empty"),
            archive.min_distance().expect("archive non-empty"),
        ));
    }

    let final_genome = archive.best_by_distance().expect("archive holds the evaluated population").clone();
    Ok(SearchOutcome { archive, history, final_genome, baseline, variation: s.stats, archive_trace })
}
