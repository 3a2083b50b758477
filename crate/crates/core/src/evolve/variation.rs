//! Genome spawning, one-point crossover, and mutation.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::config::{ParentSelection, SearchConfig, MAX_GENOME_LEN};
use super::nsga2::rank_and_crowding;
use super::Genome;
use crate::augment::{Policy, Step};

const SPAWN_LENGTH_MEAN: f64 = 6.0;
const SPAWN_LENGTH_STD: f64 = 5.0;

/// Counts of which variation coins came up, for monitoring operator rates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VariationStats {
    pub children: usize,
    pub crossovers: usize,
    pub mutations: usize,
    pub elements_seen: usize,
    pub element_swaps: usize,
    pub additions: usize,
    pub removals: usize,
}

/// A length drawn from Normal(6, 5) truncated to `[lo, hi]` by rejection, then
/// truncated to an integer.
pub fn spawn_length<R: Rng + ?Sized>(bounds: [usize; 2], rng: &mut R) -> usize {
    let normal = Normal::new(SPAWN_LENGTH_MEAN, SPAWN_LENGTH_STD).expect("valid normal");
    let (lo, hi) = (bounds[0] as f64, bounds[1] as f64);
    loop {
        let x: f64 = normal.sample(rng);
        if (lo..=hi).contains(&x) {
            return x.floor() as usize;
        }
    }
}

pub fn random_policy<R: Rng + ?Sized>(cfg: &SearchConfig, rng: &mut R) -> Policy {
    let len = cfg.fixed_length.unwrap_or_else(|| spawn_length(cfg.length_bounds, rng));
    let steps = (0..len).map(|_| Step::random(cfg.strategy, rng)).collect();
    Policy::new(cfg.strategy, steps).expect("spawned lengths satisfy the strategy arity")
}

/// Cut points `(i, j)`: each parent keeps a non-empty head and gives a non-empty tail.
fn cut_points<R: Rng + ?Sized>(la: usize, lb: usize, equal: bool, rng: &mut R) -> (usize, usize) {
    if equal {
        let i = rng.random_range(1..la.min(lb));
        (i, i)
    } else {
        (rng.random_range(1..la), rng.random_range(1..lb))
    }
}

/// Splices `a[..i] + b[j..]` and `b[..j] + a[i..]`.
pub fn splice(a: &[Step], b: &[Step], i: usize, j: usize) -> (Vec<Step>, Vec<Step>) {
    let c1 = a[..i].iter().chain(&b[j..]).copied().collect();
    let c2 = b[..j].iter().chain(&a[i..]).copied().collect();
    (c1, c2)
}

/// One-point crossover. Parents shorter than 2 are returned unchanged. With a
/// fixed length both cuts coincide so children keep the parents' length.
pub fn crossover_one_point<R: Rng + ?Sized>(
    a: &Policy,
    b: &Policy,
    cfg: &SearchConfig,
    rng: &mut R,
) -> (Policy, Policy) {
    if a.len() < 2 || b.len() < 2 {
        return (a.clone(), b.clone());
    }
    let (i, j) = cut_points(a.len(), b.len(), cfg.fixed_length.is_some(), rng);
    let (c1, c2) = splice(a.steps(), b.steps(), i, j);
    // Every child has at least one head and one tail element, so length >= 2.
    let rebuild = |steps| Policy::new(a.strategy(), steps).expect("crossover children keep arity");
    (rebuild(c1), rebuild(c2))
}

/// Swaps each element with probability `per_element_swap_prob`; for variable
/// lengths, independently appends and removes one element with their own
/// probabilities, keeping the length within `[strategy minimum, 32]`.
pub fn mutate<R: Rng + ?Sized>(
    policy: &Policy,
    cfg: &SearchConfig,
    rng: &mut R,
    stats: &mut VariationStats,
) -> Policy {
    let strategy = policy.strategy();
    let mut steps = policy.steps().to_vec();
    for step in steps.iter_mut() {
        stats.elements_seen += 1;
        if rng.random::<f64>() < cfg.per_element_swap_prob {
            *step = Step::random(strategy, rng);
            stats.element_swaps += 1;
        }
    }
    if cfg.fixed_length.is_none() {
        if rng.random::<f64>() < cfg.add_prob {
            stats.additions += 1;
            let fresh = Step::random(strategy, rng);
            if steps.len() < MAX_GENOME_LEN {
                steps.push(fresh);
            }
        }
        if rng.random::<f64>() < cfg.remove_prob {
            stats.removals += 1;
            let idx = rng.random_range(0..steps.len());
            if steps.len() > cfg.min_len() {
                steps.remove(idx);
            }
        }
    }
    Policy::new(strategy, steps).expect("mutation keeps arity")
}

fn pick_parent<'p, R: Rng + ?Sized>(
    population: &'p [Genome],
    ranks: &[(usize, f64)],
    selection: ParentSelection,
    rng: &mut R,
) -> &'p Genome {
    let a = rng.random_range(0..population.len());
    if selection == ParentSelection::Uniform {
        return &population[a];
    }
    let b = rng.random_range(0..population.len());
    let key = |i: usize| (ranks[i].0, ranks[i].1, population[i].id);
    let ((ra, ca, ia), (rb, cb, ib)) = (key(a), key(b));
    let a_wins = ra.cmp(&rb).then(cb.total_cmp(&ca)).then(ia.cmp(&ib)).is_le();
    &population[if a_wins { a } else { b }]
}

/// Produces `offspring_size` child policies. Each slot is a one-point
/// crossover of two parents (first child kept) with probability
/// `crossover_prob`, else a parent clone; then mutated with probability
/// `mutation_prob`. Tournament selection needs an evaluated population.
pub fn breed<R: Rng + ?Sized>(
    population: &[Genome],
    cfg: &SearchConfig,
    rng: &mut R,
    stats: &mut VariationStats,
) -> Vec<Policy> {
    let ranks = match cfg.parent_selection {
        ParentSelection::Uniform => Vec::new(),
        ParentSelection::Tournament => rank_and_crowding(population),
    };
    let sel = cfg.parent_selection;
    (0..cfg.offspring_size)
        .map(|_| {
            stats.children += 1;
            let mut policy = if rng.random::<f64>() < cfg.crossover_prob {
                stats.crossovers += 1;
                let a = pick_parent(population, &ranks, sel, rng);
                let b = pick_parent(population, &ranks, sel, rng);
                crossover_one_point(&a.policy, &b.policy, cfg, rng).0
            } else {
                pick_parent(population, &ranks, sel, rng).policy.clone()
            };
            if rng.random::<f64>() < cfg.mutation_prob {
                stats.mutations += 1;
                policy = mutate(&policy, cfg, rng, stats);
            }
            policy
        })
        .collect()
}
