//! Binary-chromosome genetic algorithm: roulette-wheel reproduction,
//! single-point crossover, per-bit mutation, optional elitism.
//!
//! All stochastic draws come from one seeded stream, consumed per pair in a
//! fixed order: parent 1, parent 2, crossover decision, crossover cut (only
//! when crossing), then one draw per maskable locus of child 1, then child 2.
//! Objective evaluation never touches the stream, so evaluating in parallel
//! gives the same run as evaluating serially.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::NodeId;
use crate::simulate::ForcingSet;

/// Objective values closer than this are ties; ties go to the chromosome
/// with fewer set bits, then the lexicographically lowest one.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_POPULATION: usize = 30;
pub const DEFAULT_CROSSOVER: f64 = 0.8;
pub const DEFAULT_MUTATION: f64 = 0.03;
pub const DEFAULT_GENERATIONS: usize = 400;
pub const DEFAULT_STAGNATION: usize = 50;

pub type Rng64 = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bit `k` (0-based) selects node `k + 1` for forcing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome {
    pub bits: Vec<bool>,
}

impl Chromosome {
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn from_nodes(len: usize, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut c = Self::zeros(len);
        for n in nodes {
            c.bits[n.index()] = true;
        }
        c
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn respects_mask(&self, mask: &[bool]) -> bool {
        self.bits.iter().zip(mask).all(|(b, m)| !*b || *m)
    }
}

/// Groups of four bits separated by spaces.
impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 && i % 4 == 0 {
                f.write_str(" ")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Chromosome {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit `{other}`")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(|bits| Chromosome { bits })
    }
}

pub fn decode(c: &Chromosome) -> ForcingSet {
    c.bits
        .iter()
        .enumerate()
        .filter(|(_, b)| **b)
        .map(|(k, _)| NodeId::from_index(k))
        .collect()
}

/// `f = 1 / (1 + J)`
pub fn fitness(objective: f64) -> Result<f64> {
    if !(objective >= 0.0) {
        return Err(Error::Objective(format!(
            "objective must be >= 0, got {objective}"
        )));
    }
    Ok(1.0 / (1.0 + objective))
}

/// Orders candidates best first: lower objective, with near-ties broken by
/// fewer forced nodes and then the lower bit pattern.
pub fn compare_candidates(a_obj: f64, a: &Chromosome, b_obj: f64, b: &Chromosome) -> Ordering {
    if a_obj < b_obj - TIE_TOLERANCE {
        Ordering::Less
    } else if a_obj > b_obj + TIE_TOLERANCE {
        Ordering::Greater
    } else {
        a.count_ones()
            .cmp(&b.count_ones())
            .then_with(|| a.bits.cmp(&b.bits))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub max_generations: usize,
    pub seed: u64,
    pub elitism: bool,
    /// Loci that may be set; all others stay 0.
    pub measurable_mask: Vec<bool>,
    /// Stop after this many generations without an objective improvement
    /// larger than [`TIE_TOLERANCE`].
    pub stagnation_generations: usize,
    /// Evaluate new chromosomes of a generation on the rayon pool.
    pub parallel: bool,
}

impl GaConfig {
    pub fn new(measurable_mask: Vec<bool>) -> Self {
        Self {
            population_size: DEFAULT_POPULATION,
            crossover_probability: DEFAULT_CROSSOVER,
            mutation_probability: DEFAULT_MUTATION,
            max_generations: DEFAULT_GENERATIONS,
            seed: 0,
            elitism: true,
            measurable_mask,
            stagnation_generations: DEFAULT_STAGNATION,
            parallel: false,
        }
    }

    pub fn chromosome_len(&self) -> usize {
        self.measurable_mask.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 || self.population_size % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "population size must be even and >= 2, got {}",
                self.population_size
            )));
        }
        for (name, p) in [
            ("crossover probability", self.crossover_probability),
            ("mutation probability", self.mutation_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if self.measurable_mask.is_empty() {
            return Err(Error::InvalidConfig("chromosome length is zero".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredIndividual {
    pub chromosome: Chromosome,
    /// Objective J, °C².
    pub objective: f64,
    pub fitness: f64,
}

impl ScoredIndividual {
    pub fn new(chromosome: Chromosome, objective: f64) -> Result<Self> {
        Ok(Self {
            fitness: fitness(objective)?,
            chromosome,
            objective,
        })
    }

    fn cmp_quality(&self, other: &Self) -> Ordering {
        compare_candidates(self.objective, &self.chromosome, other.objective, &other.chromosome)
    }
}

fn best_of(pop: &[ScoredIndividual]) -> &ScoredIndividual {
    pop.iter()
        .min_by(|a, b| a.cmp_quality(b))
        .expect("population is never empty")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_objective: f64,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best: Chromosome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxGenerations,
    Stagnation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaHistory {
    /// Generation 0 is the random initial population.
    pub generations: Vec<GenerationStats>,
    /// Distinct chromosomes handed to the evaluator.
    pub evaluations: usize,
    pub stop: StopReason,
}

impl GaHistory {
    /// Number of evolution steps performed.
    pub fn generation_count(&self) -> usize {
        self.generations.len() - 1
    }
}

/// Fitness-proportionate pick; consumes exactly one draw.
pub fn select_roulette<R: Rng + ?Sized>(pop: &[ScoredIndividual], rng: &mut R) -> Result<usize> {
    if pop.is_empty() {
        return Err(Error::InvalidConfig("cannot select from an empty population".into()));
    }
    if let Some(bad) = pop.iter().find(|s| !(s.fitness > 0.0)) {
        return Err(Error::Objective(format!("non-positive fitness {}", bad.fitness)));
    }
    let total: f64 = pop.iter().map(|s| s.fitness).sum();
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, s) in pop.iter().enumerate() {
        acc += s.fitness;
        if target < acc {
            return Ok(i);
        }
    }
    Ok(pop.len() - 1)
}

/// Single-point crossover with probability `pc`; otherwise the parents are
/// copied. The cut `k` is uniform in `[1, L−1]` and gives
/// `c1 = p1[..k] ++ p2[k..]`.
pub fn crossover<R: Rng + ?Sized>(
    p1: &Chromosome,
    p2: &Chromosome,
    pc: f64,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome)> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch {
            what: "crossover parents",
            left: p1.len(),
            right: p2.len(),
        });
    }
    let cross = rng.gen::<f64>() < pc;
    let len = p1.len();
    if !cross || len < 2 {
        return Ok((p1.clone(), p2.clone()));
    }
    let cut = rng.gen_range(1..len);
    Ok(crossover_at(p1, p2, cut))
}

pub fn crossover_at(p1: &Chromosome, p2: &Chromosome, cut: usize) -> (Chromosome, Chromosome) {
    let join = |a: &Chromosome, b: &Chromosome| Chromosome {
        bits: a.bits[..cut].iter().chain(&b.bits[cut..]).copied().collect(),
    };
    (join(p1, p2), join(p2, p1))
}

/// Flips each maskable bit with probability `pm` (one draw per maskable
/// locus), then clears every non-maskable locus.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, pm: f64, rng: &mut R, mask: &[bool]) -> Chromosome {
    let bits = c
        .bits
        .iter()
        .zip(mask)
        .map(|(&bit, &maskable)| {
            if !maskable {
                return false;
            }
            if rng.gen::<f64>() < pm {
                !bit
            } else {
                bit
            }
        })
        .collect();
    Chromosome { bits }
}

pub fn random_chromosome<R: Rng + ?Sized>(mask: &[bool], rng: &mut R) -> Chromosome {
    Chromosome {
        bits: mask.iter().map(|&m| m && rng.gen::<bool>()).collect(),
    }
}

/// Breeds one generation. `score` maps a batch of children to objectives.
pub fn evolve<R, S>(
    parents: &[ScoredIndividual],
    config: &GaConfig,
    rng: &mut R,
    score: &mut S,
) -> Result<Vec<ScoredIndividual>>
where
    R: Rng + ?Sized,
    S: FnMut(&[Chromosome]) -> Result<Vec<f64>>,
{
    let mut children = Vec::with_capacity(config.population_size);
    while children.len() < config.population_size {
        let a = select_roulette(parents, rng)?;
        let b = select_roulette(parents, rng)?;
        let (c1, c2) = crossover(
            &parents[a].chromosome,
            &parents[b].chromosome,
            config.crossover_probability,
            rng,
        )?;
        children.push(mutate(&c1, config.mutation_probability, rng, &config.measurable_mask));
        children.push(mutate(&c2, config.mutation_probability, rng, &config.measurable_mask));
    }
    children.truncate(config.population_size);

    let objectives = score(&children)?;
    let mut scored = children
        .into_iter()
        .zip(objectives)
        .map(|(c, j)| ScoredIndividual::new(c, j))
        .collect::<Result<Vec<_>>>()?;

    if config.elitism {
        let elite = best_of(parents).clone();
        let worst = scored
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.cmp_quality(b))
            .map(|(i, _)| i)
            .expect("population is never empty");
        scored[worst] = elite;
    }
    Ok(scored)
}

/// Memoizing evaluator front end.
struct Scorer<'a, F> {
    evaluator: &'a F,
    cache: HashMap<Chromosome, f64>,
    parallel: bool,
}

impl<F> Scorer<'_, F>
where
    F: Fn(&Chromosome) -> Result<f64> + Sync,
{
    fn score(&mut self, batch: &[Chromosome]) -> Result<Vec<f64>> {
        let mut fresh: Vec<&Chromosome> = Vec::new();
        for c in batch {
            if !self.cache.contains_key(c) && !fresh.contains(&c) {
                fresh.push(c);
            }
        }
        let eval = |c: &&Chromosome| (self.evaluator)(c);
        let results: Vec<Result<f64>> = if self.parallel {
            fresh.par_iter().map(eval).collect()
        } else {
            fresh.iter().map(eval).collect()
        };
        for (c, r) in fresh.into_iter().zip(results) {
            let j = r.map_err(|e| Error::Evaluator {
                chromosome: c.to_string(),
                source: Box::new(e),
            })?;
            if !(j >= 0.0) {
                return Err(Error::Evaluator {
                    chromosome: c.to_string(),
                    source: Box::new(Error::Objective(format!("invalid objective {j}"))),
                });
            }
            self.cache.insert(c.clone(), j);
        }
        Ok(batch.iter().map(|c| self.cache[c]).collect())
    }
}

fn generation_stats(generation: usize, pop: &[ScoredIndividual]) -> GenerationStats {
    let best = best_of(pop);
    GenerationStats {
        generation,
        best_objective: best.objective,
        best_fitness: best.fitness,
        mean_fitness: pop.iter().map(|s| s.fitness).sum::<f64>() / pop.len() as f64,
        best: best.chromosome.clone(),
    }
}

/// Runs the GA to the generation cap or until stagnation.
pub fn run_ga<F>(config: &GaConfig, evaluator: &F) -> Result<(ScoredIndividual, GaHistory)>
where
    F: Fn(&Chromosome) -> Result<f64> + Sync,
{
    config.validate()?;
    let mut rng = seeded_rng(config.seed);
    let mut scorer = Scorer {
        evaluator,
        cache: HashMap::new(),
        parallel: config.parallel,
    };

    let initial: Vec<Chromosome> = (0..config.population_size)
        .map(|_| random_chromosome(&config.measurable_mask, &mut rng))
        .collect();
    let objectives = scorer.score(&initial)?;
    let mut population = initial
        .into_iter()
        .zip(objectives)
        .map(|(c, j)| ScoredIndividual::new(c, j))
        .collect::<Result<Vec<_>>>()?;

    let mut generations = vec![generation_stats(0, &population)];
    let mut best = best_of(&population).clone();
    let mut stagnant = 0;
    let mut stop = StopReason::MaxGenerations;

    for g in 1..=config.max_generations {
        population = evolve(&population, config, &mut rng, &mut |batch: &[Chromosome]| {
            scorer.score(batch)
        })?;
        generations.push(generation_stats(g, &population));
        let candidate = best_of(&population);
        if candidate.objective < best.objective - TIE_TOLERANCE {
            best = candidate.clone();
            stagnant = 0;
        } else {
            if candidate.cmp_quality(&best) == Ordering::Less {
                best = candidate.clone();
            }
            stagnant += 1;
        }
        if stagnant >= config.stagnation_generations {
            stop = StopReason::Stagnation;
            break;
        }
    }

    let history = GaHistory {
        generations,
        evaluations: scorer.cache.len(),
        stop,
    };
    Ok((best, history))
}
