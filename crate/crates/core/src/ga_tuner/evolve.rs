//! Real-coded genetic search over `(kp, ki, kd)`.
//!
//! Tournament selection, blend (BLX-alpha) crossover, Gaussian mutation
//! clipped to the gene bounds and elitism. Each child of generation `g` at
//! slot `k` draws from its own ChaCha stream position, so the result does not
//! depend on how the population is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{ise, LocalLinearModel};
use crate::error::{config, Result};
use crate::fuzzy_pid::{bank, PidGains};

const WORDS_PER_INDIVIDUAL: u128 = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Mutation std-dev as a fraction of the gene range.
    pub mutation_scale: f64,
    pub elite: usize,
    pub tournament: usize,
    pub blend_alpha: f64,
    /// `[lo, hi]` for kp, ki and kd.
    pub bounds: [[f64; 2]; 3],
    /// Step-response horizon of the fitness, s.
    pub horizon: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        let max = |t: &bank::GainTable| t.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        Self {
            population: 48,
            generations: 60,
            crossover_rate: 0.9,
            mutation_rate: 0.25,
            mutation_scale: 0.1,
            elite: 2,
            tournament: 3,
            blend_alpha: 0.3,
            bounds: [
                [0.0, 4.0 * max(&bank::DEFAULT_KP)],
                [0.0, 4.0 * max(&bank::DEFAULT_KI)],
                [0.0, 4.0 * max(&bank::DEFAULT_KD)],
            ],
            horizon: 30.0,
            seed: 2024,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 || self.generations == 0 {
            return Err(config(
                "ga needs a population of at least 2 and one generation",
            ));
        }
        if self.elite >= self.population || self.tournament == 0 {
            return Err(config(
                "ga elite must be smaller than the population; tournament >= 1",
            ));
        }
        for r in [self.crossover_rate, self.mutation_rate] {
            if !(0.0..=1.0).contains(&r) {
                return Err(config("ga rates must lie in [0, 1]"));
            }
        }
        if !(self.mutation_scale >= 0.0 && self.blend_alpha >= 0.0) {
            return Err(config(
                "ga mutation scale and blend alpha must be nonnegative",
            ));
        }
        if self
            .bounds
            .iter()
            .any(|[lo, hi]| !(0.0 <= *lo && lo < hi && hi.is_finite()))
        {
            return Err(config("ga gene bounds must satisfy 0 <= lo < hi"));
        }
        if !(self.horizon > 0.0) {
            return Err(config("ga horizon must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Individual {
    pub genes: [f64; 3],
    pub ise: f64,
}

impl Individual {
    pub fn gains(&self) -> PidGains {
        PidGains::new(self.genes[0], self.genes[1], self.genes[2])
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub best: Individual,
    /// Best-so-far ISE after every generation, starting with the initial
    /// population.
    pub history: Vec<f64>,
    pub initial: Vec<Individual>,
}

fn stream(seed: u64, generation: usize, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(generation as u64);
    rng.set_word_pos(slot as u128 * WORDS_PER_INDIVIDUAL);
    rng
}

fn clip(genes: &mut [f64; 3], bounds: &[[f64; 2]; 3]) {
    for (g, [lo, hi]) in genes.iter_mut().zip(bounds) {
        *g = g.clamp(*lo, *hi);
    }
}

fn tournament<'a>(pop: &'a [Individual], size: usize, rng: &mut ChaCha8Rng) -> &'a Individual {
    (0..size)
        .map(|_| &pop[rng.random_range(0..pop.len())])
        .min_by(|a, b| a.ise.total_cmp(&b.ise))
        .expect("tournament size >= 1")
}

fn offspring(cfg: &GaConfig, pop: &[Individual], rng: &mut ChaCha8Rng) -> [f64; 3] {
    let a = tournament(pop, cfg.tournament, rng).genes;
    let b = tournament(pop, cfg.tournament, rng).genes;
    let mut child = a;
    if rng.random::<f64>() < cfg.crossover_rate {
        for k in 0..3 {
            let (lo, hi) = (a[k].min(b[k]), a[k].max(b[k]));
            let span = hi - lo;
            let t: f64 = rng.random();
            child[k] = lo - cfg.blend_alpha * span + t * (1.0 + 2.0 * cfg.blend_alpha) * span;
        }
    }
    for (k, gene) in child.iter_mut().enumerate() {
        if rng.random::<f64>() < cfg.mutation_rate {
            let [lo, hi] = cfg.bounds[k];
            let z: f64 = rng.sample(StandardNormal);
            *gene += z * cfg.mutation_scale * (hi - lo);
        }
    }
    clip(&mut child, &cfg.bounds);
    child
}

/// Minimizes the ISE of `model` over the gene bounds. Deterministic for a
/// fixed seed.
pub fn evolve(cfg: &GaConfig, model: &LocalLinearModel, t_c: f64) -> Result<Evolution> {
    cfg.validate()?;
    let score = |genes: [f64; 3]| Individual {
        genes,
        ise: ise(
            model,
            &PidGains::new(genes[0], genes[1], genes[2]),
            cfg.horizon,
            t_c,
        ),
    };

    let initial: Vec<Individual> = (0..cfg.population)
        .into_par_iter()
        .map(|slot| {
            let mut rng = stream(cfg.seed, 0, slot);
            let genes = std::array::from_fn(|k| {
                let [lo, hi] = cfg.bounds[k];
                rng.random_range(lo..=hi)
            });
            score(genes)
        })
        .collect();

    let best_of = |pop: &[Individual]| {
        *pop.iter()
            .min_by(|a, b| a.ise.total_cmp(&b.ise))
            .expect("population is not empty")
    };

    let mut pop = initial.clone();
    let mut best = best_of(&pop);
    let mut history = vec![best.ise];
    for generation in 1..=cfg.generations {
        let mut ranked = pop.clone();
        ranked.sort_by(|a, b| a.ise.total_cmp(&b.ise));
        let parents = &pop;
        let children: Vec<Individual> = (cfg.elite..cfg.population)
            .into_par_iter()
            .map(|slot| {
                let mut rng = stream(cfg.seed, generation, slot);
                score(offspring(cfg, parents, &mut rng))
            })
            .collect();
        let mut next: Vec<Individual> = ranked[..cfg.elite].to_vec();
        next.extend(children);
        pop = next;
        let gen_best = best_of(&pop);
        if gen_best.ise < best.ise {
            best = gen_best;
        }
        history.push(best.ise);
    }

    Ok(Evolution {
        best,
        history,
        initial,
    })
}
