//! Seeded derivative-free minimisation of the `l_4` distance ratio of `n + 2`
//! points in `R^n`.
//!
//! Each restart runs a Metropolis-style walk: every coordinate is perturbed by
//! an independent Gaussian step (optionally only a single coordinate), worse moves are accepted with probability
//! `exp(-delta / T)` where `delta` is the increase in `ln(ratio)`, and the
//! temperature cools geometrically per evaluation. Iterates are normalised
//! (centroid at the origin, minimum distance 1) so translation and scale do not
//! enter the walk. Restarts are independent and reduced by
//! `(ratio, restart index)`, so the result does not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::schuette_bound;
use crate::construct::build_configuration;
use crate::error::{Error, Result};
use crate::lpgeom::{distance_unchecked, Configuration};
use crate::sum::compensated_sum;

/// Random restarts added to the construction seed when seeds are [`Seeds::Auto`].
pub const AUTO_RANDOM_SEEDS: usize = 3;

/// Walk schedule. Defaults are fixed so runs are reproducible from a seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// Initial step as a fraction of the configuration diameter.
    pub initial_step: f64,
    /// Step multiplier applied after every `decay_every` accepted moves.
    pub step_decay: f64,
    pub decay_every: u64,
    /// Step multiplier applied after `stall_window` consecutive rejections.
    pub stall_decay: f64,
    pub stall_window: u64,
    /// Reheat from the best point once the step falls below this.
    pub min_step: f64,
    pub initial_temperature: f64,
    pub cooling: f64,
    /// Probability that a move perturbs every coordinate instead of a single one.
    pub full_move_prob: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            initial_step: 0.1,
            step_decay: 0.95,
            decay_every: 100,
            stall_decay: 0.7,
            stall_window: 30,
            min_step: 1e-8,
            initial_temperature: 1e-2,
            cooling: 0.997,
            full_move_prob: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Seeds {
    /// The two-block construction followed by uniform random points in `[-1, 1]^n`.
    Auto,
    Given(Vec<Configuration>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_config: Configuration,
    pub best_ratio: f64,
    pub bound: f64,
    pub gap: f64,
    pub restarts: u64,
    pub evaluations: u64,
    pub rng_seed: u64,
}

/// Per-restart seed derived from the run seed.
pub fn restart_seed(rng_seed: u64, restart: usize) -> u64 {
    // splitmix64 finaliser over a Weyl sequence
    let mut z = rng_seed.wrapping_add((restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Flat row-major coordinates of `m` points in `R^n`.
#[derive(Debug, Clone)]
struct Flat {
    m: usize,
    n: usize,
    x: Vec<f64>,
}

impl Flat {
    fn from_config(c: &Configuration) -> Self {
        Flat { m: c.len(), n: c.dim(), x: c.points().iter().flat_map(|p| p.coords().iter().copied()).collect() }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n..(i + 1) * self.n]
    }

    /// `(max, min)` pairwise `l_4` distance.
    fn extremes(&self) -> (f64, f64) {
        let mut max = 0.0_f64;
        let mut min = f64::INFINITY;
        for i in 0..self.m {
            for j in i + 1..self.m {
                let d = distance_unchecked(self.row(i), self.row(j), 4.0);
                max = max.max(d);
                min = min.min(d);
            }
        }
        (max, min)
    }

    /// Centroid to the origin, minimum distance to 1. Returns the ratio, or `None`
    /// when two points coincide.
    fn normalize(&mut self) -> Option<f64> {
        for d in 0..self.n {
            let c = compensated_sum((0..self.m).map(|i| self.x[i * self.n + d])) / self.m as f64;
            for i in 0..self.m {
                self.x[i * self.n + d] -= c;
            }
        }
        let (_, min) = self.extremes();
        if min <= 0.0 || !min.is_finite() {
            return None;
        }
        for v in self.x.iter_mut() {
            *v /= min;
        }
        let (max, min) = self.extremes();
        (min > 0.0).then(|| max / min)
    }

    fn to_config(&self) -> Result<Configuration> {
        Configuration::from_rows(self.x.chunks(self.n).map(<[f64]>::to_vec).collect(), 4.0)
    }
}

struct RestartOutcome {
    best: Flat,
    ratio: f64,
    evaluations: u64,
    reheats: u64,
}

fn random_start(rng: &mut ChaCha8Rng, n: usize) -> Flat {
    let m = n + 2;
    Flat { m, n, x: (0..m * n).map(|_| rng.random_range(-1.0..=1.0)).collect() }
}

fn run_restart(start: Flat, budget: u64, rng: &mut ChaCha8Rng, sched: &Schedule) -> Option<RestartOutcome> {
    if budget == 0 {
        return None;
    }
    let mut current = start;
    let mut evaluations = 1;
    let mut cur_ratio = match current.normalize() {
        Some(r) => r,
        None => {
            // coincident seed points: nudge deterministically and carry on
            for v in current.x.iter_mut() {
                *v += 1e-3 * rng.sample::<f64, _>(StandardNormal);
            }
            current.normalize()?
        }
    };
    let mut best = current.clone();
    let mut best_ratio = cur_ratio;
    let mut step = sched.initial_step * cur_ratio;
    let mut temperature = sched.initial_temperature;
    let mut accepted = 0u64;
    let mut stalled = 0u64;
    let mut reheats = 0u64;
    let dims = current.x.len();

    while evaluations < budget {
        let mut cand = current.clone();
        if rng.random::<f64>() < sched.full_move_prob {
            for v in cand.x.iter_mut() {
                let z: f64 = StandardNormal.sample(rng);
                *v += step * z;
            }
        } else {
            let idx = rng.random_range(0..dims);
            let z: f64 = StandardNormal.sample(rng);
            cand.x[idx] += step * z;
        }
        let u: f64 = rng.random();
        evaluations += 1;
        temperature *= sched.cooling;

        let accept = match cand.normalize() {
            Some(r) => {
                let delta = r.ln() - cur_ratio.ln();
                if delta <= 0.0 || u < (-delta / temperature).exp() {
                    if r < best_ratio {
                        best_ratio = r;
                        best = cand.clone();
                    }
                    current = cand;
                    cur_ratio = r;
                    true
                } else {
                    false
                }
            }
            None => false,
        };

        if accept {
            accepted += 1;
            stalled = 0;
            if accepted.is_multiple_of(sched.decay_every) {
                step *= sched.step_decay;
            }
        } else {
            stalled += 1;
            if stalled.is_multiple_of(sched.stall_window) {
                step *= sched.stall_decay;
            }
        }

        if step < sched.min_step {
            current = best.clone();
            cur_ratio = best_ratio;
            step = sched.initial_step * best_ratio;
            temperature = sched.initial_temperature;
            stalled = 0;
            reheats += 1;
        }
    }
    Some(RestartOutcome { best, ratio: best_ratio, evaluations, reheats })
}

/// Minimise the `l_4` max/min distance ratio over `n + 2` points in `R^n` with the
/// default [`Schedule`].
pub fn minimize_ratio(n: u64, budget: u64, seeds: &Seeds, rng_seed: u64) -> Result<SearchResult> {
    minimize_ratio_with(n, budget, seeds, rng_seed, &Schedule::default())
}

/// `budget` evaluations are split evenly over the restarts (earlier restarts take
/// the remainder). One restart is run per seed configuration.
pub fn minimize_ratio_with(
    n: u64,
    budget: u64,
    seeds: &Seeds,
    rng_seed: u64,
    sched: &Schedule,
) -> Result<SearchResult> {
    if n < 2 {
        return Err(Error::OutOfRange { name: "n", min: 2, value: n });
    }
    if budget == 0 {
        return Err(Error::OutOfRange { name: "budget", min: 1, value: 0 });
    }
    let nu = n as usize;
    let starts: Vec<Option<Flat>> = match seeds {
        Seeds::Auto => {
            let mut v = vec![Some(Flat::from_config(&build_configuration(n)?.config))];
            v.extend((0..AUTO_RANDOM_SEEDS).map(|_| None));
            v
        }
        Seeds::Given(list) => {
            if list.is_empty() {
                return Err(Error::TooFewPoints { required: 1, found: 0 });
            }
            for c in list {
                if c.dim() != nu || c.len() != nu + 2 {
                    return Err(Error::WrongPointCount { expected: nu + 2, dim: nu, found: c.len() });
                }
            }
            list.iter().map(|c| Some(Flat::from_config(c))).collect()
        }
    };
    let restarts = starts.len() as u64;
    let per = budget / restarts;
    let extra = budget % restarts;

    let outcomes: Vec<Option<RestartOutcome>> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, start)| {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(rng_seed, i));
            let start = start.unwrap_or_else(|| random_start(&mut rng, nu));
            let b = per + u64::from((i as u64) < extra);
            run_restart(start, b, &mut rng, sched)
        })
        .collect();

    let evaluations = outcomes.iter().flatten().map(|o| o.evaluations).sum();
    let reheats: u64 = outcomes.iter().flatten().map(|o| o.reheats).sum();
    let winner = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(i, o)| o.map(|o| (i, o)))
        .min_by(|(i, a), (j, b)| a.ratio.total_cmp(&b.ratio).then(i.cmp(j)))
        .map(|(_, o)| o)
        .ok_or_else(|| Error::NumericalBreakdown("no restart produced a valid configuration".into()))?;

    let best_config = winner.best.to_config()?;
    let bound = schuette_bound(n, 4.0)?;
    if winner.ratio < bound - 1e-9 {
        return Err(Error::NumericalBreakdown(format!("ratio {} fell below the lower bound {bound}", winner.ratio)));
    }
    Ok(SearchResult {
        best_config,
        best_ratio: winner.ratio,
        bound,
        gap: winner.ratio - bound,
        restarts: restarts + reheats,
        evaluations,
        rng_seed,
    })
}
