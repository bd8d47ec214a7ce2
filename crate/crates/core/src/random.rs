//! The single randomness primitive shared by schedulers and the engine.
//!
//! Schedulers never touch an RNG directly. Every random decision is a
//! [`Lottery`] handed to a [`RandomSource`], which either samples one branch
//! (Monte Carlo) or walks all branches with their exact weights
//! (enumeration).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{self, Prob};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LotteryError {
    #[error("lottery has no branches")]
    Empty,
    #[error("lottery weight {index} is negative")]
    Negative { index: usize },
    #[error("lottery weights sum to {sum}, expected 1")]
    BadTotal { sum: String },
}

/// A finite distribution over branch indices `0..len` with rational weights summing to 1.
#[derive(Debug, Clone)]
pub struct Lottery {
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Uniform(usize),
    /// Weights `numerators[i] / denominator`.
    Scaled {
        numerators: Vec<u64>,
        denominator: u64,
    },
    Exact {
        weights: Vec<Prob>,
        cumulative: Vec<f64>,
    },
}

impl Lottery {
    /// Uniform choice over `count >= 1` branches.
    pub fn uniform(count: usize) -> Self {
        assert!(count >= 1, "uniform lottery needs at least one branch");
        Lottery {
            repr: Repr::Uniform(count),
        }
    }

    /// Two branches: index 0 with probability `numer/denom`, index 1 otherwise.
    pub fn bernoulli_ratio(numer: u64, denom: u64) -> Self {
        assert!(denom > 0 && numer <= denom, "bad bernoulli {numer}/{denom}");
        Lottery {
            repr: Repr::Scaled {
                numerators: vec![numer, denom - numer],
                denominator: denom,
            },
        }
    }

    /// Two branches: index 0 with probability `p`, index 1 otherwise.
    pub fn bernoulli(p: &Prob) -> Self {
        let q = rational::one() - p;
        Self::from_weights(vec![p.clone(), q]).expect("probability must lie in [0,1]")
    }

    pub fn from_weights(weights: Vec<Prob>) -> Result<Self, LotteryError> {
        if weights.is_empty() {
            return Err(LotteryError::Empty);
        }
        let mut sum = Prob::zero();
        for (index, w) in weights.iter().enumerate() {
            if *w < Prob::zero() {
                return Err(LotteryError::Negative { index });
            }
            sum += w;
        }
        if !sum.is_one() {
            return Err(LotteryError::BadTotal {
                sum: rational::format(&sum),
            });
        }
        let common = weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        if let Some(denominator) = common.to_u64() {
            let numerators: Option<Vec<u64>> = weights
                .iter()
                .map(|w| (w.numer() * (&common / w.denom())).to_u64())
                .collect();
            if let Some(numerators) = numerators {
                return Ok(Lottery {
                    repr: Repr::Scaled {
                        numerators,
                        denominator,
                    },
                });
            }
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += rational::to_f64(w);
                acc
            })
            .collect();
        Ok(Lottery {
            repr: Repr::Exact {
                weights,
                cumulative,
            },
        })
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Uniform(k) => *k,
            Repr::Scaled { numerators, .. } => numerators.len(),
            Repr::Exact { weights, .. } => weights.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self, index: usize) -> Prob {
        match &self.repr {
            Repr::Uniform(k) => rational::ratio(1, *k as i64),
            Repr::Scaled {
                numerators,
                denominator,
            } => Prob::new(BigInt::from(numerators[index]), BigInt::from(*denominator)),
            Repr::Exact { weights, .. } => weights[index].clone(),
        }
    }

    pub fn is_zero(&self, index: usize) -> bool {
        match &self.repr {
            Repr::Uniform(_) => false,
            Repr::Scaled { numerators, .. } => numerators[index] == 0,
            Repr::Exact { weights, .. } => weights[index].is_zero(),
        }
    }

    pub fn weights(&self) -> Vec<Prob> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        match &self.repr {
            Repr::Uniform(k) => rng.random_range(0..*k),
            Repr::Scaled {
                numerators,
                denominator,
            } => {
                let mut x = rng.random_range(0..*denominator);
                for (i, &w) in numerators.iter().enumerate() {
                    if x < w {
                        return i;
                    }
                    x -= w;
                }
                unreachable!("scaled numerators sum to the denominator")
            }
            Repr::Exact {
                weights,
                cumulative,
            } => {
                let total = *cumulative.last().expect("nonempty");
                let u = rng.random::<f64>() * total;
                let mut last_nonzero = 0;
                for (i, w) in weights.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    last_nonzero = i;
                    if u < cumulative[i] {
                        return i;
                    }
                }
                last_nonzero
            }
        }
    }
}

/// Source of every random decision a scheduler (or nature) makes.
pub trait RandomSource {
    fn weighted_choice(&mut self, lottery: &Lottery) -> usize;

    /// Uniform index in `0..count`.
    fn uniform(&mut self, count: usize) -> usize {
        if count == 1 {
            return 0;
        }
        self.weighted_choice(&Lottery::uniform(count))
    }

    /// True with probability `p`. Degenerate coins consume no randomness.
    fn chance(&mut self, p: &Prob) -> bool {
        if p.is_zero() {
            false
        } else if p.is_one() {
            true
        } else {
            self.weighted_choice(&Lottery::bernoulli(p)) == 0
        }
    }

    /// True with probability `numer/denom`.
    fn chance_ratio(&mut self, numer: u64, denom: u64) -> bool {
        if numer == 0 {
            false
        } else if numer >= denom {
            true
        } else {
            self.weighted_choice(&Lottery::bernoulli_ratio(numer, denom)) == 0
        }
    }
}

/// Sampling-backed source, deterministic in its 64-bit seed and stream.
#[derive(Debug, Clone)]
pub struct SeededSource {
    rng: ChaCha8Rng,
}

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        SeededSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for one Monte Carlo trial.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        SeededSource { rng }
    }
}

impl RandomSource for SeededSource {
    fn weighted_choice(&mut self, lottery: &Lottery) -> usize {
        lottery.sample(&mut self.rng)
    }
}

#[derive(Debug, Clone)]
struct Branch {
    choice: usize,
    lottery: Lottery,
    /// Probability of the path up to and including this choice.
    path_weight: Prob,
}

/// Enumeration-backed source: replays a recorded prefix of choices, extends
/// it with first nonzero branches, and backtracks depth-first between runs.
///
/// Usage: call [`begin`](Self::begin), run the randomized procedure to the
/// end, read [`path_weight`](Self::path_weight), then [`advance`](Self::advance)
/// until it returns `false`. The procedure must be deterministic given the
/// choices it receives.
#[derive(Debug, Clone, Default)]
pub struct EnumerationSource {
    path: Vec<Branch>,
    cursor: usize,
}

impl EnumerationSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn begin(&mut self) {
        self.cursor = 0;
    }

    /// Exact probability of the branch just replayed.
    pub fn path_weight(&self) -> Prob {
        debug_assert_eq!(self.cursor, self.path.len(), "run did not replay its full prefix");
        self.path
            .last()
            .map(|b| b.path_weight.clone())
            .unwrap_or_else(rational::one)
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    /// Moves to the next unexplored branch. Returns `false` once the tree is exhausted.
    pub fn advance(&mut self) -> bool {
        while let Some(last) = self.path.pop() {
            let next = (last.choice + 1..last.lottery.len()).find(|&i| !last.lottery.is_zero(i));
            if let Some(choice) = next {
                let parent = self
                    .path
                    .last()
                    .map(|b| b.path_weight.clone())
                    .unwrap_or_else(rational::one);
                let path_weight = parent * last.lottery.weight(choice);
                self.path.push(Branch {
                    choice,
                    lottery: last.lottery,
                    path_weight,
                });
                return true;
            }
        }
        false
    }
}

impl RandomSource for EnumerationSource {
    fn weighted_choice(&mut self, lottery: &Lottery) -> usize {
        if let Some(branch) = self.path.get(self.cursor) {
            debug_assert_eq!(
                branch.lottery.len(),
                lottery.len(),
                "replay diverged: lottery shape changed"
            );
            self.cursor += 1;
            return branch.choice;
        }
        let choice = (0..lottery.len())
            .find(|&i| !lottery.is_zero(i))
            .expect("lottery has a nonzero branch");
        let parent = self
            .path
            .last()
            .map(|b| b.path_weight.clone())
            .unwrap_or_else(rational::one);
        let path_weight = parent * lottery.weight(choice);
        self.path.push(Branch {
            choice,
            lottery: lottery.clone(),
            path_weight,
        });
        self.cursor += 1;
        choice
    }
}
