//! Instance generators: the lower-bound constructions and seeded random suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cdf::{point_mass, validate_cdf, LengthCdf};
use crate::model::{Instance, Player, Report};
use crate::rational::{self, Prob};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

fn invalid(msg: impl Into<String>) -> GeneratorError {
    GeneratorError::InvalidParameter(msg.into())
}

fn uniform_cdf(max: u32) -> LengthCdf {
    validate_cdf((1..=max).map(|t| rational::ratio(t as i64, max as i64)).collect()).expect("uniform")
}

/// Length `short` with probability `p`, else `long`.
fn two_point(short: u32, long: u32, p: &Prob) -> LengthCdf {
    validate_cdf(
        (1..=long)
            .map(|t| {
                if t >= long {
                    rational::one()
                } else if t >= short {
                    p.clone()
                } else {
                    rational::zero()
                }
            })
            .collect(),
    )
    .expect("two-point")
}

/// Group sizes `D k^i` with `k = 2D`, before capping.
pub fn theorem1_group_sizes(deadline: u32) -> Vec<u128> {
    let k = 2 * deadline as u128;
    let groups = deadline.ilog2() + 2;
    (0..groups)
        .map(|i| (deadline as u128).saturating_mul(k.saturating_pow(i)))
        .collect()
}

/// Group 0 has `D` unit jobs; group `i >= 1` has jobs of length `2^(i-1)`
/// with probability `1/D`, else `2^i`. Sizes are capped at `group_cap`.
pub fn gen_theorem1(deadline: u32, group_cap: usize) -> Result<Instance, GeneratorError> {
    if deadline < 2 || !deadline.is_power_of_two() {
        return Err(invalid(format!("deadline {deadline} must be a power of two >= 2")));
    }
    if group_cap == 0 {
        return Err(invalid("group_cap must be positive"));
    }
    let eps = rational::ratio(1, deadline as i64);
    let mut cdfs = Vec::new();
    for (i, size) in theorem1_group_sizes(deadline).into_iter().enumerate() {
        let size = size.min(group_cap as u128) as usize;
        let cdf = if i == 0 {
            point_mass(1)
        } else {
            two_point(1 << (i - 1), 1 << i, &eps)
        };
        cdfs.extend(std::iter::repeat_n(cdf, size));
    }
    Ok(Instance::truthful(
        deadline,
        cdfs,
        format!("theorem1(D={deadline},cap={group_cap})"),
    ))
}

/// `n/t` jobs uniform on `1..=2t`, the rest uniform on `1..=n`; `D = n`.
pub fn gen_short_long(n: u32, t: u32) -> Result<Instance, GeneratorError> {
    if t == 0 || n == 0 || !n.is_multiple_of(t) {
        return Err(invalid(format!("t={t} must divide n={n}")));
    }
    let short = (n / t) as usize;
    let mut cdfs = vec![uniform_cdf(2 * t); short];
    cdfs.extend(std::iter::repeat_n(uniform_cdf(n), n as usize - short));
    Ok(Instance::truthful(n, cdfs, format!("short_long(n={n},t={t})")))
}

/// `D = n`; length `2^i` with probability `2^i/(2n)` for `i = 1..=log2 n`.
/// The leftover mass `1/n` goes to length `n`.
pub fn gen_oblivious_lb(n: u32) -> Result<Instance, GeneratorError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(invalid(format!("n={n} must be a power of two >= 2")));
    }
    let mut mass = vec![rational::zero(); n as usize + 1];
    for i in 1..=n.ilog2() {
        let len = 1usize << i;
        mass[len] += rational::ratio(len as i64, 2 * n as i64);
    }
    mass[n as usize] += rational::ratio(1, n as i64);
    let mut acc = rational::zero();
    let values = (1..=n as usize)
        .map(|t| {
            acc += &mass[t];
            acc.clone()
        })
        .collect();
    let cdf = validate_cdf(values).expect("distribution");
    Ok(Instance::truthful(
        n,
        vec![cdf; n as usize],
        format!("oblivious_lb(n={n},residual=1/n@n)"),
    ))
}

/// `D = n^2`; each job has length `n` with probability 1/2, else uniform on `1..=n^2`.
pub fn gen_complete_lb(n: u32) -> Result<Instance, GeneratorError> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let d = n * n;
    let values = (1..=d)
        .map(|t| {
            let u = rational::ratio(t as i64, 2 * d as i64);
            if t >= n {
                u + rational::ratio(1, 2)
            } else {
                u
            }
        })
        .collect();
    let cdf = validate_cdf(values).expect("mixture");
    Ok(Instance::truthful(d, vec![cdf; n as usize], format!("complete_lb(n={n})")))
}

/// Identical jobs with `f(t) = 1/k` up to `D/n`, then `f(t) = t n / (D k)`
/// up to `min(kD/n, D)`, flat afterwards.
pub fn gen_canonical_gap(k: u32, n: usize, deadline: u32) -> Result<Instance, GeneratorError> {
    if k == 0 || n == 0 || !deadline.is_multiple_of(n as u32) {
        return Err(invalid(format!("need k >= 1 and n={n} dividing D={deadline}")));
    }
    let base = deadline / n as u32;
    let top = (k as u64 * base as u64).min(deadline as u64) as u32;
    let values = (1..=top)
        .map(|t| {
            if t <= base {
                rational::ratio(1, k as i64)
            } else {
                let v = rational::ratio(t as i64 * n as i64, deadline as i64 * k as i64);
                rational::min(&v, &rational::one())
            }
        })
        .collect();
    let cdf = validate_cdf(values).expect("gap cdf");
    Ok(Instance::truthful(
        deadline,
        vec![cdf; n],
        format!("canonical_gap(k={k},n={n},D={deadline},linear)"),
    ))
}

pub fn gen_identical(f: &LengthCdf, n: usize, deadline: u32) -> Result<Instance, GeneratorError> {
    if n == 0 || deadline == 0 {
        return Err(invalid("need n >= 1 and D >= 1"));
    }
    Ok(Instance::truthful(
        deadline,
        vec![f.clone(); n],
        format!("identical(n={n},D={deadline})"),
    ))
}

/// Base `b` uniform in `1..=max(1, 2D/n)`; length `b` or `2b` with
/// probability 1/2 each; the report is `b`.
pub fn gen_near_deterministic(n: usize, deadline: u32, seed: u64) -> Result<Instance, GeneratorError> {
    if n == 0 || deadline == 0 {
        return Err(invalid("need n >= 1 and D >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = (2 * deadline / n as u32).max(1);
    let half = rational::ratio(1, 2);
    let players = (0..n)
        .map(|_| {
            let b = rng.random_range(1..=top);
            Player {
                true_cdf: two_point(b, 2 * b, &half),
                report: Report::Qualitative(b),
            }
        })
        .collect();
    Instance::new(deadline, players, format!("near_deterministic(n={n},D={deadline},seed={seed})"))
        .map_err(|e| invalid(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomParams {
    pub max_players: usize,
    pub max_deadline: u32,
    pub max_support: usize,
    pub max_length: u32,
    /// Denominator of the random probability weights.
    pub granularity: u32,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_players: 4,
            max_deadline: 12,
            max_support: 3,
            max_length: 8,
            granularity: 4,
        }
    }
}

fn random_cdf(rng: &mut ChaCha8Rng, params: &RandomParams) -> LengthCdf {
    let support = rng.random_range(1..=params.max_support.max(1));
    let mut lengths: Vec<u32> = Vec::new();
    while lengths.len() < support.min(params.max_length as usize) {
        let l = rng.random_range(1..=params.max_length);
        if !lengths.contains(&l) {
            lengths.push(l);
        }
    }
    lengths.sort_unstable();
    let g = params.granularity.max(1);
    // Positive integer weights summing to at most g; the remainder never finishes
    // with probability 1/4.
    let mut weights: Vec<u32> = vec![1; lengths.len()];
    let never = rng.random_bool(0.25);
    let pool = g.max(lengths.len() as u32 + never as u32);
    let mut left = pool - lengths.len() as u32 - never as u32;
    while left > 0 {
        let i = rng.random_range(0..lengths.len());
        weights[i] += 1;
        left -= 1;
    }
    let lmax = *lengths.last().expect("nonempty");
    let mut acc = 0;
    let values = (1..=lmax)
        .map(|t| {
            if let Some(i) = lengths.iter().position(|&l| l == t) {
                acc += weights[i];
            }
            rational::ratio(acc as i64, pool as i64)
        })
        .collect();
    validate_cdf(values).expect("random cdf")
}

/// Truthful quantitative instance; deterministic in `seed`.
pub fn gen_random(seed: u64, params: &RandomParams) -> Result<Instance, GeneratorError> {
    if params.max_players == 0 || params.max_deadline == 0 || params.max_length == 0 {
        return Err(invalid("random parameters must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=params.max_players);
    let deadline = rng.random_range(1..=params.max_deadline);
    let cdfs = (0..n).map(|_| random_cdf(&mut rng, params)).collect();
    Ok(Instance::truthful(deadline, cdfs, format!("random(seed={seed})")))
}

/// Random deterministic instance with truthful qualitative reports.
pub fn gen_random_deterministic(seed: u64, max_players: usize, max_length: u32, max_deadline: u32) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_players);
    let deadline = rng.random_range(1..=max_deadline);
    let lengths: Vec<u32> = (0..n).map(|_| rng.random_range(1..=max_length)).collect();
    let mut inst = Instance::deterministic(deadline, &lengths, &lengths);
    inst.label = format!("random_deterministic(seed={seed})");
    inst
}

/// Small instances (`n <= 4`, `D <= 12`, support at most 3) on which every
/// scheduler can be evaluated exactly.
pub fn exact_suite() -> Vec<Instance> {
    let r = rational::ratio;
    let mut out = Vec::new();
    let coin = validate_cdf(vec![r(1, 2), r(1, 1)]).expect("cdf");
    let spread = validate_cdf(vec![r(1, 4), r(1, 4), r(1, 2), r(1, 2), r(1, 2), r(1, 1)]).expect("cdf");
    let late = validate_cdf(vec![r(0, 1), r(0, 1), r(1, 3), r(1, 3), r(2, 3)]).expect("cdf");
    out.push(Instance::truthful(8, vec![point_mass(4); 2], "pair(4,4),D=8"));
    out.push(Instance::truthful(8, vec![point_mass(2); 4], "four(2),D=8"));
    out.push(Instance::truthful(5, vec![point_mass(2), point_mass(3), point_mass(4)], "det(2,3,4),D=5"));
    out.push(Instance::truthful(4, vec![point_mass(4); 2], "pair(4,4),D=4"));
    out.push(Instance::truthful(2, vec![coin.clone(); 2], "coins,D=2"));
    out.push(Instance::truthful(6, vec![coin.clone(), spread.clone(), late.clone()], "mixed,D=6"));
    out.push(Instance::truthful(12, vec![spread.clone(); 4], "spread4,D=12"));
    out.push(Instance::truthful(9, vec![late.clone(), late, point_mass(1)], "late,D=9"));
    out.push(Instance::truthful(3, vec![point_mass(1); 3], "units,D=3"));
    out.push(gen_oblivious_lb(4).expect("valid"));
    out.push(gen_canonical_gap(2, 2, 4).expect("valid"));
    let params = RandomParams::default();
    for seed in 0..24 {
        out.push(gen_random(seed, &params).expect("valid"));
    }
    out
}

/// Serializable description of a generator call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Theorem1 { deadline: u32, group_cap: usize },
    ShortLong { n: u32, t: u32 },
    ObliviousLb { n: u32 },
    CompleteLb { n: u32 },
    CanonicalGap { k: u32, n: usize, deadline: u32 },
    Identical { cdf: LengthCdf, n: usize, deadline: u32 },
    NearDeterministic { n: usize, deadline: u32, seed: u64 },
    Random {
        seed: u64,
        #[serde(flatten)]
        params: RandomParams,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Instance, GeneratorError> {
        match self {
            GeneratorSpec::Theorem1 { deadline, group_cap } => gen_theorem1(*deadline, *group_cap),
            GeneratorSpec::ShortLong { n, t } => gen_short_long(*n, *t),
            GeneratorSpec::ObliviousLb { n } => gen_oblivious_lb(*n),
            GeneratorSpec::CompleteLb { n } => gen_complete_lb(*n),
            GeneratorSpec::CanonicalGap { k, n, deadline } => gen_canonical_gap(*k, *n, *deadline),
            GeneratorSpec::Identical { cdf, n, deadline } => gen_identical(cdf, *n, *deadline),
            GeneratorSpec::NearDeterministic { n, deadline, seed } => gen_near_deterministic(*n, *deadline, *seed),
            GeneratorSpec::Random { seed, params } => gen_random(*seed, params),
        }
    }
}
