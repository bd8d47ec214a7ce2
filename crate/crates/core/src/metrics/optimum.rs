//! Optimal preemptive welfare by backward induction, and the canonical gap.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::MetricsError;
use crate::cdf::LengthCdf;
use crate::instances::gen_canonical_gap;
use crate::model::Instance;
use crate::rational::{self, Prob};
use crate::schedulers::canonical_welfare;

pub const DEFAULT_STATE_LIMIT: usize = 2_000_000;

/// Per group of identical players, the sorted progress of unfinished jobs.
type State = (Vec<Vec<u32>>, u32);

struct Solver<'a> {
    groups: &'a [LengthCdf],
    memo: HashMap<State, Prob>,
    limit: usize,
}

impl Solver<'_> {
    /// Drops jobs that cannot finish in the time left.
    fn normalize(&self, mut progress: Vec<Vec<u32>>, time: u32) -> Vec<Vec<u32>> {
        for (g, list) in progress.iter_mut().enumerate() {
            let f = &self.groups[g];
            list.retain(|&c| f.at(c + time) > f.at(c));
            list.sort_unstable();
        }
        progress
    }

    fn value(&mut self, progress: Vec<Vec<u32>>, time: u32) -> Result<Prob, MetricsError> {
        if time == 0 || progress.iter().all(Vec::is_empty) {
            return Ok(Prob::zero());
        }
        let key = (progress, time);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let (progress, time) = key;
        let mut best = Prob::zero();
        for g in 0..progress.len() {
            let f = &self.groups[g];
            let mut last = None;
            for (idx, &c) in progress[g].iter().enumerate() {
                if last == Some(c) {
                    continue;
                }
                last = Some(c);
                let hazard = f.mass(c + 1) / (Prob::one() - f.at(c));
                let mut done = progress.clone();
                done[g].remove(idx);
                let done = self.normalize(done, time - 1);
                let mut cont = progress.clone();
                cont[g][idx] = c + 1;
                let cont = self.normalize(cont, time - 1);
                let mut v = Prob::zero();
                if !hazard.is_zero() {
                    v += &hazard * (Prob::one() + self.value(done, time - 1)?);
                }
                if !hazard.is_one() {
                    v += (Prob::one() - &hazard) * self.value(cont, time - 1)?;
                }
                if v > best {
                    best = v;
                }
            }
        }
        if self.memo.len() >= self.limit {
            return Err(MetricsError::StateLimitExceeded { limit: self.limit });
        }
        self.memo.insert((progress, time), best.clone());
        Ok(best)
    }
}

/// Best expected number of finished jobs over all adaptive preemptive
/// policies, using the true distributions.
pub fn exact_preemptive_optimum(instance: &Instance, state_limit: usize) -> Result<Prob, MetricsError> {
    let mut groups: Vec<LengthCdf> = Vec::new();
    let mut progress: Vec<Vec<u32>> = Vec::new();
    for p in &instance.players {
        match groups.iter().position(|g| *g == p.true_cdf) {
            Some(g) => progress[g].push(0),
            None => {
                groups.push(p.true_cdf.clone());
                progress.push(vec![0]);
            }
        }
    }
    let mut solver = Solver {
        groups: &groups,
        memo: HashMap::new(),
        limit: state_limit,
    };
    let start = solver.normalize(progress, instance.deadline);
    solver.value(start, instance.deadline)
}

/// Exact welfare of a simple preemptive policy on `n` identical jobs: run
/// every job for up to `probe` steps, then run the unfinished ones to
/// completion one after another. A lower bound on the preemptive optimum.
pub fn probe_then_complete_welfare(f: &LengthCdf, n: usize, deadline: u32, probe: u32) -> Prob {
    let d = deadline as usize;
    // dist[used][unfinished] after probing.
    let mut dist = vec![vec![Prob::zero(); n + 1]; d + 1];
    dist[0][0] = Prob::one();
    let mut probed_finishes = Prob::zero();
    for _ in 0..n {
        let mut next = vec![vec![Prob::zero(); n + 1]; d + 1];
        for used in 0..=d {
            for open in 0..=n {
                let w = dist[used][open].clone();
                if w.is_zero() {
                    continue;
                }
                let left = deadline - used as u32;
                let run = probe.min(left);
                for k in 1..=run {
                    let m = f.mass(k);
                    if m.is_zero() {
                        continue;
                    }
                    let pk = &w * m;
                    probed_finishes += &pk;
                    next[used + k as usize][open] += pk;
                }
                let stuck = &w * (Prob::one() - f.at(run));
                if !stuck.is_zero() {
                    if run < probe {
                        // Out of time mid-probe: nothing more can finish.
                        next[d][0] += stuck;
                    } else {
                        next[used + run as usize][open + 1] += stuck;
                    }
                }
            }
        }
        dist = next;
    }
    let survive = Prob::one() - f.at(probe);
    let mut total = probed_finishes;
    if survive.is_zero() {
        return total;
    }
    // Residual length masses over a common denominator `q`, so the running
    // sums below stay in integers: sums[j][s] / q^j = P(j residual jobs take exactly s).
    let residual: Vec<Prob> = (0..=d as u32).map(|k| f.mass(probe + k) / &survive).collect();
    let q = residual
        .iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let weights: Vec<(usize, BigInt)> = residual
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, r)| !r.is_zero())
        .map(|(k, r)| (k, r.numer() * (&q / r.denom())))
        .collect();
    let mut sums = vec![vec![BigInt::zero(); d + 1]];
    sums[0][0] = BigInt::one();
    for j in 1..=n {
        let prev = &sums[j - 1];
        let mut cur = vec![BigInt::zero(); d + 1];
        for (s, c) in cur.iter_mut().enumerate() {
            for (k, a) in &weights {
                if *k > s {
                    break;
                }
                if !prev[s - k].is_zero() {
                    *c += a * &prev[s - k];
                }
            }
        }
        sums.push(cur);
    }
    // cumulative[j][t] = P(j residual jobs fit in t) as an exact rational.
    let mut scale = BigInt::one();
    let mut cumulative: Vec<Vec<Prob>> = vec![vec![Prob::one(); d + 1]];
    for row in sums.iter().skip(1) {
        scale *= &q;
        let mut acc = BigInt::zero();
        cumulative.push(
            row.iter()
                .map(|c| {
                    acc += c;
                    Prob::new(acc.clone(), scale.clone())
                })
                .collect(),
        );
    }
    for (used, row) in dist.iter().enumerate() {
        for (open, w) in row.iter().enumerate() {
            if !w.is_zero() {
                let t = d - used;
                let expected: Prob = (1..=open).map(|j| cumulative[j][t].clone()).sum();
                total += w * expected;
            }
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub k: u32,
    pub n: usize,
    pub deadline: u32,
    #[serde(serialize_with = "ser_prob")]
    pub canonical: Prob,
    /// Exact optimum when the state space was small enough.
    #[serde(serialize_with = "ser_opt")]
    pub optimum: Option<Prob>,
    /// Best certified lower bound on the optimum (the optimum itself when known).
    #[serde(serialize_with = "ser_prob")]
    pub lower_bound: Prob,
    /// `lower_bound / canonical`.
    #[serde(serialize_with = "ser_prob")]
    pub ratio: Prob,
}

fn ser_prob<S: serde::Serializer>(p: &Prob, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(p))
}

fn ser_opt<S: serde::Serializer>(p: &Option<Prob>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => ser_prob(p, s),
        None => s.serialize_none(),
    }
}

/// Probe-then-complete welfare for increasing probe lengths, stopping at the
/// first decrease. Any probe length certifies a lower bound; the scan only
/// looks for a good one.
fn best_probe_welfare(f: &LengthCdf, n: usize, deadline: u32) -> Prob {
    let mut best = Prob::zero();
    for probe in 1..=(deadline / n as u32).max(1) {
        let v = probe_then_complete_welfare(f, n, deadline, probe);
        if v < best {
            break;
        }
        best = v;
    }
    best
}

/// Preemptive optimum over canonical welfare on the gap instance. Falls back
/// to the best probe-then-complete policy when the exact optimum is out of reach.
pub fn canonical_gap_ratio(k: u32, n: usize, deadline: u32, state_limit: usize) -> Result<GapReport, MetricsError> {
    let instance = gen_canonical_gap(k, n, deadline).map_err(|e| MetricsError::InvalidParameter(e.to_string()))?;
    let f = &instance.players[0].true_cdf;
    let canonical = canonical_welfare(f, n, deadline);
    let optimum = match exact_preemptive_optimum(&instance, state_limit) {
        Ok(v) => Some(v),
        Err(MetricsError::StateLimitExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let lower_bound = match &optimum {
        Some(v) => v.clone(),
        None => best_probe_welfare(f, n, deadline),
    };
    let ratio = &lower_bound / &canonical;
    Ok(GapReport {
        k,
        n,
        deadline,
        canonical,
        optimum,
        lower_bound,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdf::{point_mass, validate_cdf};
    use crate::rational::{int, ratio};

    #[test]
    fn deterministic_optimum_is_greedy_count() {
        let inst = Instance::truthful(7, vec![point_mass(2), point_mass(3), point_mass(4)], "det");
        assert_eq!(exact_preemptive_optimum(&inst, DEFAULT_STATE_LIMIT).unwrap(), int(2));
    }

    /// Exhaustive search over step-by-step policies on explicit per-player progress.
    fn policy_search(f: &[LengthCdf], progress: &[Option<u32>], time: u32) -> Prob {
        if time == 0 {
            return Prob::zero();
        }
        let mut best = Prob::zero();
        for (i, p) in progress.iter().enumerate() {
            let Some(c) = *p else { continue };
            let survive = Prob::one() - f[i].at(c);
            if survive.is_zero() {
                continue;
            }
            let h = f[i].mass(c + 1) / survive;
            let mut done = progress.to_vec();
            done[i] = None;
            let mut cont = progress.to_vec();
            cont[i] = Some(c + 1);
            let v = &h * (Prob::one() + policy_search(f, &done, time - 1))
                + (Prob::one() - &h) * policy_search(f, &cont, time - 1);
            if v > best {
                best = v;
            }
        }
        best
    }

    #[test]
    fn two_coin_jobs_in_two_steps() {
        let f = validate_cdf(vec![ratio(1, 2), int(1)]).unwrap();
        let inst = Instance::truthful(2, vec![f.clone(), f.clone()], "coins");
        let opt = exact_preemptive_optimum(&inst, DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(opt, policy_search(&[f.clone(), f], &[Some(0), Some(0)], 2));
        assert_eq!(opt, ratio(5, 4));
    }

    #[test]
    fn matches_policy_search_on_mixed_instances() {
        let f = validate_cdf(vec![ratio(1, 3), ratio(1, 3), int(1)]).unwrap();
        let g = validate_cdf(vec![int(0), ratio(1, 2), ratio(1, 2), ratio(3, 4)]).unwrap();
        for d in 1..=7 {
            let cdfs = vec![f.clone(), g.clone(), f.clone()];
            let inst = Instance::truthful(d, cdfs.clone(), "mixed");
            assert_eq!(
                exact_preemptive_optimum(&inst, DEFAULT_STATE_LIMIT).unwrap(),
                policy_search(&cdfs, &[Some(0); 3], d),
                "D={d}"
            );
        }
    }

    #[test]
    fn probe_policy_is_a_lower_bound() {
        for (k, n, d) in [(2, 2, 4), (5, 2, 6), (20, 2, 8), (20, 3, 9), (10, 4, 8)] {
            let inst = gen_canonical_gap(k, n, d).unwrap();
            let f = &inst.players[0].true_cdf;
            let opt = exact_preemptive_optimum(&inst, DEFAULT_STATE_LIMIT).unwrap();
            for p in 1..=d {
                assert!(probe_then_complete_welfare(f, n, d, p) <= opt, "k={k} n={n} D={d} p={p}");
            }
        }
    }

    #[test]
    fn probe_policy_matches_hand_count() {
        // Two jobs of length exactly 2, probe 1 then complete: both finish in 4 steps.
        assert_eq!(probe_then_complete_welfare(&point_mass(2), 2, 4, 1), int(2));
        assert_eq!(probe_then_complete_welfare(&point_mass(2), 2, 3, 1), int(1));
    }

    #[test]
    fn state_limit_is_reported() {
        let f = validate_cdf(vec![ratio(1, 3), ratio(1, 2), ratio(2, 3), int(1)]).unwrap();
        let inst = Instance::truthful(12, vec![f; 4], "big");
        assert_eq!(
            exact_preemptive_optimum(&inst, 10),
            Err(MetricsError::StateLimitExceeded { limit: 10 })
        );
    }
}
