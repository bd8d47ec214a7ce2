//! Strategic checks: payoff curves over report grids, error symmetry and
//! monotonicity, best-response gaps, completeness and obliviousness.
//!
//! Every check runs on exact evaluations, so comparisons are rational and
//! have zero tolerance.

use std::ops::RangeInclusive;

use num_traits::Zero;
use serde::Serialize;

use crate::engine::{enumerate_leaves, exact_evaluate, EngineError, EvalResult, LengthMode};
use crate::model::{Instance, Report};
use crate::rational::{self, Prob};
use crate::schedulers::SchedulerSpec;

fn ser_prob<S: serde::Serializer>(p: &Prob, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(p))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffPoint {
    pub report: Report,
    #[serde(serialize_with = "ser_prob")]
    pub payoff: Prob,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffCurve {
    pub player: usize,
    pub points: Vec<PayoffPoint>,
}

impl PayoffCurve {
    pub fn payoff_at(&self, report: &Report) -> Option<&Prob> {
        self.points.iter().find(|p| &p.report == report).map(|p| &p.payoff)
    }
}

fn player_payoff(result: &EvalResult, player: usize) -> Prob {
    result.finish_prob[player].exact().expect("exact evaluation").clone()
}

/// Exact finish probability of `player` for each report in `grid`, everything
/// else held fixed.
pub fn payoff_curve(
    spec: &SchedulerSpec,
    instance: &Instance,
    player: usize,
    grid: &[Report],
    branch_limit: u64,
) -> Result<PayoffCurve, EngineError> {
    let points = grid
        .iter()
        .map(|r| {
            let inst = instance.with_report(player, r.clone());
            let result = exact_evaluate(spec, &inst, branch_limit)?;
            Ok(PayoffPoint {
                report: r.clone(),
                payoff: player_payoff(&result, player),
            })
        })
        .collect::<Result<_, EngineError>>()?;
    Ok(PayoffCurve { player, points })
}

/// Qualitative reports `1..=2l-1`, symmetric around `l`.
pub fn symmetric_grid(true_length: u32) -> Vec<Report> {
    (1..2 * true_length).map(Report::Qualitative).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorWitness {
    /// Reports `l - error` and `l + error` pay differently.
    Asymmetric {
        error: u32,
        #[serde(serialize_with = "ser_prob")]
        below: Prob,
        #[serde(serialize_with = "ser_prob")]
        above: Prob,
    },
    /// A report further from the truth pays strictly more.
    NonMonotone {
        closer: u32,
        farther: u32,
        #[serde(serialize_with = "ser_prob")]
        closer_payoff: Prob,
        #[serde(serialize_with = "ser_prob")]
        farther_payoff: Prob,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorProperties {
    pub symmetric: bool,
    pub monotone: bool,
    pub witnesses: Vec<ErrorWitness>,
}

/// Compares payoffs at `l - e` and `l + e`, and checks payoffs never grow with `|r - l|`.
/// Points are keyed by the report's point estimate.
pub fn check_error_properties(curve: &PayoffCurve, true_length: u32) -> ErrorProperties {
    let pts: Vec<(u32, &Prob)> = curve.points.iter().map(|p| (p.report.estimate(), &p.payoff)).collect();
    let err = |r: u32| r.abs_diff(true_length);
    let mut witnesses = Vec::new();
    let mut symmetric = true;
    for &(r, below) in pts.iter().filter(|(r, _)| *r < true_length) {
        let e = err(r);
        if let Some(&(_, above)) = pts.iter().find(|(s, _)| *s == true_length + e) {
            if below != above {
                symmetric = false;
                witnesses.push(ErrorWitness::Asymmetric {
                    error: e,
                    below: below.clone(),
                    above: above.clone(),
                });
            }
        }
    }
    let mut monotone = true;
    for &(a, pa) in &pts {
        for &(b, pb) in &pts {
            if err(a) < err(b) && pa < pb {
                monotone = false;
                witnesses.push(ErrorWitness::NonMonotone {
                    closer: a,
                    farther: b,
                    closer_payoff: pa.clone(),
                    farther_payoff: pb.clone(),
                });
            }
        }
    }
    ErrorProperties {
        symmetric,
        monotone,
        witnesses,
    }
}

/// Best payoff over `grid` minus the payoff of `honest`. Zero means no grid
/// report beats honesty; it is never negative because `honest` is included.
pub fn best_response_gap(
    spec: &SchedulerSpec,
    instance: &Instance,
    player: usize,
    honest: &Report,
    grid: &[Report],
    branch_limit: u64,
) -> Result<Prob, EngineError> {
    let mut all = vec![honest.clone()];
    all.extend(grid.iter().filter(|r| *r != honest).cloned());
    let curve = payoff_curve(spec, instance, player, &all, branch_limit)?;
    let base = curve.points[0].payoff.clone();
    let best = curve.points.iter().map(|p| p.payoff.clone()).max().unwrap_or_else(Prob::zero);
    Ok(best - base)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessViolation {
    pub lengths: Vec<u32>,
    pub deadline: u32,
    /// Total probability of branches where some job is unfinished.
    #[serde(serialize_with = "ser_prob")]
    pub probability: Prob,
    /// Unfinished players on the first offending branch.
    pub unfinished: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub instances: u64,
    pub branches: u64,
    pub violations: Vec<CompletenessViolation>,
}

impl CompletenessReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every truthful deterministic instance with `n` in `players`, lengths in
/// `1..=max_len` and deadline in `deadlines` whose lengths fit in the deadline,
/// enumerated over all randomness branches. Instances the scheduler rejects
/// are skipped.
pub fn completeness_check(
    spec: &SchedulerSpec,
    players: RangeInclusive<usize>,
    max_len: u32,
    deadlines: RangeInclusive<u32>,
    branch_limit: u64,
) -> Result<CompletenessReport, EngineError> {
    let mut report = CompletenessReport {
        instances: 0,
        branches: 0,
        violations: Vec::new(),
    };
    for n in players {
        let mut lengths = vec![1u32; n];
        loop {
            let total: u32 = lengths.iter().sum();
            for d in deadlines.clone().filter(|&d| d >= total) {
                let inst = Instance::deterministic(d, &lengths, &lengths);
                let Ok(mech) = spec.prepare(&inst) else { continue };
                report.instances += 1;
                let mut bad = Prob::zero();
                let mut unfinished = Vec::new();
                report.branches += enumerate_leaves(mech.as_ref(), &inst, branch_limit, LengthMode::Lazy, |trace, w| {
                    let missing: Vec<usize> = (0..n).filter(|&i| !trace.finished(i)).collect();
                    if !missing.is_empty() {
                        bad += w;
                        if unfinished.is_empty() {
                            unfinished = missing;
                        }
                    }
                })?;
                if !bad.is_zero() {
                    report.violations.push(CompletenessViolation {
                        lengths: lengths.clone(),
                        deadline: d,
                        probability: bad,
                        unfinished,
                    });
                }
            }
            if !next_tuple(&mut lengths, max_len) {
                break;
            }
        }
    }
    Ok(report)
}

/// Odometer over `1..=max` in every coordinate.
fn next_tuple(v: &mut [u32], max: u32) -> bool {
    for x in v.iter_mut().rev() {
        if *x < max {
            *x += 1;
            return true;
        }
        *x = 1;
    }
    false
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObliviousnessReport {
    pub oblivious: bool,
    /// First pair of profile indices with different outcomes.
    pub witness: Option<(usize, usize)>,
}

/// True iff exact outcomes agree across all report profiles.
pub fn obliviousness_check(
    spec: &SchedulerSpec,
    instance: &Instance,
    profiles: &[Vec<Report>],
    branch_limit: u64,
) -> Result<ObliviousnessReport, EngineError> {
    let mut first: Option<(Vec<Prob>, Prob)> = None;
    for (k, profile) in profiles.iter().enumerate() {
        let r = exact_evaluate(spec, &instance.with_reports(profile), branch_limit)?;
        let outcome = (
            (0..instance.n()).map(|i| player_payoff(&r, i)).collect(),
            r.welfare.exact().expect("exact").clone(),
        );
        match &first {
            None => first = Some(outcome),
            Some(f) if *f != outcome => {
                return Ok(ObliviousnessReport {
                    oblivious: false,
                    witness: Some((0, k)),
                })
            }
            Some(_) => {}
        }
    }
    Ok(ObliviousnessReport {
        oblivious: true,
        witness: None,
    })
}
