//! Nonadaptive interval lottery: player `i` is selected with probability
//! `p_i = min(1, u/t_i)` and then granted `t_i` steps.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::common::{argmax_smallest, Pad};
use super::{Mechanism, SchedulerError, SchedulerKind};
use crate::cdf::LengthCdf;
use crate::model::{Instance, Report};
use crate::protocol::{Capabilities, Directive, Observation, Session};
use crate::random::{Lottery, RandomSource};
use crate::rational::{self, Prob};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FairShareMode {
    /// Every grant is at most `M`; `u = (D - M)/n`.
    BoundedM,
    /// `u = D/n`, `M = D`; overfull grant sets are split in two.
    GeneralHalfFair,
}

/// One cell of the interval lottery: `r` falls in a stretch of `[0,1)` of
/// total length `weight` on which the same players are selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalCell {
    pub weight: Prob,
    /// Selected players in increasing `(t, index)` order.
    pub selected: Vec<usize>,
}

/// Lottery geometry shared by the mechanism and by tests.
#[derive(Debug, Clone)]
pub struct Layout {
    pub unit: Prob,
    pub low: u32,
    pub high: u32,
    /// Granted time per player.
    pub t: Vec<u32>,
    /// Selection probability per player.
    pub p: Vec<Prob>,
    /// Interval start per player.
    pub start: Vec<Prob>,
    /// Players in increasing `(t, index)` order.
    pub order: Vec<usize>,
}

fn value(f: &LengthCdf, unit: &Prob, t: u32) -> Prob {
    let tt = rational::int(t as i64);
    f.at(t) * rational::min(&rational::one(), &(unit / tt))
}

/// The `t` maximizing `f(t) * min(1, u/t)` over `low..=high`, smallest on ties.
pub fn best_preference(f: &LengthCdf, unit: &Prob, low: u32, high: u32) -> u32 {
    argmax_smallest((low..=high).map(|t| (t, value(f, unit, t))))
        .map(|(t, _)| t)
        .unwrap_or(low)
}

pub fn layout(
    instance: &Instance,
    mode: FairShareMode,
    m: Option<u32>,
) -> Result<Layout, SchedulerError> {
    let n = instance.n() as i64;
    let d = instance.deadline;
    let (unit, high) = match mode {
        FairShareMode::BoundedM => {
            let m = m.ok_or_else(|| SchedulerError::InvalidParameter("bounded_m needs m".into()))?;
            if m == 0 || m > d {
                return Err(SchedulerError::InvalidParameter(format!(
                    "m={m} must lie in 1..={d}"
                )));
            }
            (rational::ratio((d - m) as i64, n), m)
        }
        FairShareMode::GeneralHalfFair => (rational::ratio(d as i64, n), d),
    };
    let low = rational::ceil_u32(&unit).max(1).min(high);
    let mut t = Vec::with_capacity(instance.n());
    for (player, p) in instance.players.iter().enumerate() {
        let ti = match &p.report {
            Report::Preference(ti) => {
                if *ti < low || *ti > high {
                    return Err(SchedulerError::PreferenceOutOfRange {
                        player,
                        t: *ti,
                        low,
                        high,
                    });
                }
                *ti
            }
            other => best_preference(&other.cdf(), &unit, low, high),
        };
        t.push(ti);
    }
    let p: Vec<Prob> = t
        .iter()
        .map(|&ti| rational::min(&rational::one(), &(&unit / rational::int(ti as i64))))
        .collect();
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by_key(|&i| (t[i], i));
    let mut start = vec![Prob::zero(); t.len()];
    let mut acc = Prob::zero();
    for &i in &order {
        start[i] = acc.clone();
        acc += &p[i];
    }
    Ok(Layout {
        unit,
        low,
        high,
        t,
        p,
        start,
        order,
    })
}

impl Layout {
    /// Players whose interval contains `Z + r` for some integer `Z`, in layout order.
    pub fn selected_at(&self, r: &Prob) -> Vec<usize> {
        self.order
            .iter()
            .copied()
            .filter(|&i| {
                if self.p[i].is_zero() {
                    return false;
                }
                let z = (&self.start[i] - r).ceil();
                z + r < &self.start[i] + &self.p[i]
            })
            .collect()
    }
}

fn frac(x: &Prob) -> Prob {
    x - x.floor()
}

/// Cells between consecutive distinct interval endpoints, merged by selected set.
pub fn interval_cells(layout: &Layout) -> Vec<IntervalCell> {
    let mut points = vec![Prob::zero(), Prob::one()];
    for i in 0..layout.t.len() {
        points.push(frac(&layout.start[i]));
        points.push(frac(&(&layout.start[i] + &layout.p[i])));
    }
    points.sort();
    points.dedup();
    let mut merged: BTreeMap<Vec<usize>, Prob> = BTreeMap::new();
    for w in points.windows(2) {
        let mid = (&w[0] + &w[1]) / rational::int(2);
        let selected = layout.selected_at(&mid);
        *merged.entry(selected).or_insert_with(Prob::zero) += &w[1] - &w[0];
    }
    merged
        .into_iter()
        .map(|(selected, weight)| IntervalCell { weight, selected })
        .collect()
}

#[derive(Debug)]
struct Plan {
    /// Each bundle lists `(player, steps)` in run order.
    bundles: Vec<Vec<(usize, u32)>>,
}

pub(crate) struct FairShare {
    plans: Vec<Plan>,
    lottery: Lottery,
}

impl FairShare {
    pub(crate) fn new(
        instance: &Instance,
        mode: FairShareMode,
        m: Option<u32>,
    ) -> Result<Self, SchedulerError> {
        let layout = layout(instance, mode, m)?;
        let deadline = instance.deadline;
        let cells = interval_cells(&layout);
        let mut plans = Vec::with_capacity(cells.len());
        for cell in &cells {
            let grants: Vec<(usize, u32)> =
                cell.selected.iter().map(|&i| (i, layout.t[i])).collect();
            let total: u32 = grants.iter().map(|g| g.1).sum();
            let bundles = match mode {
                FairShareMode::BoundedM if total > deadline => {
                    return Err(SchedulerError::TimeOverflow {
                        granted: total,
                        deadline,
                    })
                }
                FairShareMode::BoundedM => vec![grants],
                FairShareMode::GeneralHalfFair => {
                    // Always two bundles, even when one would do, so a selected
                    // player runs with probability exactly 1/2 whatever it reports.
                    let mut bundles = first_fit_decreasing(&grants, deadline);
                    if bundles.len() > 2 {
                        return Err(SchedulerError::SplitOverflow {
                            bundles: bundles.len(),
                        });
                    }
                    bundles.resize(2, Vec::new());
                    bundles
                }
            };
            plans.push(Plan { bundles });
        }
        let lottery = Lottery::from_weights(cells.into_iter().map(|c| c.weight).collect())
            .expect("cells partition [0,1)");
        Ok(FairShare { plans, lottery })
    }
}

/// Bins of capacity `deadline`; each bin keeps increasing `(t, index)` order.
fn first_fit_decreasing(grants: &[(usize, u32)], deadline: u32) -> Vec<Vec<(usize, u32)>> {
    let mut sorted = grants.to_vec();
    sorted.sort_by_key(|&(i, t)| (std::cmp::Reverse(t), i));
    let mut bins: Vec<(u32, Vec<(usize, u32)>)> = Vec::new();
    for g in sorted {
        match bins.iter_mut().find(|(used, _)| used + g.1 <= deadline) {
            Some((used, items)) => {
                *used += g.1;
                items.push(g);
            }
            None => bins.push((g.1, vec![g])),
        }
    }
    bins.into_iter()
        .map(|(_, mut items)| {
            items.sort_by_key(|&(i, t)| (t, i));
            items
        })
        .collect()
}

struct FairShareSession<'a> {
    mech: &'a FairShare,
    queue: Option<&'a [(usize, u32)]>,
    pos: usize,
    pad: Pad,
}

impl Mechanism for FairShare {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::FairShareLottery.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(FairShareSession {
            mech: self,
            queue: None,
            pos: 0,
            pad: Pad::default(),
        })
    }
}

impl Session for FairShareSession<'_> {
    fn next(&mut self, _remaining: u32, rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        if let Some(idle) = self.pad.take() {
            return Ok(idle);
        }
        let queue = match self.queue {
            Some(q) => q,
            None => {
                let plan = &self.mech.plans[rng.weighted_choice(&self.mech.lottery)];
                let b = rng.uniform(plan.bundles.len());
                let q = plan.bundles[b].as_slice();
                self.queue = Some(q);
                q
            }
        };
        match queue.get(self.pos) {
            Some(&(player, steps)) => {
                self.pos += 1;
                Ok(self.pad.run(player, steps))
            }
            None => Ok(Directive::Halt),
        }
    }

    fn observe(&mut self, obs: Observation) {
        self.pad.observe(obs);
    }
}
