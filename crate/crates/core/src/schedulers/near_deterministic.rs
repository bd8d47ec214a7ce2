use super::common::LazyOrder;
use super::{Mechanism, SchedulerError, SchedulerKind};
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Session};
use crate::random::RandomSource;

/// Threshold from reports alone: start at twice the mean of the longest
/// sorted prefix that fits in `D`, and double while the reports just under
/// the threshold outnumber the comfortably short ones by more than
/// `2^ceil(sqrt(log2 n))`.
pub fn threshold_for(estimates: &[u32], deadline: u32) -> u32 {
    let n = estimates.len();
    let mut sorted = estimates.to_vec();
    sorted.sort_unstable();
    let mut sum = 0u64;
    let mut count = 0u64;
    for &e in &sorted {
        if sum + e as u64 > deadline as u64 {
            break;
        }
        sum += e as u64;
        count += 1;
    }
    let mut t = if count == 0 {
        deadline
    } else {
        (2 * sum).div_ceil(count).min(deadline as u64) as u32
    };
    let slack = 1u64 << (n.max(1) as f64).log2().sqrt().ceil() as u32;
    loop {
        let good = sorted.iter().filter(|&&e| 2 * e as u64 <= t as u64).count() as u64;
        let dangerous = sorted.iter().filter(|&&e| 2 * e as u64 > t as u64 && e <= t).count() as u64;
        if dangerous <= slack * good || 2 * t as u64 > deadline as u64 {
            return t;
        }
        t *= 2;
    }
}

pub(crate) struct NearDeterministic {
    n: usize,
    threshold: u32,
    eligible: Vec<usize>,
    excluded: Vec<usize>,
}

impl NearDeterministic {
    pub(crate) fn new(instance: &Instance) -> Self {
        let estimates: Vec<u32> = instance.players.iter().map(|p| p.report.estimate()).collect();
        let threshold = threshold_for(&estimates, instance.deadline);
        let (eligible, excluded) = (0..instance.n()).partition(|&i| estimates[i] <= threshold);
        NearDeterministic {
            n: instance.n(),
            threshold,
            eligible,
            excluded,
        }
    }
}

struct NearDeterministicSession<'a> {
    mech: &'a NearDeterministic,
    order: LazyOrder,
    next_excluded: usize,
}

impl Mechanism for NearDeterministic {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::NearDeterministicThreshold.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(NearDeterministicSession {
            mech: self,
            order: LazyOrder::new(self.eligible.iter().copied()),
            next_excluded: 0,
        })
    }
}

impl Session for NearDeterministicSession<'_> {
    fn next(&mut self, remaining: u32, rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        if let Some(player) = self.order.next(rng) {
            return Ok(Directive::Run {
                player,
                steps: self.mech.threshold.min(remaining),
            });
        }
        while let Some(&player) = self.mech.excluded.get(self.next_excluded) {
            self.next_excluded += 1;
            if rng.chance_ratio(1, 2 * self.mech.n as u64) {
                return Ok(Directive::Run {
                    player,
                    steps: remaining,
                });
            }
        }
        Ok(Directive::Halt)
    }
}
