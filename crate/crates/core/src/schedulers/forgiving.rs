//! Mechanisms whose payoff depends on the report only through `|r - l|`.

use super::common::LazyOrder;
use super::{Mechanism, SchedulerError, SchedulerKind};
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Observation, Session};
use crate::random::RandomSource;

/// Random order; player with report `r` and unit `u` is granted `r` steps with
/// probability `g(r) = min(1, u/r)`. While unfinished after `r + j` steps it
/// gets one more step with probability `g(r+2j+2) / g(r+2j)`, so the chance of
/// reaching length `l > r` is `g(2l - r)`.
pub(crate) struct ForgivingLottery {
    reports: Vec<u32>,
    unit: Option<u32>,
}

impl ForgivingLottery {
    pub(crate) fn new(instance: &Instance, unit: Option<u32>) -> Result<Self, SchedulerError> {
        if unit == Some(0) {
            return Err(SchedulerError::InvalidParameter("unit must be at least 1".into()));
        }
        Ok(ForgivingLottery {
            reports: instance.players.iter().map(|p| p.report.estimate()).collect(),
            unit,
        })
    }
}

/// `g(a+2) / g(a)` as a fraction, with `g(x) = min(1, u/x)`.
fn continuation(unit: u32, a: u32) -> (u64, u64) {
    let b = a + 2;
    if unit >= b {
        (1, 1)
    } else if unit >= a {
        (unit as u64, b as u64)
    } else {
        (a as u64, b as u64)
    }
}

#[derive(Debug, Clone, Copy)]
struct Grant {
    player: usize,
    report: u32,
    unit: u32,
    extra: u32,
}

struct ForgivingLotterySession<'a> {
    mech: &'a ForgivingLottery,
    order: LazyOrder,
    grant: Option<Grant>,
}

impl Mechanism for ForgivingLottery {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::ForgivingLottery.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(ForgivingLotterySession {
            mech: self,
            order: LazyOrder::new(0..self.reports.len()),
            grant: None,
        })
    }
}

impl Session for ForgivingLotterySession<'_> {
    fn next(&mut self, remaining: u32, rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        if let Some(mut g) = self.grant.take() {
            let (num, den) = continuation(g.unit, g.report + 2 * g.extra);
            if rng.chance_ratio(num, den) {
                g.extra += 1;
                self.grant = Some(g);
                return Ok(Directive::Run {
                    player: g.player,
                    steps: 1,
                });
            }
        }
        while let Some(player) = self.order.next(rng) {
            let left = self.order.remaining() as u32 + 1;
            let unit = self.mech.unit.unwrap_or(remaining / left);
            let report = self.mech.reports[player];
            if unit > 0 && rng.chance_ratio(unit as u64, report as u64) {
                self.grant = Some(Grant {
                    player,
                    report,
                    unit,
                    extra: 0,
                });
                return Ok(Directive::Run {
                    player,
                    steps: report.min(remaining),
                });
            }
        }
        Ok(Directive::Halt)
    }

    fn observe(&mut self, obs: Observation) {
        if let Observation::Finished { .. } = obs {
            self.grant = None;
        }
    }
}

/// Deterministic preemptive mechanism: each step runs the unfinished player
/// with the smallest virtual length `v_i` (ties to the lower index). `v_i`
/// starts at the report and grows by 2 for every step a player spends past it.
pub(crate) struct VirtualLength {
    reports: Vec<u32>,
}

impl VirtualLength {
    pub(crate) fn new(instance: &Instance) -> Self {
        VirtualLength {
            reports: instance.players.iter().map(|p| p.report.estimate()).collect(),
        }
    }
}

impl Mechanism for VirtualLength {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::ForgivingVirtualLength.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(VirtualLengthSession::new(&self.reports))
    }
}

#[derive(Debug, Clone)]
pub struct VirtualLengthSession {
    reports: Vec<u32>,
    ran: Vec<u32>,
    virtual_length: Vec<u32>,
    finished: Vec<bool>,
    current: Option<usize>,
}

impl VirtualLengthSession {
    pub fn new(reports: &[u32]) -> Self {
        VirtualLengthSession {
            reports: reports.to_vec(),
            ran: vec![0; reports.len()],
            virtual_length: reports.to_vec(),
            finished: vec![false; reports.len()],
            current: None,
        }
    }

    pub fn virtual_lengths(&self) -> &[u32] {
        &self.virtual_length
    }
}

impl Session for VirtualLengthSession {
    fn next(&mut self, _remaining: u32, _rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        let pick = (0..self.reports.len())
            .filter(|&i| !self.finished[i])
            .min_by_key(|&i| (self.virtual_length[i], i));
        self.current = pick;
        Ok(match pick {
            Some(player) => Directive::Run { player, steps: 1 },
            None => Directive::Halt,
        })
    }

    fn observe(&mut self, obs: Observation) {
        let Some(p) = self.current.take() else {
            return;
        };
        self.ran[p] += 1;
        match obs {
            Observation::Finished { .. } => self.finished[p] = true,
            Observation::Exhausted { .. } => {
                if self.ran[p] >= self.reports[p] {
                    self.virtual_length[p] += 2;
                }
            }
        }
    }
}
