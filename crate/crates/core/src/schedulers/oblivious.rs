//! Schedulers that never read reports.

use super::common::{ceil_div, ceil_log2, LazyOrder};
use super::{Mechanism, SchedulerError, SchedulerKind};
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Session};
use crate::random::RandomSource;

#[derive(Debug, Clone, Copy)]
enum Cap {
    None,
    Fixed(u32),
    /// `T = min(D, 2^i * ceil(D/n))`, `i` uniform in `1..=levels`.
    RandomLevel { levels: u32, unit: u32 },
}

pub(crate) struct Oblivious {
    kind: SchedulerKind,
    n: usize,
    deadline: u32,
    cap: Cap,
}

/// Smallest `T` with `T >= D / sqrt(n)`.
fn default_timeout(deadline: u32, n: usize) -> u32 {
    let target = (deadline as u128).pow(2);
    let n = n as u128;
    let mut t = ((deadline as f64) / (n as f64).sqrt()).floor().max(1.0) as u128;
    while t > 1 && (t - 1) * (t - 1) * n >= target {
        t -= 1;
    }
    while t * t * n < target {
        t += 1;
    }
    t as u32
}

impl Oblivious {
    pub(crate) fn trivial(instance: &Instance) -> Self {
        Oblivious {
            kind: SchedulerKind::TrivialOblivious,
            n: instance.n(),
            deadline: instance.deadline,
            cap: Cap::None,
        }
    }

    pub(crate) fn timeout(instance: &Instance, timeout: Option<u32>) -> Result<Self, SchedulerError> {
        let t = timeout.unwrap_or_else(|| default_timeout(instance.deadline, instance.n()));
        if t == 0 {
            return Err(SchedulerError::InvalidParameter("timeout must be at least 1".into()));
        }
        Ok(Oblivious {
            kind: SchedulerKind::TimeoutOblivious,
            n: instance.n(),
            deadline: instance.deadline,
            cap: Cap::Fixed(t),
        })
    }

    pub(crate) fn random_threshold(instance: &Instance) -> Self {
        let n = instance.n();
        Oblivious {
            kind: SchedulerKind::RandomThresholdOblivious,
            n,
            deadline: instance.deadline,
            cap: Cap::RandomLevel {
                levels: ceil_log2(n).max(1),
                unit: ceil_div(instance.deadline, n as u32),
            },
        }
    }
}

struct ObliviousSession<'a> {
    mech: &'a Oblivious,
    cap: Option<u32>,
    order: Option<LazyOrder>,
}

impl Mechanism for Oblivious {
    fn capabilities(&self) -> Capabilities {
        self.kind.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(ObliviousSession {
            mech: self,
            cap: None,
            order: None,
        })
    }
}

impl Session for ObliviousSession<'_> {
    fn next(&mut self, remaining: u32, rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        if self.order.is_none() {
            self.cap = match self.mech.cap {
                Cap::None => None,
                Cap::Fixed(t) => Some(t),
                Cap::RandomLevel { levels, unit } => {
                    let i = 1 + rng.uniform(levels as usize) as u32;
                    let t = (unit as u64) << i;
                    Some(t.min(self.mech.deadline as u64) as u32)
                }
            };
            self.order = Some(LazyOrder::new(0..self.mech.n));
        }
        let order = self.order.as_mut().expect("order initialized");
        Ok(match order.next(rng) {
            Some(player) => Directive::Run {
                player,
                steps: self.cap.map_or(remaining, |t| t.min(remaining)),
            },
            None => Directive::Halt,
        })
    }
}
