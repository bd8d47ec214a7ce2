use super::common::{argmax_smallest, ceil_div, LazyOrder, Pad};
use super::{Mechanism, SchedulerError, SchedulerKind};
use crate::cdf::LengthCdf;
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Observation, Session};
use crate::random::RandomSource;
use crate::rational::{self, Prob};

/// Smallest maximizer of `f(t)/t` over `ceil(D/n) <= t <= D`.
pub fn canonical_threshold(f: &LengthCdf, n: usize, deadline: u32) -> u32 {
    let low = ceil_div(deadline, n as u32).max(1);
    argmax_smallest((low..=deadline).map(|t| (t, f.at(t) / rational::int(t as i64))))
        .map(|(t, _)| t)
        .unwrap_or(deadline)
}

pub(crate) struct Canonical {
    n: usize,
    t: u32,
    jobs: usize,
}

impl Canonical {
    pub(crate) fn new(instance: &Instance) -> Result<Self, SchedulerError> {
        let f = instance.players[0].report.cdf();
        if instance.players.iter().any(|p| p.report.cdf() != f) {
            return Err(SchedulerError::NotIdenticalInstance);
        }
        let n = instance.n();
        let t = canonical_threshold(&f, n, instance.deadline);
        let jobs = n.min((instance.deadline / t) as usize);
        Ok(Canonical { n, t, jobs })
    }
}

/// Expected welfare of the canonical schedule when every job truly follows `f`.
pub fn canonical_welfare(f: &LengthCdf, n: usize, deadline: u32) -> Prob {
    let t = canonical_threshold(f, n, deadline);
    let jobs = n.min((deadline / t) as usize);
    f.at(t) * rational::int(jobs as i64)
}

struct CanonicalSession<'a> {
    mech: &'a Canonical,
    order: LazyOrder,
    started: usize,
    pad: Pad,
}

impl Mechanism for Canonical {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::Canonical.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(CanonicalSession {
            mech: self,
            order: LazyOrder::new(0..self.n),
            started: 0,
            pad: Pad::default(),
        })
    }
}

impl Session for CanonicalSession<'_> {
    fn next(&mut self, _remaining: u32, rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        if let Some(idle) = self.pad.take() {
            return Ok(idle);
        }
        if self.started == self.mech.jobs {
            return Ok(Directive::Halt);
        }
        self.started += 1;
        let player = self.order.next(rng).expect("jobs <= n");
        Ok(self.pad.run(player, self.mech.t))
    }

    fn observe(&mut self, obs: Observation) {
        self.pad.observe(obs);
    }
}
