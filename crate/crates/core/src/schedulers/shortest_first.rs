use super::{Mechanism, SchedulerError};
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Session};
use crate::random::RandomSource;
use crate::schedulers::SchedulerKind;

/// Increasing estimate, ties by index; each job gets exactly its estimate.
pub(crate) struct ShortestFirst {
    order: Vec<(usize, u32)>,
}

impl ShortestFirst {
    pub(crate) fn new(instance: &Instance) -> Self {
        let mut order: Vec<(usize, u32)> = instance
            .players
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.report.estimate()))
            .collect();
        order.sort_by_key(|&(i, r)| (r, i));
        ShortestFirst { order }
    }
}

struct ShortestFirstSession<'a> {
    order: &'a [(usize, u32)],
    pos: usize,
}

impl Mechanism for ShortestFirst {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::ShortestFirst.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(ShortestFirstSession {
            order: &self.order,
            pos: 0,
        })
    }
}

impl Session for ShortestFirstSession<'_> {
    fn next(&mut self, remaining: u32, _rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        match self.order.get(self.pos) {
            Some(&(player, steps)) if steps <= remaining => {
                self.pos += 1;
                Ok(Directive::Run { player, steps })
            }
            _ => Ok(Directive::Halt),
        }
    }
}
