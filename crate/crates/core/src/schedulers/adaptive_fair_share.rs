use super::common::{positive_argmax, LazyOrder, Memo};
use super::{Mechanism, SchedulerError, SchedulerKind};
use crate::cdf::LengthCdf;
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Session};
use crate::random::RandomSource;
use crate::rational::{self, Prob};

/// Random order; with probability 1/2 the first player runs to completion,
/// then every remaining player gets one lottery round with expectation
/// `R/m` (time left over players left).
pub(crate) struct AdaptiveFairShare {
    cdfs: Vec<LengthCdf>,
    rounds: Memo<(usize, u32, u32), Option<u32>>,
}

impl AdaptiveFairShare {
    pub(crate) fn new(instance: &Instance) -> Self {
        AdaptiveFairShare {
            cdfs: instance.players.iter().map(|p| p.report.cdf()).collect(),
            rounds: Memo::new(),
        }
    }

    /// Best `t` in `1..=R` for `f(t) * min(1, R/(m t))`; `None` if nothing helps.
    fn round(&self, player: usize, remaining: u32, players_left: u32) -> Option<u32> {
        self.rounds.get_or_insert_with((player, remaining, players_left), || {
            let f = &self.cdfs[player];
            let expectation = rational::ratio(remaining as i64, players_left as i64);
            positive_argmax((1..=remaining).map(|t| {
                let tt = rational::int(t as i64);
                let win: Prob = rational::min(&rational::one(), &(&expectation / tt));
                (t, f.at(t) * win)
            }))
            .map(|(t, _)| t)
        })
    }
}

struct AdaptiveFairShareSession<'a> {
    mech: &'a AdaptiveFairShare,
    order: LazyOrder,
    started: bool,
}

impl Mechanism for AdaptiveFairShare {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::AdaptiveFairShare.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(AdaptiveFairShareSession {
            mech: self,
            order: LazyOrder::new(0..self.cdfs.len()),
            started: false,
        })
    }
}

impl Session for AdaptiveFairShareSession<'_> {
    fn next(&mut self, remaining: u32, rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        if !self.started {
            self.started = true;
            if rng.chance_ratio(1, 2) {
                let player = self.order.next(rng).expect("at least one player");
                return Ok(Directive::Run {
                    player,
                    steps: remaining,
                });
            }
        }
        while let Some(player) = self.order.next(rng) {
            let left = self.order.remaining() as u32 + 1;
            if let Some(t) = self.mech.round(player, remaining, left) {
                if rng.chance_ratio(remaining as u64, left as u64 * t as u64) {
                    return Ok(Directive::Run { player, steps: t });
                }
            }
        }
        Ok(Directive::Halt)
    }
}
