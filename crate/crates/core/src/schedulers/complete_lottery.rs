use super::common::{positive_argmax, LazyOrder, Memo};
use super::{Mechanism, SchedulerError, SchedulerKind};
use crate::cdf::LengthCdf;
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Observation, Session};
use crate::random::RandomSource;
use crate::rational;

/// Random order. Each player first runs until only one step per remaining
/// player is left, then (if unfinished) plays a lottery of expectation 1:
/// `t` steps with probability `1/t`.
pub(crate) struct CompleteLottery {
    cdfs: Vec<LengthCdf>,
    lotteries: Memo<(usize, u32, u32), Option<u32>>,
}

impl CompleteLottery {
    pub(crate) fn new(instance: &Instance) -> Result<Self, SchedulerError> {
        if instance.n() < 3 {
            return Err(SchedulerError::TooFewPlayers {
                n: instance.n(),
                required: 3,
            });
        }
        Ok(CompleteLottery {
            cdfs: instance.players.iter().map(|p| p.report.cdf()).collect(),
            lotteries: Memo::new(),
        })
    }

    /// Best `t <= remaining` for `(F(c+t) - F(c)) / t` after `progress` steps.
    fn lottery(&self, player: usize, progress: u32, remaining: u32) -> Option<u32> {
        self.lotteries.get_or_insert_with((player, progress, remaining), || {
            let f = &self.cdfs[player];
            let base = f.at(progress);
            positive_argmax(
                (1..=remaining)
                    .map(|t| (t, (f.at(progress + t) - &base) / rational::int(t as i64))),
            )
            .map(|(t, _)| t)
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Stage {
    Between,
    Preliminary { player: usize, progress: u32 },
    Lottery { player: usize, progress: u32 },
}

struct CompleteLotterySession<'a> {
    mech: &'a CompleteLottery,
    order: LazyOrder,
    stage: Stage,
}

impl Mechanism for CompleteLottery {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::CompleteLottery.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(CompleteLotterySession {
            mech: self,
            order: LazyOrder::new(0..self.cdfs.len()),
            stage: Stage::Between,
        })
    }
}

impl Session for CompleteLotterySession<'_> {
    fn next(&mut self, remaining: u32, rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        loop {
            match self.stage {
                Stage::Between => {
                    let Some(player) = self.order.next(rng) else {
                        return Ok(Directive::Halt);
                    };
                    let others = self.order.remaining() as u32;
                    if remaining > others {
                        let steps = remaining - others;
                        self.stage = Stage::Preliminary {
                            player,
                            progress: steps,
                        };
                        return Ok(Directive::Run { player, steps });
                    }
                    self.stage = Stage::Lottery {
                        player,
                        progress: 0,
                    };
                }
                Stage::Preliminary { player, progress } => {
                    self.stage = Stage::Lottery { player, progress };
                }
                Stage::Lottery { player, progress } => {
                    self.stage = Stage::Between;
                    if let Some(t) = self.mech.lottery(player, progress, remaining) {
                        if rng.chance_ratio(1, t as u64) {
                            return Ok(Directive::Run { player, steps: t });
                        }
                    }
                }
            }
        }
    }

    fn observe(&mut self, obs: Observation) {
        if let Observation::Finished { .. } = obs {
            self.stage = Stage::Between;
        }
    }
}
