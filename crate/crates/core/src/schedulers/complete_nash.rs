//! Two-phase complete scheduler whose lottery parameters come from backward
//! induction under truthful reports.
//!
//! Phase 1 visits players in a random order. A player facing `R` remaining
//! steps with `m` phase-1 players left (itself included) gets expectation
//! `E = floor(R/m)`: `t` steps with probability `E/t` for the `t` in `E..=R`
//! that maximizes its total finish probability, given that later players
//! choose the same way. Phase 2 resumes every unfinished player in order and
//! runs it to completion.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Zero};

use super::common::LazyOrder;
use super::{Mechanism, SchedulerError, SchedulerKind};
use crate::cdf::LengthCdf;
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Observation, Session};
use crate::random::RandomSource;
use crate::rational::{self, Prob};

const DEFAULT_TABLE_LIMIT: u64 = 100_000_000;
const DEFAULT_STATE_LIMIT: usize = 2_000_000;

/// `None` marks a finished player, `Some(c)` an unfinished one after `c` steps.
type Progress = Vec<Option<u32>>;
type Key = (Vec<usize>, usize, u32, Progress);

#[derive(Clone)]
struct Node {
    choice: Option<u32>,
    finish: Vec<Prob>,
}

pub(crate) struct CompleteNash {
    cdfs: Vec<LengthCdf>,
    state_limit: usize,
    memo: Mutex<HashMap<Key, Node>>,
}

impl CompleteNash {
    pub(crate) fn new(
        instance: &Instance,
        table_limit: Option<u64>,
        state_limit: Option<usize>,
    ) -> Result<Self, SchedulerError> {
        let limit = table_limit.unwrap_or(DEFAULT_TABLE_LIMIT);
        let size = (instance.n() as u64).saturating_mul((instance.deadline as u64).pow(3));
        if size > limit {
            return Err(SchedulerError::TableLimitExceeded { size, limit });
        }
        Ok(CompleteNash {
            cdfs: instance.players.iter().map(|p| p.report.cdf()).collect(),
            state_limit: state_limit.unwrap_or(DEFAULT_STATE_LIMIT),
            memo: Mutex::new(HashMap::new()),
        })
    }

    fn choice(
        &self,
        list: &[usize],
        j: usize,
        remaining: u32,
        progress: &Progress,
    ) -> Result<Option<u32>, SchedulerError> {
        let mut memo = self.memo.lock().expect("memo lock");
        let mut solver = Solver {
            cdfs: &self.cdfs,
            list,
            memo: &mut memo,
            limit: self.state_limit,
        };
        Ok(solver.solve(j, remaining, progress)?.choice)
    }
}

struct Solver<'a> {
    cdfs: &'a [LengthCdf],
    list: &'a [usize],
    memo: &'a mut HashMap<Key, Node>,
    limit: usize,
}

impl Solver<'_> {
    fn solve(&mut self, j: usize, remaining: u32, progress: &Progress) -> Result<Node, SchedulerError> {
        let key = (self.list.to_vec(), j, remaining, progress.clone());
        if let Some(node) = self.memo.get(&key) {
            return Ok(node.clone());
        }
        let node = self.compute(j, remaining, progress)?;
        if self.memo.len() >= self.limit {
            return Err(SchedulerError::TableLimitExceeded {
                size: self.memo.len() as u64 + 1,
                limit: self.limit as u64,
            });
        }
        self.memo.insert(key, node.clone());
        Ok(node)
    }

    fn child(
        &mut self,
        j: usize,
        remaining: u32,
        progress: &Progress,
        next: Option<u32>,
    ) -> Result<Vec<Prob>, SchedulerError> {
        let mut p = progress.clone();
        p.push(next);
        Ok(self.solve(j + 1, remaining, &p)?.finish)
    }

    fn compute(&mut self, j: usize, remaining: u32, progress: &Progress) -> Result<Node, SchedulerError> {
        let m = self.list.len();
        if j == m {
            return Ok(Node {
                choice: None,
                finish: self.phase_two(remaining, progress),
            });
        }
        let expectation = remaining / (m - j) as u32;
        let lose = self.child(j, remaining, progress, Some(0))?;
        if expectation == 0 {
            return Ok(Node {
                choice: None,
                finish: lose,
            });
        }
        let f = &self.cdfs[self.list[j]];
        let mut best: Option<(u32, Vec<Prob>)> = None;
        for t in expectation..=remaining {
            let win = rational::ratio(expectation as i64, t as i64);
            let mut acc: Vec<Prob> = lose.iter().map(|v| v * (Prob::one() - &win)).collect();
            for k in 1..=t {
                let w = f.mass(k);
                if w.is_zero() {
                    continue;
                }
                let sub = self.child(j, remaining - k, progress, None)?;
                add_scaled(&mut acc, &sub, &(&win * w));
            }
            let stuck = Prob::one() - f.at(t);
            if !stuck.is_zero() {
                let sub = self.child(j, remaining - t, progress, Some(t))?;
                add_scaled(&mut acc, &sub, &(&win * stuck));
            }
            if best.as_ref().is_none_or(|(_, b)| acc[j] > b[j]) {
                best = Some((t, acc));
            }
        }
        let (t, finish) = best.expect("nonempty range");
        Ok(Node {
            choice: Some(t),
            finish,
        })
    }

    /// Finish probabilities when unfinished players run to completion in list order.
    fn phase_two(&self, remaining: u32, progress: &Progress) -> Vec<Prob> {
        let mut time = vec![Prob::zero(); remaining as usize + 1];
        time[remaining as usize] = Prob::one();
        let mut out = Vec::with_capacity(progress.len());
        for (q, state) in progress.iter().enumerate() {
            let Some(c) = *state else {
                out.push(Prob::one());
                continue;
            };
            let f = &self.cdfs[self.list[q]];
            let survive = Prob::one() - f.at(c);
            let mut next = vec![Prob::zero(); time.len()];
            let mut done = Prob::zero();
            for (r, w) in time.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                if survive.is_zero() {
                    next[0] += w;
                    continue;
                }
                let mut finished_here = Prob::zero();
                for k in 1..=r as u32 {
                    let m = f.mass(c + k);
                    if m.is_zero() {
                        continue;
                    }
                    let pk = w * m / &survive;
                    finished_here += &pk;
                    next[r - k as usize] += pk;
                }
                next[0] += w - &finished_here;
                done += finished_here;
            }
            out.push(done);
            time = next;
        }
        out
    }
}

fn add_scaled(acc: &mut [Prob], v: &[Prob], scale: &Prob) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += x * scale;
    }
}

enum Phase {
    Init,
    One { j: usize },
    Two { q: usize },
}

struct CompleteNashSession<'a> {
    mech: &'a CompleteNash,
    phase: Phase,
    list: Vec<usize>,
    progress: Progress,
    running: Option<usize>,
}

impl Mechanism for CompleteNash {
    fn capabilities(&self) -> Capabilities {
        SchedulerKind::CompleteNashDp.capabilities()
    }

    fn start(&self) -> Box<dyn Session + '_> {
        Box::new(CompleteNashSession {
            mech: self,
            phase: Phase::Init,
            list: Vec::new(),
            progress: Vec::new(),
            running: None,
        })
    }
}

impl Session for CompleteNashSession<'_> {
    fn next(&mut self, remaining: u32, rng: &mut dyn RandomSource) -> Result<Directive, SchedulerError> {
        self.running = None;
        loop {
            match self.phase {
                Phase::Init => {
                    let heads = rng.chance_ratio(1, 2);
                    let order = LazyOrder::new(0..self.mech.cdfs.len()).drain(rng);
                    self.phase = Phase::One { j: 0 };
                    if heads {
                        self.list = order[1..].to_vec();
                        return Ok(Directive::Run {
                            player: order[0],
                            steps: remaining,
                        });
                    }
                    self.list = order;
                }
                Phase::One { j } if j == self.list.len() => self.phase = Phase::Two { q: 0 },
                Phase::One { j } => {
                    self.phase = Phase::One { j: j + 1 };
                    let expectation = remaining / (self.list.len() - j) as u32;
                    let t = if expectation == 0 {
                        None
                    } else {
                        self.mech.choice(&self.list, j, remaining, &self.progress)?
                    };
                    match t {
                        Some(t) if rng.chance_ratio(expectation as u64, t as u64) => {
                            self.progress.push(Some(t));
                            self.running = Some(j);
                            return Ok(Directive::Run {
                                player: self.list[j],
                                steps: t,
                            });
                        }
                        _ => self.progress.push(Some(0)),
                    }
                }
                Phase::Two { q } => {
                    let Some(state) = self.progress.get(q).copied() else {
                        return Ok(Directive::Halt);
                    };
                    self.phase = Phase::Two { q: q + 1 };
                    if state.is_some() {
                        return Ok(Directive::Run {
                            player: self.list[q],
                            steps: remaining,
                        });
                    }
                }
            }
        }
    }

    fn observe(&mut self, obs: Observation) {
        if let (Observation::Finished { .. }, Some(j)) = (obs, self.running) {
            self.progress[j] = None;
        }
    }
}
