//! Drives sessions against instances: single runs, exact enumeration and
//! Monte Carlo estimation.

mod exact;
mod monte_carlo;
mod result;

use num_traits::{One, Zero};

use crate::cdf::{LengthCdf, Realization};
use crate::model::Instance;
use crate::protocol::{Capabilities, Directive, Observation, Session};
use crate::random::{Lottery, RandomSource};
use crate::rational::Prob;
use crate::schedulers::SchedulerError;

pub use exact::{enumerate_leaves, exact_evaluate, exact_evaluate_with, LengthMode, DEFAULT_BRANCH_LIMIT};
pub use monte_carlo::{monte_carlo, monte_carlo_with};
pub use result::{Estimate, EvalMode, EvalResult, CSV_SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("directive asks for {requested} steps with only {remaining} left")]
    BudgetExceeded { requested: u32, remaining: u32 },
    #[error("player {player} resumed by a scheduler that did not declare preemption")]
    PreemptionNotDeclared { player: usize },
    #[error("player {player} run after finishing")]
    RunAfterFinish { player: usize },
    #[error("directive names unknown player {player}")]
    UnknownPlayer { player: usize },
    #[error("directive with a zero-step allotment")]
    EmptyAllotment,
    #[error("branch limit exceeded: exact enumeration stopped after {reached} branches")]
    BranchLimitExceeded { reached: u64 },
    #[error("{given} realized lengths for {players} players")]
    LengthCount { given: usize, players: usize },
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
}

/// A maximal block of consecutive steps given to one player (or idled).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub player: Option<usize>,
    /// First step, counted from 1.
    pub start: u32,
    pub steps: u32,
    pub finished: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub deadline: u32,
    pub segments: Vec<Segment>,
    pub run_steps: Vec<u32>,
    /// Step at which each player finished.
    pub finished_at: Vec<Option<u32>>,
    pub total_used: u32,
}

impl Trace {
    /// Player (or idle) at each step `1..=total_used`.
    pub fn timeline(&self) -> Vec<Option<usize>> {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.player, s.steps as usize))
            .collect()
    }

    pub fn finished(&self, player: usize) -> bool {
        self.finished_at[player].is_some()
    }

    pub fn welfare(&self) -> usize {
        self.finished_at.iter().filter(|f| f.is_some()).count()
    }

    /// Segments in which `player` ran out of time.
    pub fn aborted_segments(&self, player: usize) -> Vec<Segment> {
        self.segments
            .iter()
            .filter(|s| s.player == Some(player) && !s.finished)
            .copied()
            .collect()
    }
}

/// Decides when a job completes while it runs.
trait Nature {
    /// Steps until `player` completes within `steps` more steps after
    /// `progress`, or `None` if it does not.
    fn resolve(&mut self, player: usize, progress: u32, steps: u32, rng: &mut dyn RandomSource) -> Option<u32>;
}

struct Known<'a>(&'a [Realization]);

impl Nature for Known<'_> {
    fn resolve(&mut self, player: usize, progress: u32, steps: u32, _rng: &mut dyn RandomSource) -> Option<u32> {
        match self.0[player] {
            Realization::Finishes(l) if l <= progress + steps => Some(l - progress),
            _ => None,
        }
    }
}

/// Branches on "finishes after k more steps" versus "still running",
/// conditioned on the job not having finished within `progress` steps.
struct Lazy<'a>(&'a [LengthCdf]);

impl Nature for Lazy<'_> {
    fn resolve(&mut self, player: usize, progress: u32, steps: u32, rng: &mut dyn RandomSource) -> Option<u32> {
        let f = &self.0[player];
        let survive = Prob::one() - f.at(progress);
        let mut weights: Vec<Prob> = (1..=steps).map(|k| f.mass(progress + k) / &survive).collect();
        weights.push((Prob::one() - f.at(progress + steps)) / &survive);
        let mut nonzero = weights.iter().enumerate().filter(|(_, w)| !w.is_zero());
        let first = nonzero.next().map(|(i, _)| i).expect("conditional distribution");
        let index = if nonzero.next().is_none() {
            first
        } else {
            rng.weighted_choice(&Lottery::from_weights(weights).expect("conditional distribution"))
        };
        (index < steps as usize).then_some(index as u32 + 1)
    }
}

fn drive(
    session: &mut dyn Session,
    caps: Capabilities,
    deadline: u32,
    n: usize,
    nature: &mut dyn Nature,
    rng: &mut dyn RandomSource,
) -> Result<Trace, EngineError> {
    let mut trace = Trace {
        deadline,
        segments: Vec::new(),
        run_steps: vec![0; n],
        finished_at: vec![None; n],
        total_used: 0,
    };
    let mut paused = vec![false; n];
    let mut just_exhausted: Option<usize> = None;
    while trace.total_used < deadline {
        let remaining = deadline - trace.total_used;
        let directive = session.next(remaining, rng)?;
        if let Some(p) = just_exhausted.take() {
            if directive != Directive::Halt && !matches!(directive, Directive::Run { player, .. } if player == p) {
                paused[p] = true;
            }
        }
        match directive {
            Directive::Halt => break,
            Directive::Idle(steps) => {
                check_allotment(steps, remaining)?;
                trace.segments.push(Segment {
                    player: None,
                    start: trace.total_used + 1,
                    steps,
                    finished: false,
                });
                trace.total_used += steps;
            }
            Directive::Run { player, steps } => {
                if player >= n {
                    return Err(EngineError::UnknownPlayer { player });
                }
                check_allotment(steps, remaining)?;
                if trace.finished_at[player].is_some() {
                    return Err(EngineError::RunAfterFinish { player });
                }
                if paused[player] && !caps.preemptive() {
                    return Err(EngineError::PreemptionNotDeclared { player });
                }
                let start = trace.total_used + 1;
                let outcome = nature.resolve(player, trace.run_steps[player], steps, rng);
                let used = outcome.unwrap_or(steps);
                trace.run_steps[player] += used;
                trace.total_used += used;
                trace.segments.push(Segment {
                    player: Some(player),
                    start,
                    steps: used,
                    finished: outcome.is_some(),
                });
                match outcome {
                    Some(s) => {
                        trace.finished_at[player] = Some(trace.total_used);
                        session.observe(Observation::Finished { player, steps: s });
                    }
                    None => {
                        just_exhausted = Some(player);
                        session.observe(Observation::Exhausted { player });
                    }
                }
            }
        }
    }
    Ok(trace)
}

fn check_allotment(steps: u32, remaining: u32) -> Result<(), EngineError> {
    if steps == 0 {
        return Err(EngineError::EmptyAllotment);
    }
    if steps > remaining {
        return Err(EngineError::BudgetExceeded {
            requested: steps,
            remaining,
        });
    }
    Ok(())
}

/// Plays `session` once with known lengths.
pub fn run_once(
    session: &mut dyn Session,
    caps: Capabilities,
    instance: &Instance,
    lengths: &[Realization],
    rng: &mut dyn RandomSource,
) -> Result<Trace, EngineError> {
    if lengths.len() != instance.n() {
        return Err(EngineError::LengthCount {
            given: lengths.len(),
            players: instance.n(),
        });
    }
    drive(session, caps, instance.deadline, instance.n(), &mut Known(lengths), rng)
}

/// Deterministic lengths given as plain integers.
pub fn finishes(lengths: &[u32]) -> Vec<Realization> {
    lengths.iter().map(|&l| Realization::Finishes(l)).collect()
}
