//! The step-level protocol between a scheduler session and the engine.

use serde::{Deserialize, Serialize};

use crate::random::RandomSource;
use crate::schedulers::SchedulerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directive {
    /// Run `player` for up to `steps` steps. Running a player whose previous
    /// allotment ran out, after some other directive, is a resume.
    Run { player: usize, steps: u32 },
    Idle(u32),
    Halt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    /// The job completed after `steps` steps of the current allotment.
    Finished { player: usize, steps: u32 },
    /// The allotment ran out before the job completed.
    Exhausted { player: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adaptivity {
    Nonadaptive,
    Adaptive,
    Preemptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    pub adaptivity: Adaptivity,
    pub oblivious: bool,
    pub complete: bool,
    pub deterministic: bool,
}

impl Capabilities {
    pub fn preemptive(&self) -> bool {
        self.adaptivity == Adaptivity::Preemptive
    }
}

/// One play of a mechanism. Sessions are fresh per trial and draw all their
/// randomness from the source the engine passes in.
pub trait Session {
    fn next(
        &mut self,
        remaining: u32,
        rng: &mut dyn RandomSource,
    ) -> Result<Directive, SchedulerError>;

    fn observe(&mut self, _obs: Observation) {}
}
