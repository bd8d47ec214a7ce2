use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Mutex;

use num_traits::Zero;

use crate::protocol::{Directive, Observation};
use crate::random::RandomSource;
use crate::rational::Prob;

/// Uniformly random order drawn one position at a time.
#[derive(Debug, Clone)]
pub(crate) struct LazyOrder {
    left: Vec<usize>,
}

impl LazyOrder {
    pub(crate) fn new(players: impl IntoIterator<Item = usize>) -> Self {
        LazyOrder {
            left: players.into_iter().collect(),
        }
    }

    pub(crate) fn next(&mut self, rng: &mut dyn RandomSource) -> Option<usize> {
        if self.left.is_empty() {
            return None;
        }
        let i = rng.uniform(self.left.len());
        Some(self.left.remove(i))
    }

    pub(crate) fn remaining(&self) -> usize {
        self.left.len()
    }

    /// Draws the rest of the order at once.
    pub(crate) fn drain(&mut self, rng: &mut dyn RandomSource) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.left.len());
        while let Some(p) = self.next(rng) {
            out.push(p);
        }
        out
    }
}

/// Keeps a nonadaptive schedule on its precommitted intervals: time a job
/// leaves unused is idled away rather than handed to the next job.
#[derive(Debug, Clone, Default)]
pub(crate) struct Pad {
    allotted: u32,
    debt: u32,
}

impl Pad {
    pub(crate) fn run(&mut self, player: usize, steps: u32) -> Directive {
        self.allotted = steps;
        Directive::Run { player, steps }
    }

    pub(crate) fn observe(&mut self, obs: Observation) {
        if let Observation::Finished { steps, .. } = obs {
            self.debt = self.allotted - steps;
        }
        self.allotted = 0;
    }

    pub(crate) fn take(&mut self) -> Option<Directive> {
        if self.debt > 0 {
            let d = Directive::Idle(self.debt);
            self.debt = 0;
            Some(d)
        } else {
            None
        }
    }
}

/// Smallest argument attaining the maximum value.
pub(crate) fn argmax_smallest(items: impl IntoIterator<Item = (u32, Prob)>) -> Option<(u32, Prob)> {
    let mut best: Option<(u32, Prob)> = None;
    for (t, v) in items {
        match &best {
            Some((bt, bv)) if v < *bv || (v == *bv && t >= *bt) => {}
            _ => best = Some((t, v)),
        }
    }
    best
}

/// Like [`argmax_smallest`] but `None` when the best value is zero.
pub(crate) fn positive_argmax(items: impl IntoIterator<Item = (u32, Prob)>) -> Option<(u32, Prob)> {
    argmax_smallest(items).filter(|(_, v)| !v.is_zero())
}

/// Thread-safe memo table shared by all sessions of one prepared mechanism.
#[derive(Debug)]
pub(crate) struct Memo<K, V> {
    table: Mutex<HashMap<K, V>>,
}

impl<K: Eq + Hash, V: Clone> Memo<K, V> {
    pub(crate) fn new() -> Self {
        Memo {
            table: Mutex::new(HashMap::new()),
        }
    }

    pub(crate) fn get_or_insert_with(&self, key: K, make: impl FnOnce() -> V) -> V {
        if let Some(v) = self.table.lock().expect("memo lock").get(&key) {
            return v.clone();
        }
        let v = make();
        self.table.lock().expect("memo lock").insert(key, v.clone());
        v
    }
}

pub(crate) fn ceil_div(a: u32, b: u32) -> u32 {
    a.div_ceil(b)
}

/// `⌈log₂ n⌉` for `n >= 1`.
pub(crate) fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}
