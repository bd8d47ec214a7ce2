use num_traits::{One, Zero};

use super::{drive, EngineError, Estimate, EvalMode, EvalResult, Known, Lazy, Trace};
use crate::cdf::{sample_length, LengthCdf};
use crate::model::Instance;
use crate::random::EnumerationSource;
use crate::rational::{self, Prob};
use crate::schedulers::{Mechanism, SchedulerSpec};

pub const DEFAULT_BRANCH_LIMIT: u64 = 10_000_000;

/// How the enumeration resolves job lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthMode {
    /// Branch only when a running job could finish.
    Lazy,
    /// Draw every length before the schedule starts.
    Eager,
}

/// Visits every leaf of the joint randomness tree with its exact probability.
/// Returns the number of leaves.
pub fn enumerate_leaves(
    mech: &dyn Mechanism,
    instance: &Instance,
    branch_limit: u64,
    mode: LengthMode,
    mut visit: impl FnMut(&Trace, &Prob),
) -> Result<u64, EngineError> {
    let cdfs: Vec<LengthCdf> = instance.players.iter().map(|p| p.true_cdf.clone()).collect();
    let caps = mech.capabilities();
    let (deadline, n) = (instance.deadline, instance.n());
    let mut src = EnumerationSource::new();
    let mut leaves = 0u64;
    loop {
        src.begin();
        let mut session = mech.start();
        let trace = match mode {
            LengthMode::Lazy => drive(session.as_mut(), caps, deadline, n, &mut Lazy(&cdfs), &mut src)?,
            LengthMode::Eager => {
                let lengths: Vec<_> = cdfs.iter().map(|c| sample_length(c, &mut src)).collect();
                drive(session.as_mut(), caps, deadline, n, &mut Known(&lengths), &mut src)?
            }
        };
        leaves += 1;
        if leaves > branch_limit {
            return Err(EngineError::BranchLimitExceeded { reached: leaves });
        }
        visit(&trace, &src.path_weight());
        if !src.advance() {
            return Ok(leaves);
        }
    }
}

pub fn exact_evaluate(
    spec: &SchedulerSpec,
    instance: &Instance,
    branch_limit: u64,
) -> Result<EvalResult, EngineError> {
    let mech = spec.prepare(instance)?;
    exact_evaluate_with(mech.as_ref(), spec.name(), instance, branch_limit, LengthMode::Lazy)
}

pub fn exact_evaluate_with(
    mech: &dyn Mechanism,
    scheduler: &str,
    instance: &Instance,
    branch_limit: u64,
    mode: LengthMode,
) -> Result<EvalResult, EngineError> {
    let n = instance.n();
    let mut finish = vec![Prob::zero(); n];
    let mut mean = Prob::zero();
    let mut second = Prob::zero();
    let mut total = Prob::zero();
    let branches = enumerate_leaves(mech, instance, branch_limit, mode, |trace, w| {
        for (i, f) in finish.iter_mut().enumerate() {
            if trace.finished(i) {
                *f += w;
            }
        }
        let welfare = rational::int(trace.welfare() as i64);
        second += w * &welfare * &welfare;
        mean += w * welfare;
        total += w;
    })?;
    debug_assert!(total.is_one(), "branch weights sum to {total}");
    let variance = second - &mean * &mean;
    Ok(EvalResult {
        label: instance.label.clone(),
        scheduler: scheduler.to_string(),
        mode: EvalMode::Exact { branches },
        finish_prob: finish.into_iter().map(Estimate::Exact).collect(),
        welfare: Estimate::Exact(mean),
        welfare_variance: Some(variance),
    })
}
