use super::{drive, EngineError, Estimate, EvalMode, EvalResult, Known};
use crate::cdf::Realization;
use crate::model::Instance;
use crate::random::{Lottery, RandomSource, SeededSource};
use crate::schedulers::{Mechanism, SchedulerSpec};

/// Trial `k` draws from its own stream of `seed`, so results do not depend
/// on the order trials run in.
pub fn monte_carlo(
    spec: &SchedulerSpec,
    instance: &Instance,
    trials: u64,
    seed: u64,
) -> Result<EvalResult, EngineError> {
    let mech = spec.prepare(instance)?;
    monte_carlo_with(mech.as_ref(), spec.name(), instance, trials, seed)
}

pub fn monte_carlo_with(
    mech: &dyn Mechanism,
    scheduler: &str,
    instance: &Instance,
    trials: u64,
    seed: u64,
) -> Result<EvalResult, EngineError> {
    if trials == 0 {
        return Err(EngineError::NoTrials);
    }
    let n = instance.n();
    let caps = mech.capabilities();
    let lotteries: Vec<Lottery> = instance.players.iter().map(|p| p.true_cdf.length_lottery()).collect();
    let mut finished = vec![0u64; n];
    let mut welfare_sum = 0u64;
    let mut welfare_sq = 0u64;
    let mut lengths = vec![Realization::NeverFinishes; n];
    for trial in 0..trials {
        let mut rng = SeededSource::for_trial(seed, trial);
        for (i, l) in lotteries.iter().enumerate() {
            lengths[i] = instance.players[i].true_cdf.realization_of(rng.weighted_choice(l));
        }
        let mut session = mech.start();
        let trace = drive(session.as_mut(), caps, instance.deadline, n, &mut Known(&lengths), &mut rng)?;
        let mut w = 0u64;
        for (i, f) in finished.iter_mut().enumerate() {
            if trace.finished(i) {
                *f += 1;
                w += 1;
            }
        }
        welfare_sum += w;
        welfare_sq += w * w;
    }
    let t = trials as f64;
    let finish_prob = finished
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            Estimate::Sampled {
                mean: p,
                std_err: (p * (1.0 - p) / t).sqrt(),
            }
        })
        .collect();
    let mean = welfare_sum as f64 / t;
    let variance = if trials > 1 {
        ((welfare_sq as f64 - t * mean * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(EvalResult {
        label: instance.label.clone(),
        scheduler: scheduler.to_string(),
        mode: EvalMode::MonteCarlo { trials, seed },
        finish_prob,
        welfare: Estimate::Sampled {
            mean,
            std_err: (variance / t).sqrt(),
        },
        welfare_variance: None,
    })
}
