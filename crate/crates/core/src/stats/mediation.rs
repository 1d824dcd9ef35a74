use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use super::ols::{ols, CovarianceType, Design};
use crate::error::{Error, Result};

pub const DEFAULT_BOOTSTRAP: usize = 1000;
const MIN_OBS: usize = 10;

/// Point estimate with an optional bootstrap interval and p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Effect {
    pub estimate: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MediationResult {
    pub total_effect: Effect,
    pub acme: Effect,
    pub ade: Effect,
    pub n_obs: usize,
    /// Bootstrap replicates that produced estimates (rank-deficient
    /// resamples are dropped).
    pub n_boot_used: usize,
}

fn point(treatment: &[f64], mediator: &[f64], outcome: &[f64], controls: &[&[f64]]) -> Result<(f64, f64)> {
    let mut med_design = Design::new().column("treatment", treatment.to_vec());
    let mut out_design =
        Design::new().column("treatment", treatment.to_vec()).column("mediator", mediator.to_vec());
    for (i, c) in controls.iter().enumerate() {
        med_design = med_design.column(format!("control{i}"), c.to_vec());
        out_design = out_design.column(format!("control{i}"), c.to_vec());
    }
    let a = ols(&med_design, mediator, CovarianceType::Classical)?.coef("treatment");
    let fit = ols(&out_design, outcome, CovarianceType::Classical)?;
    Ok((a * fit.coef("mediator"), fit.coef("treatment")))
}

/// Linear interpolation between order statistics of a sorted sample.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn summarize(estimate: f64, mut draws: Vec<f64>) -> Effect {
    if draws.is_empty() {
        return Effect { estimate, ci_low: None, ci_high: None, p_value: None };
    }
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let below = draws.iter().filter(|v| **v <= 0.0).count() as f64 / n;
    let above = draws.iter().filter(|v| **v >= 0.0).count() as f64 / n;
    Effect {
        estimate,
        ci_low: Some(percentile(&draws, 0.025)),
        ci_high: Some(percentile(&draws, 0.975)),
        p_value: Some((2.0 * below.min(above)).min(1.0)),
    }
}

fn replicate(
    r: usize,
    seed: u64,
    treatment: &[f64],
    mediator: &[f64],
    outcome: &[f64],
    controls: &[&[f64]],
) -> Option<(f64, f64)> {
    let n = treatment.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let owned: Vec<Vec<f64>> = controls.iter().map(|c| pick(c)).collect();
    let refs: Vec<&[f64]> = owned.iter().map(Vec::as_slice).collect();
    point(&pick(treatment), &pick(mediator), &pick(outcome), &refs).ok()
}

/// Product-of-coefficients mediation with a percentile bootstrap. Replicate
/// `r` draws from its own ChaCha stream of `seed`, so results do not depend
/// on thread scheduling.
pub fn mediate(
    treatment: &[f64],
    mediator: &[f64],
    outcome: &[f64],
    controls: &[&[f64]],
    n_boot: usize,
    seed: u64,
) -> Result<MediationResult> {
    let n = treatment.len();
    for len in [mediator.len(), outcome.len()].into_iter().chain(controls.iter().map(|c| c.len())) {
        if len != n {
            return Err(Error::LengthMismatch(n, len));
        }
    }
    if n < MIN_OBS {
        return Err(Error::InsufficientObservations { needed: MIN_OBS, got: n });
    }
    let (acme, ade) = point(treatment, mediator, outcome, controls)?;

    let run = |r: usize| replicate(r, seed, treatment, mediator, outcome, controls);
    #[cfg(feature = "parallel")]
    let draws: Vec<Option<(f64, f64)>> = (0..n_boot).into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let draws: Vec<Option<(f64, f64)>> = (0..n_boot).map(run).collect();
    let draws: Vec<(f64, f64)> = draws.into_iter().flatten().collect();

    Ok(MediationResult {
        total_effect: summarize(acme + ade, draws.iter().map(|(a, d)| a + d).collect()),
        acme: summarize(acme, draws.iter().map(|(a, _)| *a).collect()),
        ade: summarize(ade, draws.iter().map(|(_, d)| *d).collect()),
        n_obs: n,
        n_boot_used: draws.len(),
    })
}
