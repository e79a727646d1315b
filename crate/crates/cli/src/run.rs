//! Running a configured experiment.

use hypstab_core::diagnostics::window;
use hypstab_core::{e_deviation, fit_power_law, posterior_iteration, FitResult, RunResult};

use crate::config::{Experiment, ExperimentConfig};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub experiment: Experiment,
    pub result: RunResult,
    /// One fit per parameter node, present when `fit` is enabled.
    pub fits: Option<Vec<FitResult>>,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let experiment = cfg.build()?;
    let result = posterior_iteration(
        &experiment.problem,
        experiment.prior.clone(),
        &experiment.algorithm,
    )?;
    let fits = cfg.fit.then(|| {
        let t_end = cfg.fit_t_end.unwrap_or(f64::INFINITY);
        result
            .nodes
            .iter()
            .map(|n| node_fit(&n.history, cfg.fit_t_start, t_end))
            .collect()
    });
    Ok(Outcome {
        experiment,
        result,
        fits,
    })
}

/// Fit of the windowed history. Nodes whose series cannot be fitted keep
/// their deviation statistic and report `NaN` coefficients.
fn node_fit(history: &[(f64, f64)], t_start: f64, t_end: f64) -> FitResult {
    let series: Vec<(f64, f64)> = window(history, t_start, t_end)
        .into_iter()
        .filter(|&(t, _)| t > 0.0)
        .collect();
    fit_power_law(&series).unwrap_or_else(|_| {
        let raw: Vec<f64> = series.iter().map(|p| p.1).collect();
        let positive = raw.iter().filter(|&&l| l > 0.0).count();
        FitResult {
            a: f64::NAN,
            c: f64::NAN,
            e_deviation: if raw.iter().all(|l| l.is_finite()) {
                e_deviation(&raw)
            } else {
                f64::INFINITY
            },
            n_samples: positive,
            n_dropped: raw.len() - positive,
        }
    })
}
