//! Posterior iteration over a parameter grid.
//!
//! Every node owns its own closed-loop solution. An iteration advances one
//! node (random schedule) or every node (sweep schedule) by one time step,
//! turns the new indicator value into a two-level likelihood, and
//! renormalizes the distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{likelihood, Distribution, LikelihoodConfig};
use crate::error::{Error, Result};
use crate::grid::State;
use crate::indicator::{indicator, IndicatorConfig};
use crate::model::{FeedbackLaw, LawKind, Model};
use crate::solver::{advance, compute_dt, Advance, SolverConfig};

/// Default tolerance on the `ℓ¹` variation of the distribution.
pub const DEFAULT_EPS0: f64 = 1e-8;

/// Default damping factor.
pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// One uniformly chosen unfinished node per iteration.
    RandomSingle,
    /// All unfinished nodes per iteration, one normalization.
    SweepAll,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmConfig {
    pub eps0: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub schedule: Schedule,
    /// Consecutive iterations with variation `≤ eps0` that stop the run.
    /// `None` means one per node; `Some(0)` disables the test so the run
    /// continues until every node reaches the final time.
    pub consecutive_hits: Option<usize>,
    /// Nodes whose posterior-to-prior ratio is at least this fraction of the
    /// largest ratio form the stability set.
    pub stability_threshold: f64,
    pub record_histories: bool,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            eps0: DEFAULT_EPS0,
            max_iters: usize::MAX,
            seed: 0,
            schedule: Schedule::SweepAll,
            consecutive_hits: None,
            stability_threshold: 0.1,
            record_histories: false,
        }
    }
}

/// What one parameter axis controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamTarget {
    /// The same gain on every component.
    Kappa,
    /// The gain of a single component.
    KappaComponent(usize),
    /// The likelihood damping factor of the node.
    Damping,
}

/// Everything a node needs to build and judge its closed-loop solution.
#[derive(Debug, Clone)]
pub struct Problem {
    pub model: Model,
    pub law_kind: LawKind,
    /// Gains used for components no parameter axis controls.
    pub base_kappa: Vec<f64>,
    pub targets: Vec<ParamTarget>,
    pub initial: State,
    pub solver: SolverConfig,
    pub indicator: IndicatorConfig,
    pub likelihood: LikelihoodConfig,
}

impl Problem {
    /// Feedback law and likelihood of the node at `params`.
    pub fn node_setup(&self, params: &[f64]) -> (FeedbackLaw, LikelihoodConfig) {
        let mut kappa = self.base_kappa.clone();
        let mut lik = self.likelihood;
        for (target, &v) in self.targets.iter().zip(params) {
            match *target {
                ParamTarget::Kappa => kappa.iter_mut().for_each(|k| *k = v),
                ParamTarget::KappaComponent(i) => kappa[i] = v,
                ParamTarget::Damping => lik.alpha = v,
            }
        }
        (FeedbackLaw::new(self.law_kind, kappa), lik)
    }

    pub fn validate(&self, dims: usize) -> Result<()> {
        let d = self.model.n_comp();
        if self.targets.len() != dims {
            return Err(Error::Config(format!(
                "{} parameter targets for a {dims}-dimensional grid",
                self.targets.len()
            )));
        }
        if self.base_kappa.len() != d {
            return Err(Error::Config(format!(
                "base gain vector has {} entries, model has {d} components",
                self.base_kappa.len()
            )));
        }
        for t in &self.targets {
            if let ParamTarget::KappaComponent(i) = t {
                if *i >= d {
                    return Err(Error::Config(format!("no component {i} in model {}", self.model.kind)));
                }
            }
        }
        if self.initial.n_comp != d {
            return Err(Error::Config("initial state does not match the model".into()));
        }
        self.solver.validate()?;
        self.likelihood.validate()?;
        self.indicator.validate(d).map_err(Error::Config)?;
        if self.solver.order == 2 && !self.model.is_conservative() {
            return Err(Error::Config(format!(
                "model {} has no conservative flux; use order 1",
                self.model.kind
            )));
        }
        FeedbackLaw::new(self.law_kind, self.base_kappa.clone()).validate(&self.model)
    }
}

/// Per-node outcome of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeReport {
    pub params: Vec<f64>,
    pub final_time: f64,
    pub steps: usize,
    /// Visits at which the likelihood was below one.
    pub damped: usize,
    /// Set when the solution broke down; the node was frozen afterwards.
    pub breakdown: Option<Error>,
    pub initial_indicator: f64,
    pub last_indicator: f64,
    /// `(t, L)` samples including `t = 0`, when recording was requested.
    pub history: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The variation stayed below `eps0` for the required number of iterations.
    Converged,
    /// Every node reached the final time.
    AllFinished,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub prior: Distribution,
    pub final_distribution: Distribution,
    pub variation_history: Vec<f64>,
    pub nodes: Vec<NodeReport>,
    pub stability_set: Vec<usize>,
    /// Per-axis `[lo, hi]` of the smallest box containing the stability set.
    pub stability_interval: Vec<(f64, f64)>,
    /// Whether the stability set fills its bounding box.
    pub contiguous: bool,
    pub iterations: usize,
    pub stop_reason: StopReason,
}

struct Node {
    state: State,
    law: FeedbackLaw,
    lik: LikelihoodConfig,
    l0: f64,
    l_prev: f64,
    /// Clock increment of a frozen node.
    nominal_dt: f64,
    steps: usize,
    damped: usize,
    breakdown: Option<Error>,
    history: Vec<(f64, f64)>,
    record: bool,
}

impl Node {
    fn finished(&self, t_final: f64) -> bool {
        self.state.time >= t_final
    }

    /// Advances one step and returns the likelihood, or `None` if the node
    /// had already reached the final time.
    fn visit(&mut self, problem: &Problem) -> Result<Option<f64>> {
        let t_final = problem.solver.t_final;
        if self.finished(t_final) {
            return Ok(None);
        }
        if self.breakdown.is_some() {
            // frozen: the clock keeps moving so the node still finishes
            self.state.time = (self.state.time + self.nominal_dt).min(t_final);
            self.damped += 1;
            return Ok(Some(self.lik.alpha));
        }
        match advance(&mut self.state, &problem.model, &self.law, &problem.solver) {
            Ok(Advance::Finished) => return Ok(None),
            Ok(Advance::Stepped(_)) | Ok(Advance::Stationary) => {}
            Err(e) if e.is_numeric_breakdown() => return Ok(Some(self.break_down(e))),
            Err(e) => return Err(e),
        }
        self.steps += 1;
        let l = indicator(&self.state, &problem.indicator);
        if !l.is_finite() {
            let err = Error::NonFinite { cell: 0, comp: 0, slice: 0 };
            return Ok(Some(self.break_down(err)));
        }
        let lam = likelihood(l, self.l_prev, self.state.time, self.l0, &self.lik);
        if lam < 1.0 {
            self.damped += 1;
        }
        self.l_prev = l;
        if self.record {
            self.history.push((self.state.time, l));
        }
        Ok(Some(lam))
    }

    fn break_down(&mut self, err: Error) -> f64 {
        self.breakdown = Some(err);
        self.damped += 1;
        self.lik.alpha
    }
}

/// Runs the posterior iteration from `prior` until convergence, until every
/// node reaches the final time, or until `max_iters`.
pub fn posterior_iteration(
    problem: &Problem,
    prior: Distribution,
    config: &AlgorithmConfig,
) -> Result<RunResult> {
    let grid = prior.grid.clone();
    problem.validate(grid.dims())?;
    if !(config.eps0 > 0.0) {
        return Err(Error::Config(format!("eps0 must be positive, got {}", config.eps0)));
    }
    if prior.p.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::Config("prior must be strictly positive".into()));
    }
    let l0 = indicator(&problem.initial, &problem.indicator);
    let t_final = problem.solver.t_final;
    // frozen nodes tick at the step size of the initial data
    let nominal_dt = match compute_dt(&problem.initial, &problem.model, &problem.solver) {
        Ok(dt) => dt,
        Err(Error::Stationary) => t_final,
        Err(e) => return Err(e),
    };
    let mut nodes: Vec<Node> = (0..grid.len())
        .map(|l| {
            let (law, lik) = problem.node_setup(grid.node(l));
            law.validate(&problem.model)?;
            lik.validate()?;
            Ok(Node {
                state: problem.initial.clone(),
                law,
                lik,
                l0,
                l_prev: l0,
                nominal_dt,
                steps: 0,
                damped: 0,
                breakdown: None,
                history: if config.record_histories {
                    vec![(problem.initial.time, l0)]
                } else {
                    Vec::new()
                },
                record: config.record_histories,
            })
        })
        .collect::<Result<_>>()?;

    let hits_needed = config.consecutive_hits.unwrap_or(grid.len());
    let mut dist = prior.clone();
    let mut variation_history = Vec::new();
    let mut streak = 0usize;
    let mut iterations = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut active: Vec<usize> = (0..nodes.len())
        .filter(|&l| !nodes[l].finished(t_final))
        .collect();
    let mut lams = vec![1.0; nodes.len()];

    let stop_reason = loop {
        if active.is_empty() {
            break StopReason::AllFinished;
        }
        if iterations >= config.max_iters {
            break StopReason::MaxIters;
        }
        let before = dist.p.clone();
        match config.schedule {
            Schedule::RandomSingle => {
                let slot = rng.gen_range(0..active.len());
                let l = active[slot];
                if let Some(lam) = nodes[l].visit(problem)? {
                    dist.update(l, lam)?;
                }
                if nodes[l].finished(t_final) {
                    active.swap_remove(slot);
                }
            }
            Schedule::SweepAll => {
                let results: Vec<Result<Option<f64>>> = nodes
                    .par_iter_mut()
                    .map(|node| node.visit(problem))
                    .collect();
                for (lam, r) in lams.iter_mut().zip(results) {
                    *lam = r?.unwrap_or(1.0);
                }
                dist.update_all(&lams)?;
                active.retain(|&l| !nodes[l].finished(t_final));
            }
        }
        iterations += 1;
        let v = dist.variation(&Distribution {
            grid: grid.clone(),
            p: before,
        });
        variation_history.push(v);
        if hits_needed > 0 {
            if v <= config.eps0 {
                streak += 1;
                if streak >= hits_needed {
                    break StopReason::Converged;
                }
            } else {
                streak = 0;
            }
        }
    };

    let (stability_set, stability_interval, contiguous) =
        stability_region(&prior, &dist, config.stability_threshold);
    let reports = nodes
        .into_iter()
        .enumerate()
        .map(|(l, n)| NodeReport {
            params: grid.node(l).to_vec(),
            final_time: n.state.time,
            steps: n.steps,
            damped: n.damped,
            breakdown: n.breakdown,
            initial_indicator: n.l0,
            last_indicator: n.l_prev,
            history: n.history,
        })
        .collect();
    Ok(RunResult {
        prior,
        final_distribution: dist,
        variation_history,
        nodes: reports,
        stability_set,
        stability_interval,
        contiguous,
        iterations,
        stop_reason,
    })
}

/// Nodes whose posterior-to-prior ratio is at least `threshold` times the
/// largest ratio, their bounding box, and whether they fill it.
pub fn stability_region(
    prior: &Distribution,
    posterior: &Distribution,
    threshold: f64,
) -> (Vec<usize>, Vec<(f64, f64)>, bool) {
    let grid = &posterior.grid;
    let ratio: Vec<f64> = posterior
        .p
        .iter()
        .zip(&prior.p)
        .map(|(p, q)| p / q)
        .collect();
    let max = ratio.iter().copied().fold(0.0f64, f64::max);
    let set: Vec<usize> = (0..ratio.len())
        .filter(|&l| ratio[l] >= threshold * max)
        .collect();
    let dims = grid.dims();
    let mut lo_idx = vec![usize::MAX; dims];
    let mut hi_idx = vec![0usize; dims];
    for &l in &set {
        for (d, &i) in grid.multi_index(l).iter().enumerate() {
            lo_idx[d] = lo_idx[d].min(i);
            hi_idx[d] = hi_idx[d].max(i);
        }
    }
    if set.is_empty() {
        return (set, vec![(f64::NAN, f64::NAN); dims], false);
    }
    let interval = (0..dims)
        .map(|d| {
            let axis = grid.axis(d);
            (axis[lo_idx[d]], axis[hi_idx[d]])
        })
        .collect();
    let box_size: usize = (0..dims).map(|d| hi_idx[d] - lo_idx[d] + 1).product();
    let contiguous = box_size == set.len();
    (set, interval, contiguous)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{make_prior, ParamGrid, Prior};
    use crate::grid::Grid1D;
    use crate::model::ModelKind;

    fn wave_problem(t_final: f64) -> Problem {
        let model = Model::new(ModelKind::Wave);
        let initial = State::from_fn(2, Grid1D::new(0.0, 1.0, 20).unwrap(), |_, u| {
            u[0] = -0.5;
            u[1] = 0.5;
        })
        .unwrap();
        Problem {
            model,
            law_kind: LawKind::SameSide,
            base_kappa: vec![0.0; 2],
            targets: vec![ParamTarget::Kappa],
            initial,
            solver: SolverConfig::first_order(1.0, t_final),
            indicator: IndicatorConfig::energy(),
            likelihood: LikelihoodConfig::reference(0.5),
        }
    }

    #[test]
    fn all_stable_nodes_keep_prior_and_converge() {
        let problem = wave_problem(5.0);
        let grid = ParamGrid::line(-0.5, 0.5, 11).unwrap();
        let prior = make_prior(grid, &Prior::Gaussian { mu: 0.1, sigma: 0.4 }).unwrap();
        let res = posterior_iteration(&problem, prior.clone(), &AlgorithmConfig::default()).unwrap();
        assert_eq!(res.stop_reason, StopReason::Converged);
        assert_eq!(res.iterations, 11);
        assert!(res.variation_history.iter().all(|&v| v == 0.0));
        assert_eq!(res.final_distribution.p, prior.p);
        assert_eq!(res.stability_set.len(), 11);
    }

    #[test]
    fn unstable_nodes_lose_mass() {
        let problem = wave_problem(2.0);
        let grid = ParamGrid::line(-2.0, 2.0, 21).unwrap();
        let prior = make_prior(grid, &Prior::Uniform).unwrap();
        let cfg = AlgorithmConfig {
            consecutive_hits: Some(0),
            ..Default::default()
        };
        let res = posterior_iteration(&problem, prior, &cfg).unwrap();
        assert_eq!(res.stop_reason, StopReason::AllFinished);
        assert_eq!(res.stability_interval, vec![(-1.0, 1.0)]);
        assert!(res.contiguous);
        assert!(res.nodes.iter().all(|n| n.final_time == 2.0));
    }

    #[test]
    fn max_iters_respected() {
        let problem = wave_problem(2.0);
        let prior = make_prior(ParamGrid::line(-2.0, 2.0, 5).unwrap(), &Prior::Uniform).unwrap();
        let cfg = AlgorithmConfig {
            max_iters: 7,
            schedule: Schedule::RandomSingle,
            ..Default::default()
        };
        let res = posterior_iteration(&problem, prior, &cfg).unwrap();
        assert_eq!(res.stop_reason, StopReason::MaxIters);
        assert_eq!(res.iterations, 7);
    }

    #[test]
    fn node_setup_targets() {
        let mut p = wave_problem(1.0);
        p.targets = vec![ParamTarget::KappaComponent(1), ParamTarget::Damping];
        p.base_kappa = vec![0.3, 0.0];
        let (law, lik) = p.node_setup(&[-0.7, 0.25]);
        assert_eq!(law.kappa, vec![0.3, -0.7]);
        assert_eq!(lik.alpha, 0.25);
        assert!(p.validate(2).is_ok());
        assert!(p.validate(1).is_err());
        p.targets = vec![ParamTarget::KappaComponent(2)];
        assert!(p.validate(1).is_err());
    }

    #[test]
    fn blown_up_node_is_damped_every_visit() {
        // |κ| = 1e200 overflows within a few reflections
        let problem = wave_problem(3.0);
        let grid = ParamGrid::line(0.0, 1e200, 2).unwrap();
        let prior = make_prior(grid, &Prior::Uniform).unwrap();
        let cfg = AlgorithmConfig {
            consecutive_hits: Some(0),
            ..Default::default()
        };
        let res = posterior_iteration(&problem, prior, &cfg).unwrap();
        let bad = &res.nodes[1];
        assert!(bad.breakdown.is_some());
        assert_eq!(bad.final_time, 3.0);
        assert_eq!(res.stability_set, vec![0]);
    }

    #[test]
    fn stability_region_box() {
        let grid = ParamGrid::new(vec![0.0, 0.0], vec![2.0, 2.0], vec![3, 3]).unwrap();
        let prior = make_prior(grid.clone(), &Prior::Uniform).unwrap();
        let mut post = prior.clone();
        for l in 0..9 {
            let idx = grid.multi_index(l);
            if idx[0] == 2 || idx[1] == 0 {
                post.p[l] = 1e-6;
            }
        }
        let (set, interval, contiguous) = stability_region(&prior, &post, 0.1);
        assert_eq!(set, vec![1, 2, 4, 5]);
        assert_eq!(interval, vec![(0.0, 1.0), (1.0, 2.0)]);
        assert!(contiguous);
        post.p[5] = 1e-6;
        let (_, _, contiguous) = stability_region(&prior, &post, 0.1);
        assert!(!contiguous);
    }
}
