//! Experiment configuration.
//!
//! Files are `key = value` lines with `#` comments, or a JSON object with the
//! same keys. Lists are comma separated in the text format; wrap a value in
//! double quotes to keep its commas. A `base = name`
//! entry starts from a bundled configuration and overrides its keys.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};

use hypstab_core::{
    AlgorithmConfig, Grid1D, IndicatorConfig, InitialCase, LawKind, LikelihoodConfig,
    LikelihoodMode, Model, ModelKind, ParamGrid, ParamTarget, Prior, Problem, Schedule,
    SolverConfig, State, WeightConvention, XiGrid,
};

use crate::catalogue;
use crate::CliError;

/// Key that manifests add on top of the resolved configuration.
pub const MANIFEST_KEY: &str = "manifest";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub description: String,
    pub model: String,
    pub law: String,
    pub initial: String,
    pub gravity: f64,
    pub nx: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub nxi: Option<usize>,
    pub xi_min: f64,
    pub xi_max: f64,

    /// Parameter axes: `kappa`, `kappa1`, `kappa2` or `alpha`.
    #[serde(deserialize_with = "one_or_many")]
    pub params: Vec<String>,
    #[serde(deserialize_with = "one_or_many")]
    pub param_lo: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub param_hi: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub param_n: Vec<usize>,
    /// Gains of components that no axis controls.
    #[serde(deserialize_with = "one_or_many")]
    pub base_kappa: Vec<f64>,

    pub prior: String,
    pub prior_mu: f64,
    pub prior_sigma: f64,

    pub order: u8,
    pub cfl: f64,
    pub theta: f64,
    pub t_final: f64,
    pub max_steps: usize,

    pub indicator: String,
    #[serde(deserialize_with = "one_or_many")]
    pub mu: Vec<f64>,
    pub weights: String,

    pub likelihood: String,
    pub alpha: f64,
    pub c1: f64,
    pub nu: f64,

    pub eps0: f64,
    pub max_iters: Option<usize>,
    pub seed: u64,
    pub schedule: String,
    /// `None`: one per node. `0`: run until every node reaches `t_final`.
    pub consecutive_hits: Option<usize>,
    pub stability_threshold: f64,

    /// Number of evenly spaced nodes whose indicator history is written.
    pub record_nodes: usize,
    pub fit: bool,
    pub fit_t_start: f64,
    pub fit_t_end: Option<f64>,
    #[serde(deserialize_with = "one_or_many")]
    pub mask_tols: Vec<f64>,

    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            description: String::new(),
            model: "wave".into(),
            law: "same_side".into(),
            initial: "wave_constant".into(),
            gravity: hypstab_core::model::STANDARD_GRAVITY,
            nx: 100,
            x_min: 0.0,
            x_max: 1.0,
            nxi: None,
            xi_min: -0.5,
            xi_max: 0.5,
            params: vec!["kappa".into()],
            param_lo: vec![-2.0],
            param_hi: vec![2.0],
            param_n: vec![101],
            base_kappa: Vec::new(),
            prior: "uniform".into(),
            prior_mu: 0.0,
            prior_sigma: 1.0,
            order: 1,
            cfl: 1.0,
            theta: hypstab_core::solver::DEFAULT_THETA,
            t_final: 5.0,
            max_steps: hypstab_core::solver::DEFAULT_MAX_STEPS,
            indicator: "energy".into(),
            mu: Vec::new(),
            weights: "per_direction".into(),
            likelihood: "reference_threshold".into(),
            alpha: hypstab_core::algorithm::DEFAULT_ALPHA,
            c1: 1.0,
            nu: 0.0,
            eps0: hypstab_core::algorithm::DEFAULT_EPS0,
            max_iters: None,
            seed: 0,
            schedule: "sweep_all".into(),
            consecutive_hits: None,
            stability_threshold: 0.1,
            record_nodes: 9,
            fit: false,
            fit_t_start: 0.0,
            fit_t_end: None,
            mask_tols: vec![1e-6, 1e-7, 1e-8, 1e-9],
            out: None,
        }
    }
}

fn one_or_many<'de, D, T>(de: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn parse_scalar(s: &str) -> Value {
    match serde_json::from_str::<Value>(s) {
        Ok(v @ (Value::Number(_) | Value::Bool(_) | Value::Null)) => v,
        _ => Value::String(s.to_string()),
    }
}

/// Parses the `key = value` format into a JSON object.
pub fn parse_key_values(text: &str) -> Result<Map<String, Value>, CliError> {
    let mut map = Map::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {}: expected `key = value`, got `{line}`", n + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", n + 1)));
        }
        let v = if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            Value::String(value[1..value.len() - 1].to_string())
        } else if value.contains(',') {
            Value::Array(value.split(',').map(|p| parse_scalar(p.trim())).collect())
        } else {
            parse_scalar(value)
        };
        if map.insert(key.to_string(), v).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(map)
}

/// Parses either format; text starting with `{` is JSON.
pub fn parse_map(text: &str) -> Result<Map<String, Value>, CliError> {
    if text.trim_start().starts_with('{') {
        match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(m)) => Ok(m),
            Ok(_) => Err(CliError::Config("JSON config must be an object".into())),
            Err(e) => Err(CliError::Config(format!("invalid JSON: {e}"))),
        }
    } else {
        parse_key_values(text)
    }
}

fn resolve_map(mut map: Map<String, Value>, depth: usize) -> Result<Map<String, Value>, CliError> {
    map.remove(MANIFEST_KEY);
    let Some(base) = map.remove("base") else {
        return Ok(map);
    };
    let Value::String(base) = base else {
        return Err(CliError::Config("`base` must name a bundled config".into()));
    };
    if depth > 8 {
        return Err(CliError::Config("`base` chain too deep".into()));
    }
    let text = catalogue::find(&base)
        .ok_or_else(|| CliError::Config(format!("unknown base config `{base}`")))?
        .text;
    let mut merged = resolve_map(parse_map(text)?, depth + 1)?;
    merged.remove("name");
    merged.remove("description");
    merged.extend(map);
    Ok(merged)
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let map = resolve_map(parse_map(text)?, 0)?;
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a file, or a bundled config when no such file exists.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        if path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let mut cfg = Self::from_text(&text)?;
            if cfg.name == ExperimentConfig::default().name {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    cfg.name = stem.to_string();
                }
            }
            return Ok(cfg);
        }
        let name = path.to_string_lossy();
        let name = name.strip_suffix(".cfg").unwrap_or(&name);
        match catalogue::find(name) {
            Some(b) => Self::from_text(b.text),
            None => Err(CliError::Config(format!(
                "{}: no such file or bundled config",
                path.display()
            ))),
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(&self.name))
    }

    /// Builds the library objects and checks their consistency.
    pub fn build(&self) -> Result<Experiment, CliError> {
        let cerr = |m: String| CliError::Config(m);
        let kind: ModelKind = self.model.parse()?;
        let model = Model::with_gravity(kind, self.gravity);
        let d = model.n_comp();
        let law_kind: LawKind = self.law.parse()?;
        let case = InitialCase::from_name(&self.initial)
            .ok_or_else(|| cerr(format!("unknown initial condition `{}`", self.initial)))?;
        if let Some(n) = case.n_comp() {
            if n != d {
                return Err(cerr(format!(
                    "initial condition `{}` has {n} components, model `{}` has {d}",
                    self.initial, self.model
                )));
            }
        }
        if case.is_stochastic() && self.nxi.is_none() {
            return Err(cerr(format!("initial condition `{}` needs nxi", self.initial)));
        }
        let grid = Grid1D::new(self.x_min, self.x_max, self.nx)?;
        let xi = self
            .nxi
            .map(|n| XiGrid::new(self.xi_min, self.xi_max, n))
            .transpose()?;
        let initial: State = case.build(&model, grid, xi)?;

        let dims = self.params.len();
        if dims == 0 {
            return Err(cerr("at least one parameter axis is required".into()));
        }
        if self.param_lo.len() != dims || self.param_hi.len() != dims || self.param_n.len() != dims {
            return Err(cerr(format!(
                "params has {dims} axes; param_lo, param_hi and param_n must match"
            )));
        }
        let targets = self
            .params
            .iter()
            .map(|p| match p.as_str() {
                "kappa" => Ok(ParamTarget::Kappa),
                "alpha" => Ok(ParamTarget::Damping),
                s => s
                    .strip_prefix("kappa")
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| i >= 1)
                    .map(|i| ParamTarget::KappaComponent(i - 1))
                    .ok_or_else(|| cerr(format!("unknown parameter `{s}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let param_grid =
            ParamGrid::new(self.param_lo.clone(), self.param_hi.clone(), self.param_n.clone())?;
        let prior = match self.prior.as_str() {
            "uniform" => Prior::Uniform,
            "gaussian" => Prior::Gaussian {
                mu: self.prior_mu,
                sigma: self.prior_sigma,
            },
            s => return Err(cerr(format!("unknown prior `{s}`"))),
        };

        let solver = match self.order {
            1 => SolverConfig::first_order(self.cfl, self.t_final),
            2 => SolverConfig::second_order(self.cfl, self.theta, self.t_final),
            o => return Err(cerr(format!("order must be 1 or 2, got {o}"))),
        };
        let solver = SolverConfig {
            max_steps: self.max_steps,
            ..solver
        };

        let indicator = match self.indicator.as_str() {
            "energy" => IndicatorConfig::energy(),
            "lyapunov" => {
                let convention = match self.weights.as_str() {
                    "per_direction" => WeightConvention::PerDirection,
                    "uniform_decay" => WeightConvention::UniformDecay,
                    s => return Err(cerr(format!("unknown weight convention `{s}`"))),
                };
                let mu = match self.mu.len() {
                    0 => vec![1.0; d],
                    1 => vec![self.mu[0]; d],
                    _ => self.mu.clone(),
                };
                IndicatorConfig::lyapunov(&model, mu, convention)
            }
            s => return Err(cerr(format!("unknown indicator `{s}`"))),
        };

        let mode = match self.likelihood.as_str() {
            "reference_threshold" => LikelihoodMode::ReferenceThreshold,
            "previous_step" => LikelihoodMode::PreviousStep,
            "decay_rate" => LikelihoodMode::DecayRate,
            s => return Err(cerr(format!("unknown likelihood `{s}`"))),
        };
        let likelihood = LikelihoodConfig {
            mode,
            alpha: self.alpha,
            c1: self.c1,
            nu: self.nu,
        };

        let schedule = match self.schedule.as_str() {
            "sweep_all" => Schedule::SweepAll,
            "random_single" => Schedule::RandomSingle,
            s => return Err(cerr(format!("unknown schedule `{s}`"))),
        };
        let algorithm = AlgorithmConfig {
            eps0: self.eps0,
            max_iters: self.max_iters.unwrap_or(usize::MAX),
            seed: self.seed,
            schedule,
            consecutive_hits: self.consecutive_hits,
            stability_threshold: self.stability_threshold,
            record_histories: self.record_nodes > 0 || self.fit,
        };
        if !(self.eps0 > 0.0) {
            return Err(cerr(format!("eps0 must be positive, got {}", self.eps0)));
        }
        if !(self.stability_threshold > 0.0 && self.stability_threshold <= 1.0) {
            return Err(cerr("stability_threshold must lie in (0, 1]".into()));
        }
        if self.fit {
            if let Some(end) = self.fit_t_end {
                if !(end > self.fit_t_start) {
                    return Err(cerr("fit_t_end must exceed fit_t_start".into()));
                }
            }
        }

        let base_kappa = match self.base_kappa.len() {
            0 => vec![0.0; d],
            1 => vec![self.base_kappa[0]; d],
            _ => self.base_kappa.clone(),
        };
        let problem = Problem {
            model,
            law_kind,
            base_kappa,
            targets,
            initial,
            solver,
            indicator,
            likelihood,
        };
        problem.validate(dims)?;
        let prior_dist = hypstab_core::make_prior(param_grid, &prior)?;
        Ok(Experiment {
            problem,
            prior: prior_dist,
            algorithm,
        })
    }
}

/// A configuration resolved into library objects.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub problem: Problem,
    pub prior: hypstab_core::Distribution,
    pub algorithm: AlgorithmConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_values_with_lists_and_comments() {
        let m = parse_key_values("# c\nmodel = wave  # trailing\nparam_lo = -2, -2\nseed = 7\nfit = true\n").unwrap();
        assert_eq!(m["model"], Value::String("wave".into()));
        assert_eq!(m["param_lo"], serde_json::json!([-2, -2]));
        assert_eq!(m["seed"], serde_json::json!(7));
        assert_eq!(m["fit"], Value::Bool(true));
        let q = parse_key_values("description = \"a, b\"").unwrap();
        assert_eq!(q["description"], Value::String("a, b".into()));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_key_values("model wave").is_err());
        assert!(parse_key_values("a = 1\na = 2").is_err());
        assert!(ExperimentConfig::from_text("colour = red").is_err());
    }

    #[test]
    fn scalar_or_list() {
        let c = ExperimentConfig::from_text("mu = 2\nparam_n = 11").unwrap();
        assert_eq!(c.mu, vec![2.0]);
        assert_eq!(c.param_n, vec![11]);
    }

    #[test]
    fn json_matches_text() {
        let a = ExperimentConfig::from_text("model = burgers\nlaw = burgers_conditional\ninitial = burgers_case1\nparam_n = 5").unwrap();
        let b = ExperimentConfig::from_text(
            r#"{"model": "burgers", "law": "burgers_conditional", "initial": "burgers_case1", "param_n": [5]}"#,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn consistency_checks() {
        let bad = [
            "model = burgers",
            "law = mixed\nmodel = burgers\ninitial = zero",
            "initial = wave_stochastic",
            "params = kappa3",
            "params = kappa, alpha",
            "order = 3",
            "model = sv_nonlinear\ninitial = sv_sine\norder = 2",
            "prior = cauchy",
        ];
        for text in bad {
            let cfg = ExperimentConfig::from_text(text).unwrap();
            assert!(cfg.build().is_err(), "{text}");
        }
        assert!(ExperimentConfig::default().build().is_ok());
    }
}
