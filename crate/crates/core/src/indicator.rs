//! Lyapunov-type decay indicators.
//!
//! Both indicators sum over interior cells only. For stochastic states the
//! sum also runs over `ξ`-cells and is weighted by `Δξ`.

use serde::{Deserialize, Serialize};

use crate::grid::State;
use crate::model::{Direction, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorKind {
    /// `Δx Σ_i Σ_j w_i(x_j) (u_j^(i))²`.
    Lyapunov,
    /// `Δx Σ_i Σ_j (u_j^(i))²`.
    Energy,
}

/// Sign convention of the Lyapunov weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightConvention {
    /// `e^{-μx}` for rightward components, `e^{+μx}` for leftward ones.
    PerDirection,
    /// `e^{-μx}` for every component.
    UniformDecay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorConfig {
    pub kind: IndicatorKind,
    /// Weight rates `μ_i > 0`, one per component.
    pub mu: Vec<f64>,
    /// Per-component weight direction; `Right` means `e^{-μx}`.
    pub directions: Vec<Direction>,
}

impl IndicatorConfig {
    pub fn energy() -> Self {
        Self {
            kind: IndicatorKind::Energy,
            mu: Vec::new(),
            directions: Vec::new(),
        }
    }

    pub fn lyapunov(model: &Model, mu: Vec<f64>, convention: WeightConvention) -> Self {
        let directions = match convention {
            WeightConvention::PerDirection => model.directions(),
            WeightConvention::UniformDecay => vec![Direction::Right; model.n_comp()],
        };
        Self {
            kind: IndicatorKind::Lyapunov,
            mu,
            directions,
        }
    }

    pub fn validate(&self, n_comp: usize) -> Result<(), String> {
        if self.kind == IndicatorKind::Lyapunov {
            if self.mu.len() != n_comp || self.directions.len() != n_comp {
                return Err(format!(
                    "lyapunov indicator needs {n_comp} weight rates, got {}",
                    self.mu.len()
                ));
            }
            if self.mu.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
                return Err("lyapunov weight rates must be positive".into());
            }
        }
        Ok(())
    }

    fn weight(&self, comp: usize, x: f64) -> f64 {
        match self.kind {
            IndicatorKind::Energy => 1.0,
            IndicatorKind::Lyapunov => match self.directions[comp] {
                Direction::Right => (-self.mu[comp] * x).exp(),
                Direction::Left => (self.mu[comp] * x).exp(),
            },
        }
    }
}

pub fn indicator(state: &State, config: &IndicatorConfig) -> f64 {
    let nx = state.n_cells();
    let centers = &state.grid.cell_centers;
    let mut total = 0.0;
    for i in 0..state.n_comp {
        let weights: Vec<f64> = centers.iter().map(|&x| config.weight(i, x)).collect();
        for k in 0..state.n_slices() {
            let row = &state.row(k, i)[1..=nx];
            total += row
                .iter()
                .zip(&weights)
                .map(|(u, w)| w * u * u)
                .sum::<f64>();
        }
    }
    let dxi = state.xi.as_ref().map_or(1.0, |g| g.dxi);
    state.grid.dx * dxi * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, XiGrid};
    use crate::model::ModelKind;
    use approx::assert_relative_eq;

    #[test]
    fn energy_of_constant() {
        let s = State::from_fn(1, Grid1D::new(0.0, 1.0, 37).unwrap(), |_, u| u[0] = 3.0).unwrap();
        assert_relative_eq!(indicator(&s, &IndicatorConfig::energy()), 9.0, epsilon = 1e-13);
    }

    #[test]
    fn energy_of_wave_initial_data() {
        let s = State::from_fn(2, Grid1D::new(0.0, 1.0, 100).unwrap(), |_, u| {
            u[0] = -0.5;
            u[1] = 0.5;
        })
        .unwrap();
        assert_relative_eq!(indicator(&s, &IndicatorConfig::energy()), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn small_mu_approaches_energy() {
        let model = Model::new(ModelKind::Wave);
        let s = State::from_fn(2, Grid1D::new(0.0, 1.0, 50).unwrap(), |x, u| {
            u[0] = x.sin();
            u[1] = 1.0 - x;
        })
        .unwrap();
        let e = indicator(&s, &IndicatorConfig::energy());
        let l = indicator(
            &s,
            &IndicatorConfig::lyapunov(&model, vec![1e-12; 2], WeightConvention::PerDirection),
        );
        assert_relative_eq!(l, e, max_relative = 1e-10);
    }

    #[test]
    fn ghosts_excluded() {
        let mut s = State::from_fn(1, Grid1D::new(0.0, 1.0, 4).unwrap(), |_, u| u[0] = 1.0).unwrap();
        s.set(0, 0, 0, 100.0);
        s.set(0, 0, 5, 100.0);
        assert_relative_eq!(indicator(&s, &IndicatorConfig::energy()), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn stochastic_energy_averages_over_xi() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        let xi = XiGrid::new(-0.5, 0.5, 4).unwrap();
        let s = State::from_fn_stochastic(1, g, Some(xi), |_, xi, u| u[0] = xi).unwrap();
        // mean of ξ_k² over centers ±0.125, ±0.375
        let expected = (2.0 * 0.125f64.powi(2) + 2.0 * 0.375f64.powi(2)) / 4.0;
        assert_relative_eq!(indicator(&s, &IndicatorConfig::energy()), expected, epsilon = 1e-15);
    }

    #[test]
    fn lyapunov_validation() {
        let model = Model::new(ModelKind::Wave);
        let c = IndicatorConfig::lyapunov(&model, vec![1.0, 0.0], WeightConvention::PerDirection);
        assert!(c.validate(2).is_err());
        let c = IndicatorConfig::lyapunov(&model, vec![1.0], WeightConvention::PerDirection);
        assert!(c.validate(2).is_err());
        assert!(IndicatorConfig::energy().validate(2).is_ok());
    }
}
