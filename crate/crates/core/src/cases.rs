//! Initial data of the benchmark problems.

use std::f64::consts::PI;

use crate::error::Result;
use crate::grid::{Grid1D, State, XiGrid};
use crate::model::Model;

/// Named initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialCase {
    /// `u¹ = −½`, `u² = ½`.
    WaveConstant,
    /// Perturbation `δh = ½ sin πx`, `δv = 20/(8 + sin πx) − 5/2` in characteristic variables.
    SaintVenantSine,
    BurgersCase1,
    BurgersCase2,
    /// `u¹ = ¼ − ξ/2`, `u² = −¼ + ξ/2`.
    WaveStochastic,
    BurgersStochasticCase1,
    BurgersStochasticCase2,
    /// The sine perturbation scaled by `(ξ − ½)`.
    SaintVenantStochastic,
    /// `sin 2πx` in every component.
    Sine,
    Zero,
}

impl InitialCase {
    pub const ALL: [InitialCase; 10] = [
        InitialCase::WaveConstant,
        InitialCase::SaintVenantSine,
        InitialCase::BurgersCase1,
        InitialCase::BurgersCase2,
        InitialCase::WaveStochastic,
        InitialCase::BurgersStochasticCase1,
        InitialCase::BurgersStochasticCase2,
        InitialCase::SaintVenantStochastic,
        InitialCase::Sine,
        InitialCase::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InitialCase::WaveConstant => "wave_constant",
            InitialCase::SaintVenantSine => "sv_sine",
            InitialCase::BurgersCase1 => "burgers_case1",
            InitialCase::BurgersCase2 => "burgers_case2",
            InitialCase::WaveStochastic => "wave_stochastic",
            InitialCase::BurgersStochasticCase1 => "burgers_stochastic_case1",
            InitialCase::BurgersStochasticCase2 => "burgers_stochastic_case2",
            InitialCase::SaintVenantStochastic => "sv_stochastic",
            InitialCase::Sine => "sine",
            InitialCase::Zero => "zero",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == s)
    }

    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            InitialCase::WaveStochastic
                | InitialCase::BurgersStochasticCase1
                | InitialCase::BurgersStochasticCase2
                | InitialCase::SaintVenantStochastic
        )
    }

    /// Number of components the data is written for, `None` if any.
    pub fn n_comp(self) -> Option<usize> {
        match self {
            InitialCase::WaveConstant
            | InitialCase::SaintVenantSine
            | InitialCase::WaveStochastic
            | InitialCase::SaintVenantStochastic => Some(2),
            InitialCase::BurgersCase1
            | InitialCase::BurgersCase2
            | InitialCase::BurgersStochasticCase1
            | InitialCase::BurgersStochasticCase2 => Some(1),
            InitialCase::Sine | InitialCase::Zero => None,
        }
    }

    /// Pointwise value at `(x, ξ)`; `ξ` is ignored by deterministic cases.
    pub fn eval(self, model: &Model, x: f64, xi: f64, u: &mut [f64]) {
        match self {
            InitialCase::WaveConstant => {
                u[0] = -0.5;
                u[1] = 0.5;
            }
            InitialCase::SaintVenantSine => {
                let s = (PI * x).sin();
                u.copy_from_slice(&model.sv_characteristic(0.5 * s, 20.0 / (8.0 + s) - 2.5));
            }
            InitialCase::SaintVenantStochastic => {
                let s = (PI * x).sin() * (xi - 0.5);
                u.copy_from_slice(&model.sv_characteristic(0.5 * s, 20.0 / (8.0 + s) - 2.5));
            }
            InitialCase::BurgersCase1 => u[0] = burgers_case1(x, 0.0),
            InitialCase::BurgersCase2 => u[0] = burgers_case2(x, 0.0),
            InitialCase::BurgersStochasticCase1 => u[0] = burgers_case1(x, xi),
            InitialCase::BurgersStochasticCase2 => u[0] = burgers_case2(x, xi),
            InitialCase::WaveStochastic => {
                u[0] = 0.25 - 0.5 * xi;
                u[1] = -0.25 + 0.5 * xi;
            }
            InitialCase::Sine => u.iter_mut().for_each(|v| *v = (2.0 * PI * x).sin()),
            InitialCase::Zero => u.iter_mut().for_each(|v| *v = 0.0),
        }
    }

    /// Samples the data at cell centers (and ξ centers when stochastic).
    pub fn build(self, model: &Model, grid: Grid1D, xi: Option<XiGrid>) -> Result<State> {
        let d = model.n_comp();
        State::from_fn_stochastic(d, grid, xi, |x, k, u| self.eval(model, x, k, u))
    }
}

fn burgers_case1(x: f64, xi: f64) -> f64 {
    if x < 0.3 {
        0.3 + xi
    } else if x <= 0.7 {
        0.2
    } else {
        -0.1
    }
}

fn burgers_case2(x: f64, xi: f64) -> f64 {
    if x < 0.3 {
        0.1
    } else if x <= 0.7 {
        0.2 + 0.1 * xi
    } else {
        0.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;

    #[test]
    fn names_round_trip() {
        for c in InitialCase::ALL {
            assert_eq!(InitialCase::from_name(c.name()), Some(c));
        }
    }

    #[test]
    fn stochastic_wave_at_upper_xi_vanishes() {
        let m = Model::new(ModelKind::Wave);
        let mut u = [1.0, 1.0];
        InitialCase::WaveStochastic.eval(&m, 0.3, 0.5, &mut u);
        assert_eq!(u, [0.0, 0.0]);
    }

    #[test]
    fn sv_sine_vanishes_at_ends() {
        let m = Model::new(ModelKind::SvLinear);
        let mut u = [1.0, 1.0];
        InitialCase::SaintVenantSine.eval(&m, 0.0, 0.0, &mut u);
        assert!(u.iter().all(|v| v.abs() < 1e-15));
        InitialCase::SaintVenantSine.eval(&m, 0.5, 0.0, &mut u);
        let dh = 0.5;
        let dv = 20.0 / 9.0 - 2.5;
        let r = (9.81f64 / 4.0).sqrt();
        assert!((u[0] - (dv + r * dh)).abs() < 1e-14);
        assert!((u[1] - (dv - r * dh)).abs() < 1e-14);
    }

    #[test]
    fn burgers_pieces() {
        let m = Model::new(ModelKind::Burgers);
        let mut u = [0.0];
        InitialCase::BurgersCase1.eval(&m, 0.1, 0.0, &mut u);
        assert_eq!(u[0], 0.3);
        InitialCase::BurgersCase1.eval(&m, 0.9, 0.0, &mut u);
        assert_eq!(u[0], -0.1);
        InitialCase::BurgersStochasticCase2.eval(&m, 0.5, 0.5, &mut u);
        assert!((u[0] - 0.25).abs() < 1e-15);
    }
}
