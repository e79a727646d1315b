//! Benchmark balance laws `U_t + F(U)_x = S(U)` and their boundary feedback.
//!
//! All multi-component models are written in characteristic (diagonal)
//! variables, so each component travels with its own speed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::State;

/// Largest component count of any catalogued model.
pub const MAX_COMP: usize = 2;

/// Standard gravity used by the shallow-water models.
pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Decoupled linear wave system with speeds `+1` and `-1`.
    Wave,
    /// Diagonalized linearized Saint-Venant system.
    SvLinear,
    /// Saint-Venant perturbation system with state-dependent speeds.
    SvNonlinear,
    /// Inviscid Burgers equation.
    Burgers,
    /// Linearized Saint-Venant system with linear damping source.
    SvSource,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Wave,
        ModelKind::SvLinear,
        ModelKind::SvNonlinear,
        ModelKind::Burgers,
        ModelKind::SvSource,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Wave => "wave",
            ModelKind::SvLinear => "sv_linear",
            ModelKind::SvNonlinear => "sv_nonlinear",
            ModelKind::Burgers => "burgers",
            ModelKind::SvSource => "sv_source",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model '{s}'")))
    }
}

/// Direction in which a component is transported at the background state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

/// How the LLF dissipation coefficient is chosen at an interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dissipation {
    /// Each characteristic component uses its own local speed.
    Componentwise,
    /// One coefficient, the maximum over all components.
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub g: f64,
    /// Target water depth of the shallow-water models.
    pub h_bar: f64,
    /// Target velocity of the shallow-water models.
    pub v_bar: f64,
    /// Relaxation rate `r` in `S(U) = -r U` (sv_source only).
    pub source_rate: f64,
    pub dissipation: Dissipation,
}

impl Model {
    pub fn new(kind: ModelKind) -> Self {
        Self::with_gravity(kind, STANDARD_GRAVITY)
    }

    pub fn with_gravity(kind: ModelKind, g: f64) -> Self {
        Self {
            kind,
            g,
            h_bar: 4.0,
            v_bar: 2.5,
            source_rate: if kind == ModelKind::SvSource { 0.1 } else { 0.0 },
            dissipation: Dissipation::Componentwise,
        }
    }

    pub fn n_comp(&self) -> usize {
        match self.kind {
            ModelKind::Burgers => 1,
            _ => 2,
        }
    }

    /// Whether a conservative flux exists (all but sv_nonlinear).
    pub fn is_conservative(&self) -> bool {
        self.kind != ModelKind::SvNonlinear
    }

    /// `(Λ₁, Λ₂) = v̄ ± √(g h̄)`.
    pub fn background_speeds(&self) -> (f64, f64) {
        let c = (self.g * self.h_bar).sqrt();
        (self.v_bar + c, self.v_bar - c)
    }

    /// Transport direction of each component at the zero state.
    pub fn directions(&self) -> Vec<Direction> {
        match self.kind {
            ModelKind::Burgers => vec![Direction::Right],
            ModelKind::Wave => vec![Direction::Right, Direction::Left],
            _ => {
                let (l1, l2) = self.background_speeds();
                [l1, l2]
                    .iter()
                    .map(|&l| if l >= 0.0 { Direction::Right } else { Direction::Left })
                    .collect()
            }
        }
    }

    /// Recovers `(δh, δv)` from characteristic variables.
    pub fn sv_perturbation(&self, u: &[f64]) -> (f64, f64) {
        let dv = 0.5 * (u[0] + u[1]);
        let dh = (self.h_bar / self.g).sqrt() * 0.5 * (u[0] - u[1]);
        (dh, dv)
    }

    /// Maps `(δh, δv)` to characteristic variables.
    pub fn sv_characteristic(&self, dh: f64, dv: f64) -> [f64; 2] {
        let s = (self.g / self.h_bar).sqrt();
        [dv + s * dh, dv - s * dh]
    }

    /// Characteristic speed of every component at `u`.
    pub fn speeds(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        match self.kind {
            ModelKind::Wave => {
                out[0] = 1.0;
                out[1] = -1.0;
            }
            ModelKind::SvLinear | ModelKind::SvSource => {
                let (l1, l2) = self.background_speeds();
                out[0] = l1;
                out[1] = l2;
            }
            ModelKind::SvNonlinear => {
                let (dh, dv) = self.sv_perturbation(u);
                let depth = self.h_bar + dh;
                if !(depth > 0.0) {
                    return Err(Error::Domain { cell: 0, depth });
                }
                let c = (self.g * depth).sqrt();
                out[0] = self.v_bar + dv + c;
                out[1] = self.v_bar + dv - c;
            }
            ModelKind::Burgers => out[0] = u[0],
        }
        Ok(())
    }

    pub fn flux(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        match self.kind {
            ModelKind::Wave => {
                out[0] = u[0];
                out[1] = -u[1];
            }
            ModelKind::SvLinear | ModelKind::SvSource => {
                let (l1, l2) = self.background_speeds();
                out[0] = l1 * u[0];
                out[1] = l2 * u[1];
            }
            ModelKind::Burgers => out[0] = 0.5 * u[0] * u[0],
            ModelKind::SvNonlinear => {
                return Err(Error::Config(
                    "sv_nonlinear is in quasilinear form and has no conservative flux".into(),
                ))
            }
        }
        Ok(())
    }

    pub fn source(&self, u: &[f64], out: &mut [f64]) {
        for (i, (o, &v)) in out.iter_mut().zip(u).take(self.n_comp()).enumerate() {
            *o = self.source_component(i, v);
        }
    }

    /// Source of component `comp`, which depends on that component only.
    #[inline]
    pub fn source_component(&self, _comp: usize, v: f64) -> f64 {
        -self.source_rate * v
    }

    pub fn has_source(&self) -> bool {
        self.source_rate != 0.0
    }

    /// Speeds of the linear models, `None` when they depend on the state.
    pub fn constant_speeds(&self) -> Option<[f64; MAX_COMP]> {
        match self.kind {
            ModelKind::Wave => Some([1.0, -1.0]),
            ModelKind::SvLinear | ModelKind::SvSource => {
                let (l1, l2) = self.background_speeds();
                Some([l1, l2])
            }
            ModelKind::SvNonlinear | ModelKind::Burgers => None,
        }
    }

    /// `max_i |λ_i(U)|`.
    pub fn eig_bound(&self, u: &[f64]) -> Result<f64> {
        let mut s = [0.0; MAX_COMP];
        self.speeds(u, &mut s)?;
        Ok(s[..self.n_comp()].iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    /// Inflow value of each component is `κ_i` times its own outflow trace.
    SameSide,
    /// Inflow of each component is `κ_i` times the other component's outflow
    /// trace at the same boundary.
    Mixed,
    /// Burgers feedback, switched on only where the boundary is an inflow.
    BurgersConditional,
    /// Periodic wrap; not a feedback law, used to verify the solvers.
    Periodic,
}

impl LawKind {
    pub const ALL: [LawKind; 4] = [
        LawKind::SameSide,
        LawKind::Mixed,
        LawKind::BurgersConditional,
        LawKind::Periodic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawKind::SameSide => "same_side",
            LawKind::Mixed => "mixed",
            LawKind::BurgersConditional => "burgers_conditional",
            LawKind::Periodic => "periodic",
        }
    }
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LawKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown feedback law '{s}'")))
    }
}

/// Diagonal boundary feedback `κ = diag(κ_1, …, κ_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackLaw {
    pub kind: LawKind,
    pub kappa: Vec<f64>,
}

impl FeedbackLaw {
    pub fn new(kind: LawKind, kappa: Vec<f64>) -> Self {
        Self { kind, kappa }
    }

    /// Same gain on every component.
    pub fn uniform(kind: LawKind, kappa: f64, n_comp: usize) -> Self {
        Self::new(kind, vec![kappa; n_comp])
    }

    pub fn validate(&self, model: &Model) -> Result<()> {
        let d = model.n_comp();
        let mismatch = |reason: &str| Error::LawMismatch {
            law: self.kind.to_string(),
            model: model.kind.to_string(),
            reason: reason.to_string(),
        };
        if self.kappa.len() != d {
            return Err(mismatch(&format!(
                "expected {d} gains, got {}",
                self.kappa.len()
            )));
        }
        if self.kappa.iter().any(|k| !k.is_finite()) {
            return Err(mismatch("gains must be finite"));
        }
        match self.kind {
            LawKind::SameSide | LawKind::Periodic => Ok(()),
            LawKind::Mixed => {
                if d == 2 && model.directions() == [Direction::Right, Direction::Left] {
                    Ok(())
                } else {
                    Err(mismatch("needs one rightward and one leftward component"))
                }
            }
            LawKind::BurgersConditional => {
                if d == 1 {
                    Ok(())
                } else {
                    Err(mismatch("only defined for scalar models"))
                }
            }
        }
    }
}

/// Fills the ghost cells of every slice from the current interior state.
///
/// Boundary traces are taken from the first and last interior cells.
pub fn apply_boundary(state: &mut State, law: &FeedbackLaw, model: &Model) -> Result<()> {
    law.validate(model)?;
    if state.n_comp != model.n_comp() {
        return Err(Error::LawMismatch {
            law: law.kind.to_string(),
            model: model.kind.to_string(),
            reason: format!(
                "state has {} components, model has {}",
                state.n_comp,
                model.n_comp()
            ),
        });
    }
    let nx = state.n_cells();
    let dirs = model.directions();
    let k = &law.kappa;
    for s in 0..state.n_slices() {
        match law.kind {
            LawKind::SameSide => {
                for (i, dir) in dirs.iter().enumerate() {
                    let row = state.row_mut(s, i);
                    match dir {
                        Direction::Right => {
                            row[0] = k[i] * row[nx];
                            row[nx + 1] = row[nx];
                        }
                        Direction::Left => {
                            row[nx + 1] = k[i] * row[1];
                            row[0] = row[1];
                        }
                    }
                }
            }
            LawKind::Mixed => {
                let u1_right = state.get(s, 0, nx);
                let u2_left = state.get(s, 1, 1);
                state.set(s, 0, 0, k[0] * u2_left);
                state.set(s, 0, nx + 1, u1_right);
                state.set(s, 1, nx + 1, k[1] * u1_right);
                state.set(s, 1, 0, u2_left);
            }
            LawKind::BurgersConditional => {
                let row = state.row_mut(s, 0);
                let (left, right) = (row[1], row[nx]);
                row[0] = if left > 0.0 { k[0] * right } else { left };
                row[nx + 1] = if right < 0.0 { k[0] * left } else { right };
            }
            LawKind::Periodic => {
                for i in 0..state.n_comp {
                    let row = state.row_mut(s, i);
                    row[0] = row[nx];
                    row[nx + 1] = row[1];
                }
            }
        }
    }
    Ok(())
}
