//! Local Lax-Friedrichs (Rusanov) finite-volume schemes.
//!
//! First order: forward Euler on piecewise-constant data. Second order:
//! piecewise-linear reconstruction with generalized minmod slopes and the
//! three-stage SSP Runge-Kutta method. Models in quasilinear form are
//! advanced with the LLF update applied to locally frozen speeds.
//!
//! Stochastic states are advanced slice by slice with a common time step.

use crate::error::{Error, Result};
use crate::grid::State;
use crate::indicator::{indicator, IndicatorConfig};
use crate::model::{apply_boundary, Dissipation, FeedbackLaw, LawKind, Model, MAX_COMP};

/// Default generalized-minmod parameter.
pub const DEFAULT_THETA: f64 = 1.3;

/// Default guard against `dt` underflow in [`run_to_time`].
pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// 1 or 2.
    pub order: u8,
    pub cfl: f64,
    /// Minmod parameter in `[1, 2]`, second order only.
    pub theta: f64,
    pub t_final: f64,
    pub max_steps: usize,
}

impl SolverConfig {
    pub fn first_order(cfl: f64, t_final: f64) -> Self {
        Self {
            order: 1,
            cfl,
            theta: DEFAULT_THETA,
            t_final,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn second_order(cfl: f64, theta: f64, t_final: f64) -> Self {
        Self {
            order: 2,
            cfl,
            theta,
            t_final,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.order, 1 | 2) {
            return Err(Error::Config(format!("order must be 1 or 2, got {}", self.order)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(1.0..=2.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must lie in [1, 2], got {}", self.theta)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("invalid final time {}", self.t_final)));
        }
        Ok(())
    }
}

/// Interface reconstruction used by one forward-Euler stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reconstruction {
    Constant,
    Minmod { theta: f64 },
}

/// `minmod(z_1, …)`: smallest argument if all positive, largest if all
/// negative, zero otherwise.
pub fn minmod(z: &[f64]) -> f64 {
    if z.iter().all(|&v| v > 0.0) {
        z.iter().copied().fold(f64::INFINITY, f64::min)
    } else if z.iter().all(|&v| v < 0.0) {
        z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    }
}

/// Generalized minmod slope from three consecutive cell averages.
#[inline]
pub fn limited_slope(left: f64, center: f64, right: f64, dx: f64, theta: f64) -> f64 {
    minmod(&[
        theta * (center - left) / dx,
        (right - left) / (2.0 * dx),
        theta * (right - center) / dx,
    ])
}

fn attach_cell(err: Error, cell: usize) -> Error {
    match err {
        Error::Domain { depth, .. } => Error::Domain { cell, depth },
        e => e,
    }
}

/// Largest local speed over all cells and slices, ghosts included.
fn max_speed(state: &State, model: &Model) -> Result<f64> {
    let d = state.n_comp;
    if let Some(lam) = model.constant_speeds() {
        return Ok(lam[..d].iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let mut u = [0.0; MAX_COMP];
    let mut amax = 0.0f64;
    for k in 0..state.n_slices() {
        for j in 0..state.row_len() {
            for (i, v) in u.iter_mut().enumerate().take(d) {
                *v = state.get(k, i, j);
            }
            let a = model.eig_bound(&u[..d]).map_err(|e| attach_cell(e, j))?;
            amax = amax.max(a);
        }
    }
    Ok(amax)
}

/// CFL time step, clipped so that `time + dt ≤ t_final`.
pub fn compute_dt(state: &State, model: &Model, config: &SolverConfig) -> Result<f64> {
    let amax = max_speed(state, model)?;
    if !(amax > 0.0) {
        return Err(Error::Stationary);
    }
    let dt = config.cfl * state.grid.dx / amax;
    Ok(dt.min(config.t_final - state.time))
}

struct Scratch {
    slopes: Vec<f64>,
    fluxes: Vec<f64>,
    speeds: Vec<f64>,
    alphas: Vec<f64>,
}

impl Scratch {
    fn new(d: usize, nx: usize) -> Self {
        Self {
            slopes: vec![0.0; d * (nx + 2)],
            fluxes: vec![0.0; d * (nx + 1)],
            speeds: vec![0.0; d * (nx + 2)],
            alphas: vec![0.0; d * (nx + 1)],
        }
    }
}

/// Local dissipation coefficient for each component at one interface.
#[inline]
fn interface_alpha(model: &Model, sl: &[f64], sr: &[f64], out: &mut [f64]) {
    let d = out.len();
    match model.dissipation {
        Dissipation::Componentwise => {
            for i in 0..d {
                out[i] = sl[i].abs().max(sr[i].abs());
            }
        }
        Dissipation::Global => {
            let a = sl[..d]
                .iter()
                .chain(&sr[..d])
                .fold(0.0f64, |m, v| m.max(v.abs()));
            out.iter_mut().for_each(|o| *o = a);
        }
    }
}

/// One forward-Euler step of the semi-discrete scheme on a single slice.
///
/// `src` and `dst` hold `d` rows of `N_x + 2` values. Only interior cells of
/// `dst` are written.
#[allow(clippy::too_many_arguments)]
fn euler_slice(
    model: &Model,
    src: &[f64],
    dst: &mut [f64],
    nx: usize,
    dx: f64,
    dt: f64,
    recon: Reconstruction,
    periodic: bool,
    scratch: &mut Scratch,
) -> Result<()> {
    let d = model.n_comp();
    let row = nx + 2;
    let at = |i: usize, j: usize| src[i * row + j];
    let ratio = dt / dx;

    if !model.is_conservative() {
        if recon != Reconstruction::Constant {
            return Err(Error::Config(format!(
                "model {} has no conservative flux; only the first-order scheme applies",
                model.kind
            )));
        }
        let mut u = [0.0; MAX_COMP];
        let mut lam = [0.0; MAX_COMP];
        for j in 0..row {
            for (i, v) in u.iter_mut().enumerate().take(d) {
                *v = at(i, j);
            }
            model
                .speeds(&u[..d], &mut lam[..d])
                .map_err(|e| attach_cell(e, j))?;
            for i in 0..d {
                scratch.speeds[j * d + i] = lam[i];
            }
        }
        for f in 0..=nx {
            let (l, r) = scratch.speeds[f * d..(f + 2) * d].split_at(d);
            interface_alpha(model, l, r, &mut scratch.alphas[f * d..(f + 1) * d]);
        }
        let mut src_term = [0.0; MAX_COMP];
        for j in 1..=nx {
            for (i, v) in u.iter_mut().enumerate().take(d) {
                *v = at(i, j);
            }
            model.source(&u[..d], &mut src_term[..d]);
            for i in 0..d {
                let (um, uc, up) = (at(i, j - 1), at(i, j), at(i, j + 1));
                let lam = scratch.speeds[j * d + i];
                let a_r = scratch.alphas[j * d + i];
                let a_l = scratch.alphas[(j - 1) * d + i];
                dst[i * row + j] = uc - ratio * lam * 0.5 * (up - um)
                    + ratio * 0.5 * (a_r * (up - uc) - a_l * (uc - um))
                    + dt * src_term[i];
            }
        }
        return Ok(());
    }

    match recon {
        Reconstruction::Constant => {}
        Reconstruction::Minmod { theta } => {
            for i in 0..d {
                let s = &mut scratch.slopes[i * row..(i + 1) * row];
                for j in 1..=nx {
                    s[j] = limited_slope(at(i, j - 1), at(i, j), at(i, j + 1), dx, theta);
                }
                if periodic {
                    s[0] = s[nx];
                    s[nx + 1] = s[1];
                } else {
                    s[0] = 0.0;
                    s[nx + 1] = 0.0;
                }
            }
        }
    }

    if let Some(lam) = model.constant_speeds() {
        let mut alpha = [0.0; MAX_COMP];
        interface_alpha(model, &lam, &lam, &mut alpha[..d]);
        for i in 0..d {
            let u = &src[i * row..(i + 1) * row];
            let fl = &mut scratch.fluxes[i * (nx + 1)..(i + 1) * (nx + 1)];
            let (l, a) = (lam[i], alpha[i]);
            let llf = |um: f64, up: f64| 0.5 * (l * um + l * up) - 0.5 * a * (up - um);
            if recon == Reconstruction::Constant {
                for (f, w) in fl.iter_mut().zip(u.windows(2)) {
                    *f = llf(w[0], w[1]);
                }
            } else {
                let s = &scratch.slopes[i * row..(i + 1) * row];
                for ((f, w), ws) in fl.iter_mut().zip(u.windows(2)).zip(s.windows(2)) {
                    *f = llf(w[0] + 0.5 * dx * ws[0], w[1] - 0.5 * dx * ws[1]);
                }
            }
        }
    } else {
        conservative_fluxes(model, src, nx, dx, scratch)?;
    }

    let has_source = model.has_source();
    for i in 0..d {
        let u = &src[i * row..(i + 1) * row];
        let out = &mut dst[i * row..(i + 1) * row];
        let fl = &scratch.fluxes[i * (nx + 1)..(i + 1) * (nx + 1)];
        let cells = out[1..=nx].iter_mut().zip(&u[1..=nx]).zip(fl.windows(2));
        if has_source {
            for ((o, &uj), w) in cells {
                *o = uj - ratio * (w[1] - w[0]) + dt * model.source_component(i, uj);
            }
        } else {
            for ((o, &uj), w) in cells {
                *o = uj - ratio * (w[1] - w[0]);
            }
        }
    }
    Ok(())
}

/// LLF interface fluxes of a state-dependent conservative model.
fn conservative_fluxes(
    model: &Model,
    src: &[f64],
    nx: usize,
    dx: f64,
    scratch: &mut Scratch,
) -> Result<()> {
    let d = model.n_comp();
    let row = nx + 2;
    let at = |i: usize, j: usize| src[i * row + j];
    let mut um = [0.0; MAX_COMP];
    let mut up = [0.0; MAX_COMP];
    let mut fm = [0.0; MAX_COMP];
    let mut fp = [0.0; MAX_COMP];
    let mut sm = [0.0; MAX_COMP];
    let mut sp = [0.0; MAX_COMP];
    let mut alpha = [0.0; MAX_COMP];
    for f in 0..=nx {
        for i in 0..d {
            um[i] = at(i, f) + 0.5 * dx * scratch.slopes[i * row + f];
            up[i] = at(i, f + 1) - 0.5 * dx * scratch.slopes[i * row + f + 1];
        }
        model.flux(&um[..d], &mut fm[..d])?;
        model.flux(&up[..d], &mut fp[..d])?;
        model
            .speeds(&um[..d], &mut sm[..d])
            .map_err(|e| attach_cell(e, f))?;
        model
            .speeds(&up[..d], &mut sp[..d])
            .map_err(|e| attach_cell(e, f + 1))?;
        interface_alpha(model, &sm, &sp, &mut alpha[..d]);
        for i in 0..d {
            scratch.fluxes[i * (nx + 1) + f] =
                0.5 * (fm[i] + fp[i]) - 0.5 * alpha[i] * (up[i] - um[i]);
        }
    }
    Ok(())
}

/// Writes one forward-Euler update of `src` into the interior cells of
/// `dst`, a buffer laid out like the values of `src`.
fn euler_update(
    src: &State,
    dst: &mut [f64],
    model: &Model,
    law: &FeedbackLaw,
    dt: f64,
    recon: Reconstruction,
) -> Result<()> {
    let nx = src.n_cells();
    let dx = src.grid.dx;
    let periodic = law.kind == LawKind::Periodic;
    let mut scratch = Scratch::new(src.n_comp, nx);
    let slice_len = src.n_comp * src.row_len();
    for (k, dst) in dst.chunks_exact_mut(slice_len).enumerate() {
        euler_slice(
            model,
            src.slice_values(k),
            dst,
            nx,
            dx,
            dt,
            recon,
            periodic,
            &mut scratch,
        )?;
    }
    Ok(())
}

fn check_finite(state: &State) -> Result<()> {
    match state.find_non_finite() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// First-order LLF step. Ghost cells are refreshed from `state` first and
/// again after the update.
pub fn step_first_order(
    state: &mut State,
    model: &Model,
    law: &FeedbackLaw,
    dt: f64,
) -> Result<()> {
    apply_boundary(state, law, model)?;
    let mut buf = SPARE.with(|s| s.take());
    buf.resize(state.values().len(), 0.0);
    euler_update(state, &mut buf, model, law, dt, Reconstruction::Constant)?;
    state.swap_values(&mut buf);
    let result = apply_boundary(state, law, model).and_then(|_| check_finite(state));
    if result.is_err() {
        state.swap_values(&mut buf);
    } else {
        state.time += dt;
    }
    SPARE.with(|s| s.replace(buf));
    result
}

thread_local! {
    static SPARE: std::cell::RefCell<Vec<f64>> = const { std::cell::RefCell::new(Vec::new()) };
}

/// Second-order LLF step: minmod reconstruction and SSP-RK3. Ghost cells are
/// refilled from each stage state before its right-hand side is evaluated.
pub fn step_second_order(
    state: &mut State,
    model: &Model,
    law: &FeedbackLaw,
    dt: f64,
    theta: f64,
) -> Result<()> {
    step_ssp_rk3(state, model, law, dt, Reconstruction::Minmod { theta })
}

/// SSP-RK3 with an arbitrary reconstruction.
pub fn step_ssp_rk3(
    state: &mut State,
    model: &Model,
    law: &FeedbackLaw,
    dt: f64,
    recon: Reconstruction,
) -> Result<()> {
    apply_boundary(state, law, model)?;
    let u0 = state.clone();

    let mut u1 = u0.clone();
    euler_update(&u0, u1.values_mut(), model, law, dt, recon)?;
    apply_boundary(&mut u1, law, model)?;

    let mut stage = u1.clone();
    euler_update(&u1, stage.values_mut(), model, law, dt, recon)?;
    let mut u2 = stage;
    combine_interior(&mut u2, &u0, 0.75, 0.25);
    apply_boundary(&mut u2, law, model)?;

    let mut stage = u2.clone();
    euler_update(&u2, stage.values_mut(), model, law, dt, recon)?;
    let mut u3 = stage;
    combine_interior(&mut u3, &u0, 1.0 / 3.0, 2.0 / 3.0);
    u3.time = u0.time + dt;
    apply_boundary(&mut u3, law, model)?;
    check_finite(&u3)?;
    *state = u3;
    Ok(())
}

/// `target ← a·base + b·target` on interior cells.
fn combine_interior(target: &mut State, base: &State, a: f64, b: f64) {
    let nx = target.n_cells();
    for k in 0..target.n_slices() {
        for i in 0..target.n_comp {
            let src = base.row(k, i);
            let dst = target.row_mut(k, i);
            for j in 1..=nx {
                dst[j] = a * src[j] + b * dst[j];
            }
        }
    }
}

/// Outcome of one attempted time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Advance {
    /// Step taken with the given `dt`.
    Stepped(f64),
    /// All speeds vanish; the state is a fixed point and was moved to `t_final`.
    Stationary,
    /// Already at the final time.
    Finished,
}

/// Boundary refresh, CFL step, and one step of the configured order.
/// The last step lands exactly on `t_final`.
pub fn advance(
    state: &mut State,
    model: &Model,
    law: &FeedbackLaw,
    config: &SolverConfig,
) -> Result<Advance> {
    if state.time >= config.t_final {
        return Ok(Advance::Finished);
    }
    apply_boundary(state, law, model)?;
    let dt = match compute_dt(state, model, config) {
        Ok(dt) => dt,
        Err(Error::Stationary) => {
            state.time = config.t_final;
            return Ok(Advance::Stationary);
        }
        Err(e) => return Err(e),
    };
    let landing = state.time + dt >= config.t_final;
    match config.order {
        1 => step_first_order(state, model, law, dt)?,
        2 => step_second_order(state, model, law, dt, config.theta)?,
        o => return Err(Error::Config(format!("order must be 1 or 2, got {o}"))),
    }
    if landing {
        state.time = config.t_final;
    }
    Ok(Advance::Stepped(dt))
}

/// Advances to `config.t_final`, sampling the indicator at `t = 0` and after
/// every accepted step when one is given.
pub fn run_to_time(
    mut state: State,
    model: &Model,
    law: &FeedbackLaw,
    config: &SolverConfig,
    indicator_config: Option<&IndicatorConfig>,
) -> Result<(State, Vec<(f64, f64)>)> {
    config.validate()?;
    law.validate(model)?;
    let mut series = Vec::new();
    if let Some(ic) = indicator_config {
        series.push((state.time, indicator(&state, ic)));
    }
    let mut steps = 0usize;
    while state.time < config.t_final {
        if steps >= config.max_steps {
            return Err(Error::StepLimit(config.max_steps));
        }
        match advance(&mut state, model, law, config)? {
            Advance::Stepped(_) => {}
            Advance::Stationary | Advance::Finished => break,
        }
        steps += 1;
        if let Some(ic) = indicator_config {
            series.push((state.time, indicator(&state, ic)));
        }
    }
    Ok((state, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::indicator::IndicatorConfig;
    use crate::model::ModelKind;
    use approx::assert_relative_eq;

    fn grid(n: usize) -> Grid1D {
        Grid1D::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(minmod(&[-1.0, -2.0, -3.0]), -1.0);
        assert_eq!(minmod(&[1.0, -1.0, 2.0]), 0.0);
        assert_eq!(minmod(&[0.0, 1.0, 2.0]), 0.0);
    }

    #[test]
    fn dt_examples() {
        let cfg = SolverConfig::first_order(1.0, 10.0);
        let wave = Model::new(ModelKind::Wave);
        let s = State::zeros(2, grid(100), None);
        assert_relative_eq!(compute_dt(&s, &wave, &cfg).unwrap(), 0.01, epsilon = 1e-16);

        let sv = Model::new(ModelKind::SvLinear);
        let dt = compute_dt(&s, &sv, &cfg).unwrap();
        assert_relative_eq!(dt, 0.01 / 8.764_183_905_346, epsilon = 1e-12);
        assert_relative_eq!(dt, 1.1410e-3, epsilon = 1e-7);

        let burgers = Model::new(ModelKind::Burgers);
        let s = State::from_fn(1, grid(200), |_, u| u[0] = 0.2).unwrap();
        let cfg = SolverConfig::first_order(0.5, 10.0);
        assert_relative_eq!(compute_dt(&s, &burgers, &cfg).unwrap(), 0.0125, epsilon = 1e-15);
    }

    #[test]
    fn dt_clipped_to_final_time() {
        let cfg = SolverConfig::first_order(1.0, 0.004);
        let s = State::zeros(2, grid(100), None);
        let dt = compute_dt(&s, &Model::new(ModelKind::Wave), &cfg).unwrap();
        assert_eq!(dt, 0.004);
    }

    #[test]
    fn zero_speeds_rejected() {
        let s = State::zeros(1, grid(10), None);
        let cfg = SolverConfig::first_order(1.0, 1.0);
        assert_eq!(
            compute_dt(&s, &Model::new(ModelKind::Burgers), &cfg),
            Err(Error::Stationary)
        );
    }

    #[test]
    fn zero_state_is_fixed_point() {
        for kind in [ModelKind::Wave, ModelKind::SvLinear, ModelKind::SvSource, ModelKind::SvNonlinear] {
            let model = Model::new(kind);
            let law = FeedbackLaw::uniform(LawKind::SameSide, 0.7, 2);
            let mut s = State::zeros(2, grid(20), None);
            step_first_order(&mut s, &model, &law, 1e-3).unwrap();
            assert!(s.values().iter().all(|&v| v == 0.0));
            if model.is_conservative() {
                step_second_order(&mut s, &model, &law, 1e-3, 1.3).unwrap();
                assert!(s.values().iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn constant_state_with_source() {
        let model = Model::new(ModelKind::SvSource);
        let law = FeedbackLaw::uniform(LawKind::SameSide, 1.0, 2);
        let mut s = State::from_fn(2, grid(10), |_, u| {
            u[0] = 1.0;
            u[1] = 1.0;
        })
        .unwrap();
        let dt = 1e-3;
        step_first_order(&mut s, &model, &law, dt).unwrap();
        // κ = 1 keeps the ghosts equal to the interior, so all fluxes cancel
        for i in 0..2 {
            for j in 1..=10 {
                assert_relative_eq!(s.get(0, i, j), 1.0 - 0.1 * dt, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn constant_state_fixed_point_second_order() {
        let model = Model::new(ModelKind::Burgers);
        let law = FeedbackLaw::uniform(LawKind::BurgersConditional, 1.0, 1);
        let mut s = State::from_fn(1, grid(16), |_, u| u[0] = 0.25).unwrap();
        step_second_order(&mut s, &model, &law, 0.01, 1.3).unwrap();
        for j in 1..=16 {
            assert_relative_eq!(s.get(0, 0, j), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn cfl_one_wave_step_is_exact_shift() {
        let model = Model::new(ModelKind::Wave);
        let law = FeedbackLaw::uniform(LawKind::SameSide, 0.0, 2);
        let mut s = State::from_fn(2, grid(10), |x, u| {
            u[0] = x;
            u[1] = -x;
        })
        .unwrap();
        let before = s.clone();
        step_first_order(&mut s, &model, &law, 0.1).unwrap();
        for j in 2..=10 {
            assert_relative_eq!(s.get(0, 0, j), before.get(0, 0, j - 1), epsilon = 1e-15);
        }
        assert_relative_eq!(s.get(0, 0, 1), 0.0, epsilon = 1e-15);
        for j in 1..=9 {
            assert_relative_eq!(s.get(0, 1, j), before.get(0, 1, j + 1), epsilon = 1e-15);
        }
        assert_relative_eq!(s.get(0, 1, 10), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn quasilinear_matches_llf_for_constant_speeds() {
        // At δ = 0 the nonlinear Saint-Venant speeds equal the linear ones, so
        // for tiny data the quasilinear update must track the linear LLF step.
        let lin = Model::new(ModelKind::SvLinear);
        let non = Model::new(ModelKind::SvNonlinear);
        let law = FeedbackLaw::uniform(LawKind::SameSide, 0.5, 2);
        let ic = |x: f64, u: &mut [f64]| {
            u[0] = 1e-9 * (3.0 * x).sin();
            u[1] = 1e-9 * x.cos();
        };
        let mut a = State::from_fn(2, grid(30), ic).unwrap();
        let mut b = a.clone();
        step_first_order(&mut a, &lin, &law, 1e-3).unwrap();
        step_first_order(&mut b, &non, &law, 1e-3).unwrap();
        for i in 0..2 {
            for j in 1..=30 {
                assert!((a.get(0, i, j) - b.get(0, i, j)).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn quasilinear_rejects_second_order() {
        let model = Model::new(ModelKind::SvNonlinear);
        let law = FeedbackLaw::uniform(LawKind::SameSide, 0.5, 2);
        let mut s = State::zeros(2, grid(10), None);
        assert!(step_second_order(&mut s, &model, &law, 1e-3, 1.3).is_err());
    }

    #[test]
    fn global_dissipation_differs_for_unequal_speeds() {
        let mut model = Model::new(ModelKind::SvLinear);
        let law = FeedbackLaw::uniform(LawKind::SameSide, 0.0, 2);
        let ic = |x: f64, u: &mut [f64]| {
            u[0] = x;
            u[1] = x * x;
        };
        let mut a = State::from_fn(2, grid(10), ic).unwrap();
        let mut b = a.clone();
        step_first_order(&mut a, &model, &law, 1e-3).unwrap();
        model.dissipation = Dissipation::Global;
        step_first_order(&mut b, &model, &law, 1e-3).unwrap();
        // the fast component is identical, the slow one gets extra diffusion
        assert_eq!(a.row(0, 0), b.row(0, 0));
        assert_ne!(a.row(0, 1), b.row(0, 1));
    }

    #[test]
    fn blow_up_reports_cell() {
        let model = Model::new(ModelKind::Wave);
        let law = FeedbackLaw::uniform(LawKind::SameSide, f64::MAX, 2);
        let mut s = State::from_fn(2, grid(4), |_, u| {
            u[0] = f64::MAX;
            u[1] = 0.0;
        })
        .unwrap();
        let err = step_first_order(&mut s, &model, &law, 0.25).unwrap_err();
        assert!(matches!(err, Error::NonFinite { comp: 0, .. }));
    }

    #[test]
    fn zero_final_time_returns_input() {
        let model = Model::new(ModelKind::Burgers);
        let law = FeedbackLaw::uniform(LawKind::BurgersConditional, 1.5, 1);
        let s = State::from_fn(1, grid(10), |x, u| u[0] = x).unwrap();
        let cfg = SolverConfig::first_order(0.5, 0.0);
        let (out, series) = run_to_time(s.clone(), &model, &law, &cfg, None).unwrap();
        assert_eq!(out, s);
        assert!(series.is_empty());
    }

    #[test]
    fn run_lands_on_final_time() {
        let model = Model::new(ModelKind::Wave);
        let law = FeedbackLaw::uniform(LawKind::SameSide, 0.5, 2);
        let s = State::from_fn(2, grid(10), |_, u| {
            u[0] = 1.0;
            u[1] = 1.0;
        })
        .unwrap();
        let cfg = SolverConfig::first_order(0.9, 0.37);
        let ic = IndicatorConfig::energy();
        let (out, series) = run_to_time(s, &model, &law, &cfg, Some(&ic)).unwrap();
        assert_eq!(out.time, 0.37);
        assert_eq!(series.first().unwrap().0, 0.0);
        assert_eq!(series.last().unwrap().0, 0.37);
        assert!(series.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn config_validation() {
        let mut c = SolverConfig::first_order(1.0, 1.0);
        assert!(c.validate().is_ok());
        c.cfl = 1.5;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::second_order(0.5, 2.5, 1.0);
        assert!(c.validate().is_err());
        c.theta = 1.3;
        c.order = 3;
        assert!(c.validate().is_err());
    }
}
