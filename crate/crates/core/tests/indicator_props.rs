use hypstab_core::{
    indicator, Grid1D, IndicatorConfig, Model, ModelKind, State, WeightConvention, XiGrid,
};
use proptest::prelude::*;

fn state_from(d: usize, values: &[f64], xi: Option<XiGrid>) -> State {
    let nx = values.len() / (d * xi.as_ref().map_or(1, |g| g.n_xi));
    let mut s = State::zeros(d, Grid1D::new(0.0, 1.0, nx).unwrap(), xi);
    let mut it = values.iter();
    for k in 0..s.n_slices() {
        for i in 0..d {
            for j in 1..=nx {
                s.set(k, i, j, *it.next().unwrap());
            }
        }
    }
    s
}

/// Brute-force `Δx Σ w(x) u²` straight from cell centers.
fn weighted_sum(s: &State, w: impl Fn(usize, f64) -> f64) -> f64 {
    let nx = s.n_cells();
    let dxi = s.xi.as_ref().map_or(1.0, |g| g.dxi);
    let mut total = 0.0;
    for k in 0..s.n_slices() {
        for i in 0..s.n_comp {
            for j in 1..=nx {
                let x = s.grid.x_min + (j as f64 - 0.5) * s.grid.dx;
                total += w(i, x) * s.get(k, i, j).powi(2);
            }
        }
    }
    total * s.grid.dx * dxi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lyapunov_is_bracketed_by_energy(
        values in prop::collection::vec(-3.0f64..3.0, 4..120),
        mu_pick in 0usize..3,
        sv in any::<bool>(),
    ) {
        let mu = [0.1, 1.0, 2.0][mu_pick];
        let model = Model::new(if sv { ModelKind::SvLinear } else { ModelKind::Wave });
        let n = values.len() / 2 * 2;
        let s = state_from(2, &values[..n], None);
        let energy = indicator(&s, &IndicatorConfig::energy());
        let lyap = indicator(&s, &IndicatorConfig::lyapunov(&model, vec![mu; 2], WeightConvention::PerDirection));
        let slack = 1e-12 * energy;
        prop_assert!((-mu).exp() * energy <= lyap + slack);
        prop_assert!(lyap <= mu.exp() * energy + slack);

        let brute = weighted_sum(&s, |i, x| if i == 0 { (-mu * x).exp() } else { (mu * x).exp() });
        prop_assert!((lyap - brute).abs() <= 1e-12 * brute.max(1e-300));
    }

    #[test]
    fn quadratic_scaling_and_positivity(
        values in prop::collection::vec(-3.0f64..3.0, 4..80),
        c in -10.0f64..10.0,
    ) {
        let n = values.len() / 2 * 2;
        let s = state_from(2, &values[..n], None);
        let scaled: Vec<f64> = values[..n].iter().map(|v| c * v).collect();
        let cs = state_from(2, &scaled, None);
        for cfg in [
            IndicatorConfig::energy(),
            IndicatorConfig::lyapunov(&Model::new(ModelKind::Wave), vec![1.0, 1.0], WeightConvention::UniformDecay),
        ] {
            let l = indicator(&s, &cfg);
            prop_assert!(l >= 0.0);
            prop_assert!((l == 0.0) == values[..n].iter().all(|&v| v == 0.0));
            let lc = indicator(&cs, &cfg);
            prop_assert!((lc - c * c * l).abs() <= 1e-12 * (c * c * l).max(1e-300));
        }
    }

    #[test]
    fn stochastic_energy_averages_over_xi(
        values in prop::collection::vec(-2.0f64..2.0, 24..25),
    ) {
        let xi = XiGrid::new(-0.5, 0.5, 3).unwrap();
        let s = state_from(2, &values, Some(xi));
        let l = indicator(&s, &IndicatorConfig::energy());
        let brute = weighted_sum(&s, |_, _| 1.0);
        prop_assert!((l - brute).abs() <= 1e-13);
    }
}

#[test]
fn constant_wave_state_energy() {
    let s = State::from_fn(2, Grid1D::new(0.0, 1.0, 100).unwrap(), |_, u| {
        u[0] = -0.5;
        u[1] = 0.5;
    })
    .unwrap();
    assert!((indicator(&s, &IndicatorConfig::energy()) - 0.5).abs() < 1e-14);
}

#[test]
fn small_rates_approach_energy() {
    let s = State::from_fn(2, Grid1D::new(0.0, 1.0, 50).unwrap(), |x, u| {
        u[0] = x.sin();
        u[1] = 1.0 - x;
    })
    .unwrap();
    let e = indicator(&s, &IndicatorConfig::energy());
    let l = indicator(
        &s,
        &IndicatorConfig::lyapunov(&Model::new(ModelKind::Wave), vec![1e-9; 2], WeightConvention::PerDirection),
    );
    assert!((e - l).abs() < 1e-8 * e);
}
