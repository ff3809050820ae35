use std::f64::consts::PI;

use lcse_core::cpt::{DetuningSchedule, Envelope, PulseSchedule};
use lcse_core::dynamics::{
    effective_energy, integrate, EffectiveFlow, Flow, PendulumFlow, ResonantFlow, ResonantVariant,
};
use lcse_core::integrator::{linspace, Control, Solver};
use lcse_core::landscape::LandscapeParams;
use lcse_core::params::{effective_coupling, rb87_c2_ratio, LaserGeometry};
use lcse_core::{CouplingSummary, IntegratorConfig, PendulumState, SpinorAmplitudes, SystemParams};
use proptest::prelude::*;

fn system(k: f64) -> (SystemParams, CouplingSummary) {
    let c2 = rb87_c2_ratio();
    let p = SystemParams::from_target_coupling(c2, 0.01, k * c2, LaserGeometry::default());
    (p, effective_coupling(&p).unwrap())
}

fn lossless_resonant() -> (SystemParams, PulseSchedule) {
    let mut p = SystemParams::collision_only(rb87_c2_ratio(), 0.0);
    p.small_delta = 3.0;
    (p, PulseSchedule::fig4())
}

prop_compose! {
    fn spinor()(w in prop::array::uniform3(0.01f64..1.0), ph in prop::array::uniform3(-PI..PI)) -> SpinorAmplitudes {
        let s: f64 = w.iter().sum();
        SpinorAmplitudes::from_populations_and_phases([w[0] / s, w[1] / s, w[2] / s], ph)
    }
}

/// Integrates forward over `[0, span]` and back with the raw solver, since the
/// end state of the forward leg is only normalized to integrator accuracy.
fn round_trip<F: Flow<State = SpinorAmplitudes>>(
    flow: &F,
    s: &SpinorAmplitudes,
    span: f64,
    cfg: &IntegratorConfig,
) -> SpinorAmplitudes {
    let solver = Solver::new(*cfg).unwrap();
    let fwd = solver
        .run(flow, 0.0, &flow.pack(s), span, |_| Control::Continue)
        .unwrap();
    let back = solver
        .run(flow, span, &fwd.y_final, 0.0, |_| Control::Continue)
        .unwrap();
    flow.unpack(&back.y_final)
}

fn distance(a: &SpinorAmplitudes, b: &SpinorAmplitudes) -> f64 {
    [
        a.a_plus - b.a_plus,
        a.a_zero - b.a_zero,
        a.a_minus - b.a_minus,
        a.a_mol - b.a_mol,
    ]
    .iter()
    .fold(0.0f64, |m, d| m.max(d.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn effective_flow_conserves_number_magnetization_and_energy(s in spinor(), k in -2.0f64..2.0) {
        let (p, c) = system(k);
        let cfg = IntegratorConfig::default();
        let t = integrate(&EffectiveFlow::new(p, c), &s, 0.0, &linspace(0.0, 100.0, 101), &cfg).unwrap();
        prop_assert!(t.max_norm_drift() < 10.0 * cfg.rel_tol);
        prop_assert!(t.max_magnetization_drift() < 10.0 * cfg.rel_tol);
        prop_assert!(t.max_energy_drift() < 10.0 * cfg.rel_tol, "energy drift {}", t.max_energy_drift());
    }

    #[test]
    fn pendulum_energy_drift_is_small(theta in -PI..PI, n0 in 0.02f64..0.98, k in -2.0f64..2.0) {
        let (p, c) = system(k);
        let lp = LandscapeParams::from_coupling(&p, &c, 0.0);
        let start = PendulumState::new(theta, n0, 0.0).unwrap();
        let t = integrate(&PendulumFlow::new(lp), &start, 0.0, &linspace(0.0, 100.0, 101), &IntegratorConfig::default()).unwrap();
        prop_assert!(t.max_energy_drift() < 1e-8, "energy drift {}", t.max_energy_drift());
    }

    #[test]
    fn lossless_resonant_flow_conserves_number_and_magnetization(s in spinor()) {
        let (p, pulse) = lossless_resonant();
        let flow = ResonantFlow::new(p, pulse, ResonantVariant::Symmetrized);
        let t = integrate(&flow, &s, 0.0, &linspace(0.0, 100.0, 101), &IntegratorConfig::default()).unwrap();
        prop_assert!(t.max_norm_drift() < 1e-8, "N drift {}", t.max_norm_drift());
        prop_assert!(t.max_magnetization_drift() < 1e-8);
    }

    #[test]
    fn effective_flow_is_time_reversible(s in spinor(), k in -2.0f64..2.0) {
        let (p, c) = system(k);
        let cfg = IntegratorConfig::default();
        let err = distance(&round_trip(&EffectiveFlow::new(p, c), &s, 50.0, &cfg), &s);
        prop_assert!(err < 100.0 * cfg.rel_tol, "return error {err}");
    }
}

#[test]
fn lossless_resonant_flow_is_time_reversible() {
    let mut p = SystemParams::collision_only(rb87_c2_ratio(), 0.01);
    p.small_delta = 3.0;
    let pulse = PulseSchedule {
        pump: Envelope::Constant { value: 1.0 },
        dump: Envelope::Sech {
            amplitude: 1.0,
            t0: 20.0,
        },
        detuning: DetuningSchedule::Fixed { theta: 0.0 },
    };
    let cfg = IntegratorConfig::default();
    let flow = ResonantFlow::new(p, pulse, ResonantVariant::Symmetrized);
    let s = SpinorAmplitudes::from_populations_and_phases([0.2, 0.5, 0.3], [0.3, -0.7, 1.9]);
    let err = distance(&round_trip(&flow, &s, 50.0, &cfg), &s);
    assert!(err < 100.0 * cfg.rel_tol, "return error {err}");
}

#[test]
fn halving_tolerances_moves_the_final_state_little() {
    let (p, c) = system(-1.0);
    let flow = EffectiveFlow::new(p, c);
    let s = SpinorAmplitudes::from_populations_and_phases([0.05, 0.9, 0.05], [0.0, 0.4, 0.0]);
    let coarse_cfg = IntegratorConfig::with_tolerances(1e-8, 1e-10);
    let fine_cfg = IntegratorConfig::with_tolerances(5e-9, 5e-11);
    let coarse = integrate(&flow, &s, 0.0, &[0.0, 100.0], &coarse_cfg).unwrap();
    let fine = integrate(&flow, &s, 0.0, &[0.0, 100.0], &fine_cfg).unwrap();
    let d = distance(coarse.last_state().unwrap(), fine.last_state().unwrap());
    assert!(d < 10.0 * fine_cfg.rel_tol, "final states differ by {d}");
}

#[test]
fn zero_right_hand_side_leaves_state_and_monitors_flat() {
    let c2 = rb87_c2_ratio();
    let p = SystemParams::from_target_coupling(c2, 0.0, 0.0, LaserGeometry::default());
    let c = effective_coupling(&p).unwrap().without_shifts();
    let s = SpinorAmplitudes::from_populations_and_phases([0.2, 0.5, 0.3], [0.1, 0.2, 0.3]);
    let t = integrate(
        &EffectiveFlow::new(p, c),
        &s,
        0.0,
        &linspace(0.0, 100.0, 11),
        &IntegratorConfig::default(),
    )
    .unwrap();
    let e0 = effective_energy(&s, &p, &c);
    for st in &t.states {
        let o = st.observables();
        assert!((o.n_plus - 0.2).abs() < 1e-12 && (o.n_zero - 0.5).abs() < 1e-12);
        assert!((effective_energy(st, &p, &c) - e0).abs() < 1e-12);
    }
}
