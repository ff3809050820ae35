use lcse_core::dynamics::{integrate, EffectiveFlow};
use lcse_core::integrator::linspace;
use lcse_core::params::{classify_regime, effective_coupling, rb87_c2_ratio, LaserGeometry};
use lcse_core::{IntegratorConfig, Regime, SpinorAmplitudes, SystemParams};

fn n0_range(k: f64) -> (Regime, f64, f64) {
    let c2 = rb87_c2_ratio();
    let p = SystemParams::from_target_coupling(c2, 0.01, k * c2, LaserGeometry::default());
    let c = effective_coupling(&p).unwrap();
    let s = SpinorAmplitudes::from_populations(0.05, 0.9, 0.05);
    let t = integrate(
        &EffectiveFlow::new(p, c),
        &s,
        0.0,
        &linspace(0.0, 500.0, 2001),
        &IntegratorConfig::default(),
    )
    .unwrap();
    let n0 = t.states.iter().map(|s| s.a_zero.norm_sqr());
    let (lo, hi) = n0.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    (classify_regime(c.c_eff, c2), lo, hi)
}

#[test]
fn spin_zero_population_moves_in_the_direction_set_by_the_coupling_sign() {
    for k in [2.0, 1.0, 0.5, 0.0, -0.5, -1.0, -2.0] {
        let (regime, lo, hi) = n0_range(k);
        match regime {
            Regime::CollisionDominated => {
                assert!(lo >= 0.9 - 1e-6 && hi > 0.9 + 1e-3, "k = {k}: [{lo}, {hi}]")
            }
            Regime::Frozen => assert!(
                (lo - 0.9).abs() < 1e-6 && (hi - 0.9).abs() < 1e-6,
                "k = {k}"
            ),
            Regime::Reversed => {
                assert!(hi <= 0.9 + 1e-6 && lo < 0.9 - 1e-3, "k = {k}: [{lo}, {hi}]")
            }
        }
    }
}

#[test]
fn regimes_follow_the_coupling_ratio() {
    assert_eq!(n0_range(1.0).0, Regime::CollisionDominated);
    assert_eq!(n0_range(0.0).0, Regime::Frozen);
    assert_eq!(n0_range(-1.0).0, Regime::Reversed);
}
