use lcse_core::cpt::{
    cpt_populations, cpt_state, cpt_stationarity_residual, run_transfer, DetuningSchedule,
    Envelope, PulseSchedule, ResonanceRule, TransferResult, TRANSFER_TAU_SPAN,
};
use lcse_core::dynamics::ResonantVariant;
use lcse_core::params::rb87_c2_ratio;
use lcse_core::{IntegratorConfig, SpinorAmplitudes, SystemParams};
use proptest::prelude::*;

fn params(gamma: f64) -> SystemParams {
    let mut p = SystemParams::collision_only(rb87_c2_ratio(), 0.0);
    p.small_delta = 3.0;
    p.gamma = gamma;
    p
}

fn transfer(gamma: f64, t0: f64) -> TransferResult {
    let pulse = PulseSchedule {
        dump: Envelope::Sech {
            amplitude: 40.0,
            t0,
        },
        ..PulseSchedule::fig4()
    };
    let s = SpinorAmplitudes::from_populations(1e-5, 1.0 - 2e-5, 1e-5);
    run_transfer(
        &s,
        &params(gamma),
        &pulse,
        ResonantVariant::Symmetrized,
        TRANSFER_TAU_SPAN,
        301,
        &IntegratorConfig::default(),
    )
    .unwrap()
    .result
}

#[test]
fn molecular_peak_shrinks_with_loss() {
    let peaks: Vec<f64> = [0.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&g| transfer(g, 20.0).peak_molecular)
        .collect();
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

#[test]
fn molecular_peak_shrinks_for_slower_pulses() {
    let peaks: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&t0| transfer(1.0, t0).peak_molecular)
        .collect();
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

#[test]
fn side_modes_stay_balanced() {
    let r = transfer(1.0, 20.0);
    assert!(r.max_side_asymmetry < 1e-12);
    assert!((r.final_populations[0] - r.final_populations[2]).abs() < 1e-12);
    assert!(r.efficiency > 0.5);
}

proptest! {
    #[test]
    fn dark_populations_are_normalized(lg in -3.0f64..3.0) {
        let (n_pm, n0) = cpt_populations(1.0, 10f64.powf(lg)).unwrap();
        prop_assert!((2.0 * n_pm + n0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn locked_dark_state_is_stationary(lg in -3.0f64..3.0, delta in -5.0f64..5.0) {
        let r = 10f64.powf(lg);
        let mut p = params(1.0);
        p.small_delta = delta;
        let pulse = PulseSchedule {
            pump: Envelope::Constant { value: 1.0 },
            dump: Envelope::Constant { value: r },
            detuning: DetuningSchedule::Locked { rule: ResonanceRule::Stationary },
        };
        let res = cpt_stationarity_residual(&cpt_state(1.0, r).unwrap(), &p, &pulse, ResonantVariant::Symmetrized, 0.0).unwrap();
        prop_assert!(res < 1e-9, "residual {res} at r = {r}");
    }
}
