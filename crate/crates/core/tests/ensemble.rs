use lcse_core::cpt::{run_transfer, PulseSchedule, TRANSFER_TAU_SPAN};
use lcse_core::dynamics::ResonantVariant;
use lcse_core::params::rb87_c2_ratio;
use lcse_core::stochastic::{run_ensemble, sample_seed, Scenario, SeedSpec};
use lcse_core::{IntegratorConfig, SpinorAmplitudes, SystemParams};

fn scenario(samples: usize) -> Scenario {
    let mut p = SystemParams::collision_only(rb87_c2_ratio(), 0.0);
    p.small_delta = 3.0;
    p.gamma = 1.0;
    Scenario::Transfer {
        params: p,
        pulse: PulseSchedule::fig4(),
        variant: ResonantVariant::Symmetrized,
        tau_span: TRANSFER_TAU_SPAN,
        samples,
    }
}

#[test]
fn ensembles_are_bit_reproducible() {
    let spec = SeedSpec::vacuum(1e4, 42);
    let cfg = IntegratorConfig::default();
    let a = run_ensemble(&spec, &scenario(151), 6, &cfg).unwrap();
    let b = run_ensemble(&spec, &scenario(151), 6, &cfg).unwrap();
    assert_eq!(a, b);
    let other = run_ensemble(&SeedSpec::vacuum(1e4, 43), &scenario(151), 6, &cfg).unwrap();
    assert_ne!(a.records[0].seed_plus, other.records[0].seed_plus);
}

#[test]
fn single_classical_run_matches_a_direct_transfer() {
    let cfg = IntegratorConfig::default();
    let stats = run_ensemble(&SeedSpec::classical(1e-5), &scenario(151), 1, &cfg).unwrap();
    let Scenario::Transfer {
        params,
        pulse,
        variant,
        tau_span,
        samples,
    } = scenario(151)
    else {
        unreachable!()
    };
    let s = SpinorAmplitudes::from_populations(1e-5, 1.0 - 2e-5, 1e-5);
    let direct = run_transfer(&s, &params, &pulse, variant, tau_span, samples, &cfg).unwrap();
    assert_eq!(
        stats.records[0].final_populations,
        direct.result.final_populations
    );
    assert_eq!(stats.std_final_transfer, 0.0);
}

#[test]
fn vacuum_seeds_are_normalized_and_unbiased() {
    let spec = SeedSpec::vacuum(1e4, 7);
    let runs = 4000;
    let ms: Vec<f64> = (0..runs)
        .map(|k| {
            let s = sample_seed(&spec, &mut spec.rng_for_run(k)).unwrap();
            let o = s.observables();
            assert!((o.total_n - 1.0).abs() < 1e-12);
            o.magnetization
        })
        .collect();
    let mean = ms.iter().sum::<f64>() / runs as f64;
    let std = (ms.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (runs - 1) as f64).sqrt();
    assert!(
        mean.abs() < 3.0 * std / (runs as f64).sqrt(),
        "mean {mean}, std {std}"
    );
}
