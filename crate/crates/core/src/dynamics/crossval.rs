use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{integrate, EffectiveFlow, PendulumFlow};
use crate::error::{Error, Result};
use crate::integrator::{linspace, IntegratorConfig};
use crate::landscape::LandscapeParams;
use crate::params::{CouplingSummary, SystemParams};
use crate::state::{wrap_angle, PendulumState, SpinorAmplitudes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub max_dev_n_zero: f64,
    /// Compared modulo `2 pi`.
    pub max_dev_theta: f64,
}

/// Integrates the same initial condition with the amplitude flow and the
/// reduced pendulum flow and compares them on `samples` evenly spaced points.
pub fn crossvalidate_amplitude_vs_pendulum(
    initial: &SpinorAmplitudes,
    params: &SystemParams,
    coupling: &CouplingSummary,
    tau_span: [f64; 2],
    samples: usize,
    config: &IntegratorConfig,
) -> Result<CrossValidation> {
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let reduced = PendulumState::from_amplitudes(initial)?;
    if reduced.radicand() <= 0.0 {
        return Err(Error::domain("initial state lies on the pendulum boundary"));
    }
    let grid = linspace(tau_span[0], tau_span[1], samples);
    let amp = integrate(
        &EffectiveFlow::new(*params, *coupling),
        initial,
        tau_span[0],
        &grid,
        config,
    )?;
    let lp = LandscapeParams::from_coupling(params, coupling, reduced.m_mag);
    let pend = integrate(&PendulumFlow::new(lp), &reduced, tau_span[0], &grid, config)?;
    if pend.len() != amp.len() {
        return Err(Error::domain(
            "pendulum integration stopped at the domain boundary",
        ));
    }

    let mut out = CrossValidation {
        max_dev_n_zero: 0.0,
        max_dev_theta: 0.0,
    };
    let mut unwrapped = reduced.theta;
    let mut last = reduced.theta;
    for (a, p) in amp.states.iter().zip(&pend.states) {
        let raw = a.relative_phase();
        let mut step = raw - last;
        step -= TAU * (step / TAU).round();
        unwrapped += step;
        last = raw;
        out.max_dev_n_zero = out
            .max_dev_n_zero
            .max((a.a_zero.norm_sqr() - p.n_zero).abs());
        out.max_dev_theta = out.max_dev_theta.max(wrap_angle(unwrapped - p.theta).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{effective_coupling, rb87_c2_ratio, LaserGeometry};

    fn check(k: f64) -> CrossValidation {
        let c2 = rb87_c2_ratio();
        let p = SystemParams::from_target_coupling(c2, 0.01, k * c2, LaserGeometry::default());
        let c = effective_coupling(&p).unwrap();
        let s = SpinorAmplitudes::from_populations(0.05, 0.9, 0.05);
        crossvalidate_amplitude_vs_pendulum(
            &s,
            &p,
            &c,
            [0.0, 50.0],
            501,
            &IntegratorConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn flows_agree_in_each_regime() {
        for k in [1.0, 0.0, -1.0] {
            let cv = check(k);
            assert!(
                cv.max_dev_n_zero < 1e-6 && cv.max_dev_theta < 1e-6,
                "k = {k}: {cv:?}"
            );
        }
    }
}
