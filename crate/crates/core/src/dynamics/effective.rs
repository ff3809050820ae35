use num_complex::Complex64;

use super::{Flow, Monitor};
use crate::error::Result;
use crate::integrator::OdeSystem;
use crate::params::{CouplingSummary, SystemParams};
use crate::state::SpinorAmplitudes;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Time derivative of the three Zeeman amplitudes after the molecular
/// level has been eliminated.
///
/// `i da_j/dtau = dH/d(conj a_j)` with
///
/// ```text
/// H = q (n+ + n-) + c2 n0 (n+ + n-) + c2 m^2 / 2
///   + C (a+ a- conj(a0)^2 + c.c.) - (Omega^2/Delta) n0^2 - Delta n+ n-
/// ```
///
/// The spin-independent `c0` mean field and the linear Zeeman shift only
/// rotate global phases and are left out.
pub fn rhs_effective(
    state: &SpinorAmplitudes,
    params: &SystemParams,
    coupling: &CouplingSummary,
) -> SpinorAmplitudes {
    let (ap, a0, am) = (state.a_plus, state.a_zero, state.a_minus);
    let (np, n0, nm) = (ap.norm_sqr(), a0.norm_sqr(), am.norm_sqr());
    let c2 = params.c2n;
    let c = coupling.c_eff;
    let shift_pair = coupling.lightshift_delta;
    let shift_zero = coupling.lightshift_p;

    let a0_sq = a0 * a0;
    let h_plus = (c2 * (np + n0 - nm) + params.q - shift_pair * nm) * ap + c * am.conj() * a0_sq;
    let h_minus = (c2 * (nm + n0 - np) + params.q - shift_pair * np) * am + c * ap.conj() * a0_sq;
    let h_zero = (c2 * (np + nm) - 2.0 * shift_zero * n0) * a0 + 2.0 * c * ap * am * a0.conj();

    SpinorAmplitudes::new(-I * h_plus, -I * h_zero, -I * h_minus)
}

/// The pendulum energy functional evaluated on amplitudes.
///
/// Uses `2 C Re(a+ a- conj(a0)^2)` for the exchange term so the value stays
/// defined when a mode is empty. Exactly conserved by [`rhs_effective`].
pub fn effective_energy(
    state: &SpinorAmplitudes,
    params: &SystemParams,
    coupling: &CouplingSummary,
) -> f64 {
    let obs = state.observables();
    let (np, n0, nm) = (obs.n_plus, obs.n_zero, obs.n_minus);
    let m = obs.magnetization;
    let shift_pair = coupling.lightshift_delta;
    let hamiltonian = params.q * (np + nm)
        + params.c2n * n0 * (np + nm)
        + 0.5 * params.c2n * m * m
        + 2.0 * coupling.c_eff * state.exchange_overlap().re
        - coupling.lightshift_p * n0 * n0
        - shift_pair * np * nm;
    // drop the conserved offsets so that the value matches the (theta, n0) form at N = 1
    hamiltonian - 0.5 * params.c2n * m * m + 0.25 * shift_pair * (1.0 - m * m)
}

/// Off-resonant amplitude family.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveFlow {
    pub params: SystemParams,
    pub coupling: CouplingSummary,
}

impl EffectiveFlow {
    pub fn new(params: SystemParams, coupling: CouplingSummary) -> Self {
        Self { params, coupling }
    }
}

impl OdeSystem for EffectiveFlow {
    fn dim(&self) -> usize {
        6
    }

    fn derivative(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        let d = rhs_effective(
            &SpinorAmplitudes::from_slice(y),
            &self.params,
            &self.coupling,
        );
        dydt.copy_from_slice(&d.to_array()[..6]);
        Ok(())
    }
}

impl Flow for EffectiveFlow {
    type State = SpinorAmplitudes;

    fn pack(&self, state: &SpinorAmplitudes) -> Vec<f64> {
        state.to_array()[..6].to_vec()
    }

    fn unpack(&self, y: &[f64]) -> SpinorAmplitudes {
        SpinorAmplitudes::from_slice(y)
    }

    fn monitor(&self, _tau: f64, state: &SpinorAmplitudes) -> Monitor {
        let obs = state.observables();
        Monitor {
            total_n: obs.total_n,
            magnetization: obs.magnetization,
            energy: Some(effective_energy(state, &self.params, &self.coupling)),
        }
    }

    fn check_initial(&self, state: &SpinorAmplitudes) -> Result<()> {
        state.check_normalized(1e-12)?;
        if state.a_mol.norm_sqr() != 0.0 {
            return Err(crate::Error::invalid(
                "the off-resonant family has no molecular mode",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate;
    use crate::integrator::{linspace, IntegratorConfig};
    use crate::params::{effective_coupling, rb87_c2_ratio, LaserGeometry};

    fn fig2(k: f64) -> (SystemParams, CouplingSummary) {
        let c2 = rb87_c2_ratio();
        let p = SystemParams::from_target_coupling(c2, 0.01, k * c2, LaserGeometry::default());
        let c = effective_coupling(&p).unwrap();
        (p, c)
    }

    fn population_rates(s: &SpinorAmplitudes, d: &SpinorAmplitudes) -> [f64; 3] {
        [
            2.0 * (s.a_plus.conj() * d.a_plus).re,
            2.0 * (s.a_zero.conj() * d.a_zero).re,
            2.0 * (s.a_minus.conj() * d.a_minus).re,
        ]
    }

    #[test]
    fn polar_state_has_no_instantaneous_pair_flow() {
        let (p, c) = fig2(-1.0);
        let s = SpinorAmplitudes::polar();
        let rates = population_rates(&s, &rhs_effective(&s, &p, &c));
        assert_eq!(rates, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn analytic_conservation_of_number_and_magnetization() {
        let (p, c) = fig2(-0.5);
        let s = SpinorAmplitudes::from_populations_and_phases([0.2, 0.5, 0.3], [0.4, -1.1, 2.0]);
        let r = population_rates(&s, &rhs_effective(&s, &p, &c));
        assert!((r[0] + r[1] + r[2]).abs() < 1e-18);
        assert!((r[0] - r[2]).abs() < 1e-18);
        assert!(r[1].abs() > 1e-6);
    }

    #[test]
    fn energy_rate_vanishes() {
        let (p, c) = fig2(-1.0);
        let s = SpinorAmplitudes::from_populations_and_phases([0.2, 0.5, 0.3], [0.4, -1.1, 2.0]);
        let d = rhs_effective(&s, &p, &c);
        let h = 1e-6;
        let shift = |sign: f64| SpinorAmplitudes {
            a_plus: s.a_plus + sign * h * d.a_plus,
            a_zero: s.a_zero + sign * h * d.a_zero,
            a_minus: s.a_minus + sign * h * d.a_minus,
            a_mol: s.a_mol,
        };
        let rate = (effective_energy(&shift(1.0), &p, &c) - effective_energy(&shift(-1.0), &p, &c))
            / (2.0 * h);
        assert!(rate.abs() < 1e-12, "dE/dtau = {rate}");
    }

    #[test]
    fn frozen_coupling_keeps_populations() {
        let p = SystemParams::collision_only(0.0, 0.0);
        let c = CouplingSummary {
            omega_eff: 0.0,
            c_eff: 0.0,
            lightshift_delta: 0.0,
            lightshift_p: 0.0,
            off_resonant_valid: true,
        };
        let s = SpinorAmplitudes::from_populations(0.05, 0.9, 0.05);
        let traj = integrate(
            &EffectiveFlow::new(p, c),
            &s,
            0.0,
            &linspace(0.0, 50.0, 51),
            &IntegratorConfig::default(),
        )
        .unwrap();
        for st in &traj.states {
            assert_eq!(st, &s);
        }
    }

    #[test]
    fn collision_regime_stays_above_initial() {
        let (p, c) = fig2(1.0);
        let s = SpinorAmplitudes::from_populations(0.05, 0.9, 0.05);
        let traj = integrate(
            &EffectiveFlow::new(p, c),
            &s,
            0.0,
            &linspace(0.0, 50.0, 501),
            &IntegratorConfig::default(),
        )
        .unwrap();
        let min_n0 = traj
            .states
            .iter()
            .map(|s| s.a_zero.norm_sqr())
            .fold(f64::INFINITY, f64::min);
        assert!(min_n0 >= 0.9 - 1e-12, "min n0 = {min_n0}");
        assert!(traj.max_energy_drift() < 1e-9);
    }

    #[test]
    fn energy_matches_pendulum_form() {
        let (p, c) = fig2(-1.0);
        let s = SpinorAmplitudes::from_populations_and_phases([0.2, 0.5, 0.3], [0.4, -1.1, 2.0]);
        let lp = crate::landscape::LandscapeParams::from_coupling(&p, &c, -0.1);
        let e = crate::landscape::energy(s.relative_phase(), 0.5, &lp).unwrap();
        assert!((effective_energy(&s, &p, &c) - e).abs() < 1e-15);
    }
}
