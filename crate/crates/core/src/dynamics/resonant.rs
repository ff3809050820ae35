use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Flow, Monitor};
use crate::cpt::PulseSchedule;
use crate::error::{Error, Result};
use crate::integrator::OdeSystem;
use crate::params::SystemParams;
use crate::state::SpinorAmplitudes;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which form of the `phi_-` equation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonantVariant {
    /// Mirrors the `phi_+` equation, adding the collisional exchange and
    /// two-photon detuning terms to `phi_-`.
    #[default]
    Symmetrized,
    /// The equations exactly as printed, where `phi_-` lacks both terms.
    PaperLiteral,
}

impl std::str::FromStr for ResonantVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetrized" => Ok(Self::Symmetrized),
            "literal" | "paper-literal" => Ok(Self::PaperLiteral),
            other => Err(Error::invalid(format!(
                "unknown resonant variant {other:?}"
            ))),
        }
    }
}

/// Four-mode mean-field equations with the molecular amplitude kept.
pub fn rhs_resonant(
    state: &SpinorAmplitudes,
    params: &SystemParams,
    pulse: &PulseSchedule,
    variant: ResonantVariant,
    tau: f64,
) -> Result<SpinorAmplitudes> {
    let omega_p = pulse.omega_p(tau);
    let omega_d = pulse.omega_d(tau);
    let theta = pulse.theta(tau, params)?;
    Ok(resonant_terms(
        state, params, omega_p, omega_d, theta, variant,
    ))
}

pub(crate) fn resonant_terms(
    state: &SpinorAmplitudes,
    params: &SystemParams,
    omega_p: f64,
    omega_d: f64,
    theta: f64,
    variant: ResonantVariant,
) -> SpinorAmplitudes {
    let (pp, p0, pm, mol) = (state.a_plus, state.a_zero, state.a_minus, state.a_mol);
    let (np, n0, nm) = (pp.norm_sqr(), p0.norm_sqr(), pm.norm_sqr());
    let c2 = params.c2n;
    let delta = params.small_delta;
    let p0_sq = p0 * p0;

    let d_plus = -I * c2 * (np + n0 - nm) * pp - I * c2 * p0_sq * pm.conj()
        + I * omega_d * mol * pm.conj()
        - I * (theta + delta) * pp;
    let d_zero = -I * c2 * (np + nm) * p0
        - 2.0 * I * c2 * pp * pm * p0.conj()
        - 2.0 * I * omega_p * mol * p0.conj();
    let mut d_minus = -I * c2 * (nm + n0 - np) * pm + I * omega_d * mol * pp.conj();
    if variant == ResonantVariant::Symmetrized {
        d_minus += -I * c2 * p0_sq * pp.conj() - I * (theta + delta) * pm;
    }
    let d_mol = I * omega_d * pp * pm - I * omega_p * p0_sq - (I * delta + params.gamma) * mol;

    SpinorAmplitudes::new(d_plus, d_zero, d_minus).with_molecule(d_mol)
}

#[derive(Debug, Clone)]
pub struct ResonantFlow {
    pub params: SystemParams,
    pub pulse: PulseSchedule,
    pub variant: ResonantVariant,
}

impl ResonantFlow {
    pub fn new(params: SystemParams, pulse: PulseSchedule, variant: ResonantVariant) -> Self {
        Self {
            params,
            pulse,
            variant,
        }
    }
}

impl OdeSystem for ResonantFlow {
    fn dim(&self) -> usize {
        8
    }

    fn derivative(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        let d = rhs_resonant(
            &SpinorAmplitudes::from_slice(y),
            &self.params,
            &self.pulse,
            self.variant,
            t,
        )?;
        dydt.copy_from_slice(&d.to_array());
        Ok(())
    }
}

impl Flow for ResonantFlow {
    type State = SpinorAmplitudes;

    fn pack(&self, state: &SpinorAmplitudes) -> Vec<f64> {
        state.to_array().to_vec()
    }

    fn unpack(&self, y: &[f64]) -> SpinorAmplitudes {
        SpinorAmplitudes::from_slice(y)
    }

    fn monitor(&self, _tau: f64, state: &SpinorAmplitudes) -> Monitor {
        let obs = state.observables();
        Monitor {
            total_n: obs.total_n,
            magnetization: obs.magnetization,
            energy: None,
        }
    }

    fn check_initial(&self, state: &SpinorAmplitudes) -> Result<()> {
        state.check_normalized(1e-12)
    }
}
