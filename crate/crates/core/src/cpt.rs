//! Coherent population trapping in the resonant regime: dark-state
//! populations, the two-photon resonance schedule, pulse envelopes and
//! transfer runs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, ResonantFlow, ResonantVariant, Trajectory};
use crate::error::{Error, Result};
use crate::integrator::{linspace, IntegratorConfig};
use crate::params::SystemParams;
use crate::state::SpinorAmplitudes;

/// Window used for sech transfer runs: from the dump peak to well past the
/// end of the pulse.
pub const TRANSFER_TAU_SPAN: [f64; 2] = [0.0, 150.0];

/// `(n_pm, n_0)` of the dark state for `r = omega_d / omega_p`.
pub fn cpt_populations(omega_p: f64, omega_d: f64) -> Result<(f64, f64)> {
    if !(omega_p > 0.0) || !omega_p.is_finite() {
        return Err(Error::invalid(format!(
            "CPT populations need omega_p > 0, got {omega_p}"
        )));
    }
    if !(omega_d >= 0.0) || !omega_d.is_finite() {
        return Err(Error::invalid(format!(
            "CPT populations need omega_d >= 0, got {omega_d}"
        )));
    }
    let r = omega_d / omega_p;
    Ok((1.0 / (2.0 + r), r / (2.0 + r)))
}

/// The two-photon resonance condition as printed:
/// `Theta = -delta + c2 [2 (n+ + n-) + 2 sqrt(n+ n0) - 4 n0]`.
pub fn resonance_detuning(omega_p: f64, omega_d: f64, small_delta: f64, c2n: f64) -> Result<f64> {
    let (n_pm, n_zero) = cpt_populations(omega_p, omega_d)?;
    Ok(-small_delta + c2n * (4.0 * n_pm + 2.0 * (n_pm * n_zero).sqrt() - 4.0 * n_zero))
}

/// The detuning that makes the dark state stationary in the symmetrized
/// equations: `Theta = -delta + c2 (4 n_pm - 2 n0)`.
///
/// Agrees with [`resonance_detuning`] at `r = 1` and in both limits of `r`.
pub fn stationary_resonance_detuning(
    omega_p: f64,
    omega_d: f64,
    small_delta: f64,
    c2n: f64,
) -> Result<f64> {
    let (n_pm, n_zero) = cpt_populations(omega_p, omega_d)?;
    Ok(-small_delta + c2n * (4.0 * n_pm - 2.0 * n_zero))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonanceRule {
    #[default]
    Stationary,
    PaperLiteral,
}

impl ResonanceRule {
    pub fn detuning(self, omega_p: f64, omega_d: f64, small_delta: f64, c2n: f64) -> Result<f64> {
        match self {
            Self::Stationary => stationary_resonance_detuning(omega_p, omega_d, small_delta, c2n),
            Self::PaperLiteral => resonance_detuning(omega_p, omega_d, small_delta, c2n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Envelope {
    Constant {
        value: f64,
    },
    /// `amplitude * sech(tau / t0)`.
    Sech {
        amplitude: f64,
        t0: f64,
    },
}

impl Envelope {
    pub fn value(&self, tau: f64) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Sech { amplitude, t0 } => amplitude / (tau / t0).cosh(),
        }
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        match *self {
            Self::Constant { .. } => 0.0,
            Self::Sech { amplitude, t0 } => {
                let x = tau / t0;
                -amplitude / t0 * x.tanh() / x.cosh()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant { value } if !value.is_finite() => {
                Err(Error::invalid("envelope value must be finite"))
            }
            Self::Sech { amplitude, t0 }
                if !amplitude.is_finite() || !(t0 > 0.0 && t0.is_finite()) =>
            {
                Err(Error::invalid(format!(
                    "sech pulse needs a finite amplitude and t0 > 0, got t0 = {t0}"
                )))
            }
            _ => Ok(()),
        }
    }
}

pub fn sech_pulse(amplitude: f64, t0: f64) -> Result<Envelope> {
    let e = Envelope::Sech { amplitude, t0 };
    e.validate()?;
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DetuningSchedule {
    Fixed {
        theta: f64,
    },
    /// Recomputed from the instantaneous Rabi frequencies at every step.
    Locked {
        rule: ResonanceRule,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub pump: Envelope,
    pub dump: Envelope,
    pub detuning: DetuningSchedule,
}

impl PulseSchedule {
    /// Constant pump 1, dump `40 sech(tau / 20)`, locked detuning.
    pub fn fig4() -> Self {
        Self {
            pump: Envelope::Constant { value: 1.0 },
            dump: Envelope::Sech {
                amplitude: 40.0,
                t0: 20.0,
            },
            detuning: DetuningSchedule::Locked {
                rule: ResonanceRule::Stationary,
            },
        }
    }

    pub fn omega_p(&self, tau: f64) -> f64 {
        self.pump.value(tau)
    }

    pub fn omega_d(&self, tau: f64) -> f64 {
        self.dump.value(tau)
    }

    pub fn theta(&self, tau: f64, params: &SystemParams) -> Result<f64> {
        match self.detuning {
            DetuningSchedule::Fixed { theta } => Ok(theta),
            DetuningSchedule::Locked { rule } => rule.detuning(
                self.omega_p(tau),
                self.omega_d(tau),
                params.small_delta,
                params.c2n,
            ),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pump.validate()?;
        self.dump.validate()?;
        if let DetuningSchedule::Fixed { theta } = self.detuning {
            if !theta.is_finite() {
                return Err(Error::invalid("fixed detuning must be finite"));
            }
        }
        Ok(())
    }

    /// Checks the pump stays positive on the sampled window.
    pub fn check_window(&self, grid: &[f64]) -> Result<()> {
        for &t in grid {
            if !(self.omega_p(t) > 0.0) {
                return Err(Error::invalid(format!(
                    "pump Rabi frequency must stay positive, got {} at tau = {t}",
                    self.omega_p(t)
                )));
            }
            if self.omega_d(t) < 0.0 {
                return Err(Error::invalid(format!(
                    "dump Rabi frequency must be non-negative at tau = {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Dark state with real positive amplitudes, so `omega_d a+ a- = omega_p a0^2`.
pub fn cpt_state(omega_p: f64, omega_d: f64) -> Result<SpinorAmplitudes> {
    let (n_pm, n_zero) = cpt_populations(omega_p, omega_d)?;
    Ok(SpinorAmplitudes::from_populations(n_pm, n_zero, n_pm))
}

/// Size of the resonant right-hand side at `state` once the two phase
/// symmetries are factored out.
///
/// A state is stationary up to symmetry when every population rate and the
/// molecular derivative vanish and the mode frequencies `mu_j` (from
/// `d phi_j = -i mu_j phi_j`) satisfy `mu+ + mu- = 2 mu0`. Returns the
/// largest violation among these.
pub fn cpt_stationarity_residual(
    state: &SpinorAmplitudes,
    params: &SystemParams,
    pulse: &PulseSchedule,
    variant: ResonantVariant,
    tau: f64,
) -> Result<f64> {
    let d = crate::dynamics::rhs_resonant(state, params, pulse, variant, tau)?;
    let freq = |a: Complex64, da: Complex64| -> Complex64 {
        if a.norm_sqr() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0) * da / a
        }
    };
    let mu = [
        freq(state.a_plus, d.a_plus),
        freq(state.a_zero, d.a_zero),
        freq(state.a_minus, d.a_minus),
    ];
    let pop_rates = [
        2.0 * (state.a_plus.conj() * d.a_plus).re,
        2.0 * (state.a_zero.conj() * d.a_zero).re,
        2.0 * (state.a_minus.conj() * d.a_minus).re,
        2.0 * (state.a_mol.conj() * d.a_mol).re,
    ];
    let phase_mismatch = (mu[0].re + mu[2].re - 2.0 * mu[1].re).abs();
    let worst_rate = pop_rates.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let mol = if state.a_mol.norm_sqr() == 0.0 {
        d.a_mol.norm()
    } else {
        0.0
    };
    Ok(phase_mismatch.max(worst_rate).max(mol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    /// `(n+, n0, n-, n_m)` at the end of the run.
    pub final_populations: [f64; 4],
    /// `n+ + n-` at the end, against an ideal of 1.
    pub efficiency: f64,
    pub peak_molecular: f64,
    /// Largest sup-norm distance of `(n+, n0, n-)` from the instantaneous
    /// dark-state populations.
    pub cpt_deviation: f64,
    /// Largest `|n+ - n-|`.
    pub max_side_asymmetry: f64,
}

/// Samples of a transfer run.
#[derive(Debug, Clone)]
pub struct TransferRun {
    pub result: TransferResult,
    pub trajectory: Trajectory<SpinorAmplitudes>,
    /// Detuning and dump Rabi frequency at each sample.
    pub theta: Vec<f64>,
    pub omega_d: Vec<f64>,
    /// Instantaneous `(n_pm, n0)` of the dark state.
    pub cpt_reference: Vec<(f64, f64)>,
}

impl TransferRun {
    /// `tau, n_plus, n_zero, n_minus, n_mol, theta, omega_d, n_pm_cpt,
    /// n_zero_cpt` rows; the last two are the instantaneous dark-state
    /// populations.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("tau,n_plus,n_zero,n_minus,n_mol,theta,omega_d,n_pm_cpt,n_zero_cpt\n");
        for (k, (t, s)) in self
            .trajectory
            .times
            .iter()
            .zip(&self.trajectory.states)
            .enumerate()
        {
            let o = s.observables();
            let (n_pm, n_zero) = self.cpt_reference[k];
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                t,
                o.n_plus,
                o.n_zero,
                o.n_minus,
                o.n_mol,
                self.theta[k],
                self.omega_d[k],
                n_pm,
                n_zero
            ));
        }
        out
    }
}

pub fn run_transfer(
    initial: &SpinorAmplitudes,
    params: &SystemParams,
    pulse: &PulseSchedule,
    variant: ResonantVariant,
    tau_span: [f64; 2],
    samples: usize,
    config: &IntegratorConfig,
) -> Result<TransferRun> {
    params.validate()?;
    pulse.validate()?;
    if samples < 2 || !(tau_span[1] > tau_span[0]) {
        return Err(Error::invalid(
            "transfer needs an increasing span and at least two samples",
        ));
    }
    let grid = linspace(tau_span[0], tau_span[1], samples);
    pulse.check_window(&grid)?;
    let flow = ResonantFlow::new(*params, *pulse, variant);
    let trajectory = integrate(&flow, initial, tau_span[0], &grid, config)?;

    let mut peak_molecular: f64 = 0.0;
    let mut cpt_deviation: f64 = 0.0;
    let mut max_side_asymmetry: f64 = 0.0;
    let mut theta = Vec::with_capacity(trajectory.len());
    let mut omega_d = Vec::with_capacity(trajectory.len());
    let mut cpt_reference = Vec::with_capacity(trajectory.len());
    for (&t, s) in trajectory.times.iter().zip(&trajectory.states) {
        let o = s.observables();
        let (n_pm, n_zero) = cpt_populations(pulse.omega_p(t), pulse.omega_d(t))?;
        peak_molecular = peak_molecular.max(o.n_mol);
        max_side_asymmetry = max_side_asymmetry.max((o.n_plus - o.n_minus).abs());
        cpt_deviation = cpt_deviation
            .max((o.n_plus - n_pm).abs())
            .max((o.n_zero - n_zero).abs())
            .max((o.n_minus - n_pm).abs());
        theta.push(pulse.theta(t, params)?);
        omega_d.push(pulse.omega_d(t));
        cpt_reference.push((n_pm, n_zero));
    }
    let last = trajectory
        .last_state()
        .ok_or_else(|| Error::domain("transfer produced no samples"))?
        .observables();
    let result = TransferResult {
        final_populations: [last.n_plus, last.n_zero, last.n_minus, last.n_mol],
        efficiency: last.n_plus + last.n_minus,
        peak_molecular,
        cpt_deviation,
        max_side_asymmetry,
    };
    Ok(TransferRun {
        result,
        trajectory,
        theta,
        omega_d,
        cpt_reference,
    })
}

/// `max |d n_cpt / dtau| / sqrt(omega_p^2 + omega_d^2)` over `grid`, where
/// `|d n_cpt / dtau| = sqrt(6) |dr/dtau| / (2 + r)^2`.
pub fn adiabaticity_diagnostic(pulse: &PulseSchedule, grid: &[f64]) -> Result<f64> {
    pulse.check_window(grid)?;
    let mut worst: f64 = 0.0;
    for &t in grid {
        let (p, d) = (pulse.omega_p(t), pulse.omega_d(t));
        let (dp, dd) = (pulse.pump.derivative(t), pulse.dump.derivative(t));
        let r = d / p;
        let r_dot = (dd * p - d * dp) / (p * p);
        let rate = 6f64.sqrt() * r_dot.abs() / ((2.0 + r) * (2.0 + r));
        worst = worst.max(rate / p.hypot(d));
    }
    Ok(worst)
}

pub fn is_adiabatic(diagnostic: f64) -> bool {
    diagnostic < 1.0
}
