//! Mean-field states: mode amplitudes and the reduced pendulum pair.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex amplitudes of the three Zeeman modes plus the molecular mode.
///
/// Normalized so that `n_+ + n_0 + n_- + 2 n_m = 1`; the molecular
/// amplitude stays zero outside the resonant equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorAmplitudes {
    pub a_plus: Complex64,
    pub a_zero: Complex64,
    pub a_minus: Complex64,
    pub a_mol: Complex64,
}

/// Populations and conserved quantities of a [`SpinorAmplitudes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub n_plus: f64,
    pub n_zero: f64,
    pub n_minus: f64,
    pub n_mol: f64,
    pub magnetization: f64,
    /// Atom number with molecules counted twice.
    pub total_n: f64,
}

impl SpinorAmplitudes {
    pub fn new(a_plus: Complex64, a_zero: Complex64, a_minus: Complex64) -> Self {
        Self {
            a_plus,
            a_zero,
            a_minus,
            a_mol: Complex64::new(0.0, 0.0),
        }
    }

    pub fn with_molecule(mut self, a_mol: Complex64) -> Self {
        self.a_mol = a_mol;
        self
    }

    /// Real non-negative amplitudes from populations.
    pub fn from_populations(n_plus: f64, n_zero: f64, n_minus: f64) -> Self {
        Self::from_populations_and_phases([n_plus, n_zero, n_minus], [0.0; 3])
    }

    /// Amplitudes `sqrt(n_i) exp(i phase_i)`.
    pub fn from_populations_and_phases(populations: [f64; 3], phases: [f64; 3]) -> Self {
        let amp = |n: f64, phi: f64| Complex64::from_polar(n.max(0.0).sqrt(), phi);
        Self::new(
            amp(populations[0], phases[0]),
            amp(populations[1], phases[1]),
            amp(populations[2], phases[2]),
        )
    }

    /// All atoms in `m_F = 0`.
    pub fn polar() -> Self {
        Self::from_populations(0.0, 1.0, 0.0)
    }

    pub fn observables(&self) -> Observables {
        state_observables(self)
    }

    /// Relative phase `arg(a_+) + arg(a_-) - 2 arg(a_0)`, wrapped to `(-pi, pi]`.
    pub fn relative_phase(&self) -> f64 {
        wrap_angle(self.a_plus.arg() + self.a_minus.arg() - 2.0 * self.a_zero.arg())
    }

    /// Exchange overlap `a_+ a_- conj(a_0)^2`; its argument is the relative phase.
    pub fn exchange_overlap(&self) -> Complex64 {
        self.a_plus * self.a_minus * self.a_zero.conj() * self.a_zero.conj()
    }

    pub fn is_finite(&self) -> bool {
        [self.a_plus, self.a_zero, self.a_minus, self.a_mol]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Checks finiteness and `|total_N - 1| <= tol`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::invalid("state has non-finite components"));
        }
        let total = self.observables().total_n;
        if (total - 1.0).abs() > tol {
            return Err(Error::invalid(format!(
                "state is not normalized: total N = {total:.15}"
            )));
        }
        Ok(())
    }

    pub(crate) fn to_array(self) -> [f64; 8] {
        [
            self.a_plus.re,
            self.a_plus.im,
            self.a_zero.re,
            self.a_zero.im,
            self.a_minus.re,
            self.a_minus.im,
            self.a_mol.re,
            self.a_mol.im,
        ]
    }

    pub(crate) fn from_slice(y: &[f64]) -> Self {
        let mol = if y.len() >= 8 {
            Complex64::new(y[6], y[7])
        } else {
            Complex64::new(0.0, 0.0)
        };
        Self {
            a_plus: Complex64::new(y[0], y[1]),
            a_zero: Complex64::new(y[2], y[3]),
            a_minus: Complex64::new(y[4], y[5]),
            a_mol: mol,
        }
    }
}

pub fn state_observables(state: &SpinorAmplitudes) -> Observables {
    let n_plus = state.a_plus.norm_sqr();
    let n_zero = state.a_zero.norm_sqr();
    let n_minus = state.a_minus.norm_sqr();
    let n_mol = state.a_mol.norm_sqr();
    Observables {
        n_plus,
        n_zero,
        n_minus,
        n_mol,
        magnetization: n_plus - n_minus,
        total_n: n_plus + n_zero + n_minus + 2.0 * n_mol,
    }
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Canonical pair of the reduced one-degree-of-freedom dynamics at fixed
/// magnetization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumState {
    /// Relative phase, radians. Not wrapped during integration.
    pub theta: f64,
    pub n_zero: f64,
    pub m_mag: f64,
}

impl PendulumState {
    pub fn new(theta: f64, n_zero: f64, m_mag: f64) -> Result<Self> {
        let state = Self {
            theta,
            n_zero,
            m_mag,
        };
        state.check_domain()?;
        Ok(state)
    }

    /// Reduces a normalized three-mode state.
    pub fn from_amplitudes(state: &SpinorAmplitudes) -> Result<Self> {
        let obs = state.observables();
        Self::new(state.relative_phase(), obs.n_zero, obs.magnetization)
    }

    /// `(1 - n0)^2 - m^2`, non-negative inside the domain.
    pub fn radicand(&self) -> f64 {
        let s = 1.0 - self.n_zero;
        s * s - self.m_mag * self.m_mag
    }

    pub fn check_domain(&self) -> Result<()> {
        if !(self.theta.is_finite() && self.n_zero.is_finite() && self.m_mag.is_finite()) {
            return Err(Error::domain("pendulum state has non-finite components"));
        }
        if !(0.0..=1.0).contains(&self.n_zero) {
            return Err(Error::domain(format!(
                "n0 = {} outside [0, 1]",
                self.n_zero
            )));
        }
        if self.n_zero > 1.0 - self.m_mag.abs() {
            return Err(Error::domain(format!(
                "(1 - n0)^2 < m^2 at n0 = {}, m = {}",
                self.n_zero, self.m_mag
            )));
        }
        Ok(())
    }

    /// Amplitudes with `arg(a_0) = 0` and the relative phase split evenly
    /// between the side modes.
    pub fn to_amplitudes(&self) -> SpinorAmplitudes {
        let rest = 1.0 - self.n_zero;
        let n_plus = 0.5 * (rest + self.m_mag);
        let n_minus = 0.5 * (rest - self.m_mag);
        SpinorAmplitudes::from_populations_and_phases(
            [n_plus, self.n_zero, n_minus],
            [0.5 * self.theta, 0.0, 0.5 * self.theta],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polar_state() {
        let o = SpinorAmplitudes::polar().observables();
        assert_eq!(
            (o.n_plus, o.n_zero, o.n_minus, o.n_mol),
            (0.0, 1.0, 0.0, 0.0)
        );
        assert_eq!(o.magnetization, 0.0);
        assert_eq!(o.total_n, 1.0);
    }

    #[test]
    fn fig2_initial_state() {
        let s = SpinorAmplitudes::from_populations(0.05, 0.9, 0.05);
        let o = s.observables();
        assert_relative_eq!(o.n_plus, 0.05, max_relative = 1e-15);
        assert_relative_eq!(o.n_zero, 0.9, max_relative = 1e-15);
        assert_relative_eq!(o.n_minus, 0.05, max_relative = 1e-15);
        assert_eq!(o.magnetization, 0.0);
        assert_relative_eq!(o.total_n, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn molecules_count_twice() {
        let s = SpinorAmplitudes::new(0.0.into(), 0.0.into(), 0.0.into())
            .with_molecule(Complex64::new(0.5f64.sqrt(), 0.0));
        assert_relative_eq!(s.observables().total_n, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn relative_phase_convention() {
        let s = SpinorAmplitudes::from_populations_and_phases([0.1, 0.8, 0.1], [0.3, 0.1, 0.5]);
        assert_relative_eq!(s.relative_phase(), 0.3 + 0.5 - 0.2, epsilon = 1e-14);
        assert_relative_eq!(
            s.exchange_overlap().arg(),
            s.relative_phase(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn pendulum_round_trip() {
        let p = PendulumState::new(0.7, 0.6, 0.1).unwrap();
        let back = PendulumState::from_amplitudes(&p.to_amplitudes()).unwrap();
        assert_relative_eq!(back.theta, 0.7, epsilon = 1e-14);
        assert_relative_eq!(back.n_zero, 0.6, epsilon = 1e-14);
        assert_relative_eq!(back.m_mag, 0.1, epsilon = 1e-14);
    }

    #[test]
    fn pendulum_domain() {
        assert!(PendulumState::new(0.0, 0.6, 0.5).is_err());
        assert!(PendulumState::new(0.0, 1.2, 0.0).is_err());
        assert!(PendulumState::new(0.0, 0.5, 0.5).is_ok());
    }

    #[test]
    fn wrapping() {
        assert_relative_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(-0.5), -0.5);
        assert_relative_eq!(wrap_angle(2.0 * PI + 0.25), 0.25, epsilon = 1e-12);
    }
}
