use super::{Flow, Monitor};
use crate::error::Result;
use crate::integrator::OdeSystem;
use crate::landscape::{energy, gradient, LandscapeParams};
use crate::params::{CouplingSummary, SystemParams};
use crate::state::PendulumState;

/// `(dtheta/dtau, dn0/dtau) = (2 dE/dn0, -2 dE/dtheta)`.
///
/// Errors with a domain error on the boundary `(1 - n0)^2 = m^2` when
/// `m != 0`, where the exchange derivative diverges.
pub fn rhs_pendulum(
    state: &PendulumState,
    params: &SystemParams,
    coupling: &CouplingSummary,
) -> Result<(f64, f64)> {
    state.check_domain()?;
    let lp = LandscapeParams::from_coupling(params, coupling, state.m_mag);
    pendulum_rates(state.theta, state.n_zero, &lp)
}

fn pendulum_rates(theta: f64, n_zero: f64, lp: &LandscapeParams) -> Result<(f64, f64)> {
    let (d_theta, d_n0) = gradient(theta, n_zero, lp)?;
    Ok((2.0 * d_n0, -2.0 * d_theta))
}

/// Reduced flow at fixed magnetization; the state vector is `[theta, n0]`.
#[derive(Debug, Clone, Copy)]
pub struct PendulumFlow {
    pub landscape: LandscapeParams,
}

impl PendulumFlow {
    pub fn new(landscape: LandscapeParams) -> Self {
        Self { landscape }
    }
}

impl OdeSystem for PendulumFlow {
    fn dim(&self) -> usize {
        2
    }

    fn derivative(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        let (a, b) = pendulum_rates(y[0], y[1], &self.landscape)?;
        dydt[0] = a;
        dydt[1] = b;
        Ok(())
    }
}

impl Flow for PendulumFlow {
    type State = PendulumState;

    fn pack(&self, state: &PendulumState) -> Vec<f64> {
        vec![state.theta, state.n_zero]
    }

    fn unpack(&self, y: &[f64]) -> PendulumState {
        PendulumState {
            theta: y[0],
            n_zero: y[1],
            m_mag: self.landscape.m_mag,
        }
    }

    fn monitor(&self, _tau: f64, state: &PendulumState) -> Monitor {
        Monitor {
            total_n: 1.0,
            magnetization: state.m_mag,
            energy: energy(state.theta, state.n_zero, &self.landscape).ok(),
        }
    }

    fn check_initial(&self, state: &PendulumState) -> Result<()> {
        state.check_domain()?;
        if state.m_mag != self.landscape.m_mag {
            return Err(crate::Error::invalid(
                "initial magnetization differs from the flow's fixed m",
            ));
        }
        Ok(())
    }
}
