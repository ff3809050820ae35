//! Right-hand sides of the three mean-field families and a common driver
//! that samples trajectories and tracks conserved quantities.

mod crossval;
mod effective;
mod pendulum;
mod resonant;

pub use crossval::{crossvalidate_amplitude_vs_pendulum, CrossValidation};
pub use effective::{effective_energy, rhs_effective, EffectiveFlow};
pub use pendulum::{rhs_pendulum, PendulumFlow};
pub use resonant::{rhs_resonant, ResonantFlow, ResonantVariant};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::integrator::{integrate_on_grid, IntegratorConfig, OdeSystem, Outcome, Solver};

/// Conserved-quantity readings for one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    pub total_n: f64,
    pub magnetization: f64,
    /// Energy functional, where the family has one.
    pub energy: Option<f64>,
}

/// An ODE family with a typed state.
pub trait Flow: OdeSystem {
    type State: Clone;

    fn pack(&self, state: &Self::State) -> Vec<f64>;
    fn unpack(&self, y: &[f64]) -> Self::State;
    fn monitor(&self, tau: f64, state: &Self::State) -> Monitor;
    /// Rejects initial states outside the family's domain.
    fn check_initial(&self, state: &Self::State) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    /// The state reached the edge of the family's domain; sampling stops
    /// at the last grid point before `tau`.
    Boundary {
        tau: f64,
        message: String,
    },
}

#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub monitors: Vec<Monitor>,
    pub termination: Termination,
    pub accepted_steps: usize,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&S> {
        self.states.last()
    }

    /// Largest `|N(tau) - N(tau_0)|`.
    pub fn max_norm_drift(&self) -> f64 {
        self.max_drift(|m| Some(m.total_n))
    }

    /// Largest `|m(tau) - m(tau_0)|`.
    pub fn max_magnetization_drift(&self) -> f64 {
        self.max_drift(|m| Some(m.magnetization))
    }

    /// Largest energy deviation from the first sample; zero if the family
    /// has no energy.
    pub fn max_energy_drift(&self) -> f64 {
        self.max_drift(|m| m.energy)
    }

    fn max_drift(&self, pick: impl Fn(&Monitor) -> Option<f64>) -> f64 {
        let Some(first) = self.monitors.first().and_then(&pick) else {
            return 0.0;
        };
        self.monitors
            .iter()
            .filter_map(&pick)
            .map(|v| (v - first).abs())
            .fold(0.0, f64::max)
    }
}

/// Integrates `flow` from `initial` at `tau0` and samples it on `grid`.
pub fn integrate<F: Flow>(
    flow: &F,
    initial: &F::State,
    tau0: f64,
    grid: &[f64],
    config: &IntegratorConfig,
) -> Result<Trajectory<F::State>> {
    flow.check_initial(initial)?;
    let solver = Solver::new(*config)?;
    let y0 = flow.pack(initial);
    let run = integrate_on_grid(&solver, flow, tau0, &y0, grid)?;
    let termination = match run.summary.outcome {
        Outcome::DomainExit { message } => Termination::Boundary {
            tau: run.summary.t_final,
            message,
        },
        _ => Termination::Completed,
    };
    let states: Vec<F::State> = run.states.iter().map(|y| flow.unpack(y)).collect();
    let monitors = run
        .times
        .iter()
        .zip(&states)
        .map(|(&t, s)| flow.monitor(t, s))
        .collect();
    Ok(Trajectory {
        times: run.times,
        states,
        monitors,
        termination,
        accepted_steps: run.summary.accepted_steps,
    })
}
