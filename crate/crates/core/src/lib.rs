//! Mean-field simulation of laser-catalyzed spin exchange in a spin-1
//! condensate within the single-mode approximation.
//!
//! * [`params`]: scattering-length inputs, scaled parameters, adiabatic
//!   elimination of the molecular level and regime classification.
//! * [`dynamics`]: the off-resonant amplitude flow, the reduced pendulum
//!   flow and the resonant four-mode equations, with conservation monitors.
//! * [`landscape`]: the energy functional over `(theta, n0)`, its fixed
//!   points and open/closed orbit classification.
//! * [`cpt`]: dark-state populations, resonance locking, sech pulses and
//!   transfer runs.
//! * [`stochastic`]: vacuum-noise seeding and ensemble statistics.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cpt;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod landscape;
pub mod params;
pub mod state;
pub mod stochastic;

pub use error::{Error, Result};
pub use integrator::IntegratorConfig;
pub use params::{CouplingSummary, Regime, ScatteringInputs, SystemParams};
pub use state::{Observables, PendulumState, SpinorAmplitudes};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
