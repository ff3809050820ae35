//! Seeding of the side modes, either with a fixed classical population or
//! with Gaussian vacuum noise, and ensemble statistics over many runs.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cpt::{run_transfer, PulseSchedule};
use crate::dynamics::{integrate, EffectiveFlow, ResonantVariant, Trajectory};
use crate::error::{Error, Result};
use crate::integrator::{linspace, IntegratorConfig};
use crate::params::{CouplingSummary, SystemParams};
use crate::state::SpinorAmplitudes;

/// `n+ + n-` threshold that marks the onset of transfer.
pub const ONSET_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SeedMode {
    FixedClassical {
        classical_n: f64,
    },
    /// Half a quantum per mode: `<|zeta|^2> = 1 / (2 N)`.
    VacuumSampled {
        atom_number: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    #[serde(flatten)]
    pub mode: SeedMode,
    pub rng_seed: u64,
}

impl SeedSpec {
    pub fn classical(classical_n: f64) -> Self {
        Self {
            mode: SeedMode::FixedClassical { classical_n },
            rng_seed: 0,
        }
    }

    pub fn vacuum(atom_number: f64, rng_seed: u64) -> Self {
        Self {
            mode: SeedMode::VacuumSampled { atom_number },
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            SeedMode::FixedClassical { classical_n } if !(0.0..=0.1).contains(&classical_n) => {
                Err(Error::invalid(format!(
                    "classical seed must lie in [0, 0.1], got {classical_n}"
                )))
            }
            SeedMode::VacuumSampled { atom_number } if !(atom_number >= 10.0) => {
                Err(Error::invalid(format!(
                    "atom number must be at least 10, got {atom_number}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Generator for run `k`: the base seed selects the key, `k` the stream.
    pub fn rng_for_run(&self, k: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(k);
        rng
    }
}

/// Draws one initial state with `a0` real and positive.
pub fn sample_seed(spec: &SeedSpec, rng: &mut ChaCha8Rng) -> Result<SpinorAmplitudes> {
    spec.validate()?;
    let (plus, minus) = match spec.mode {
        SeedMode::FixedClassical { classical_n } => {
            return Ok(SpinorAmplitudes::from_populations(
                classical_n,
                1.0 - 2.0 * classical_n,
                classical_n,
            ));
        }
        SeedMode::VacuumSampled { atom_number } => {
            let sigma = (0.25 / atom_number).sqrt();
            let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
            let mut draw = || Complex64::new(normal.sample(rng), normal.sample(rng));
            let plus = draw();
            (plus, draw())
        }
    };
    let rest = 1.0 - plus.norm_sqr() - minus.norm_sqr();
    if rest < 0.0 {
        return Err(Error::domain("sampled seed exceeds the total population"));
    }
    Ok(SpinorAmplitudes::new(
        plus,
        Complex64::new(rest.sqrt(), 0.0),
        minus,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Transfer {
        params: SystemParams,
        pulse: PulseSchedule,
        variant: ResonantVariant,
        tau_span: [f64; 2],
        samples: usize,
    },
    Effective {
        params: SystemParams,
        coupling: CouplingSummary,
        tau_span: [f64; 2],
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: u64,
    pub seed_plus: [f64; 2],
    pub seed_minus: [f64; 2],
    pub initial_magnetization: f64,
    /// `(n+, n0, n-, n_m)`.
    pub final_populations: [f64; 4],
    pub final_transfer: f64,
    pub tau_onset: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub runs: usize,
    pub mean_final_transfer: f64,
    pub std_final_transfer: f64,
    /// Over the runs that reached the onset threshold.
    pub onset_count: usize,
    pub mean_onset: Option<f64>,
    pub std_onset: Option<f64>,
    pub mean_initial_magnetization: f64,
    pub std_initial_magnetization: f64,
    pub records: Vec<RunRecord>,
}

impl EnsembleStats {
    /// `run, seed_plus_re, seed_plus_im, seed_minus_re, seed_minus_im,
    /// n_plus, n_zero, n_minus, n_mol, tau_onset` rows; a missing onset is
    /// written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "run,seed_plus_re,seed_plus_im,seed_minus_re,seed_minus_im,n_plus,n_zero,n_minus,n_mol,tau_onset\n",
        );
        for r in &self.records {
            let p = r.final_populations;
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.run,
                r.seed_plus[0],
                r.seed_plus[1],
                r.seed_minus[0],
                r.seed_minus[1],
                p[0],
                p[1],
                p[2],
                p[3],
                r.tau_onset.unwrap_or(f64::NAN)
            ));
        }
        out
    }
}

/// First time `n+ + n-` exceeds [`ONSET_THRESHOLD`], linearly interpolated
/// between samples.
pub fn transfer_onset(trajectory: &Trajectory<SpinorAmplitudes>) -> Option<f64> {
    let side = |s: &SpinorAmplitudes| s.a_plus.norm_sqr() + s.a_minus.norm_sqr();
    let mut prev: Option<(f64, f64)> = None;
    for (&t, s) in trajectory.times.iter().zip(&trajectory.states) {
        let v = side(s);
        if v > ONSET_THRESHOLD {
            return Some(match prev {
                Some((t0, v0)) => t0 + (ONSET_THRESHOLD - v0) / (v - v0) * (t - t0),
                None => t,
            });
        }
        prev = Some((t, v));
    }
    None
}

fn run_one(
    spec: &SeedSpec,
    scenario: &Scenario,
    config: &IntegratorConfig,
    k: u64,
) -> Result<RunRecord> {
    let mut rng = spec.rng_for_run(k);
    let initial = sample_seed(spec, &mut rng)?;
    let trajectory = match scenario {
        Scenario::Transfer {
            params,
            pulse,
            variant,
            tau_span,
            samples,
        } => {
            run_transfer(
                &initial, params, pulse, *variant, *tau_span, *samples, config,
            )?
            .trajectory
        }
        Scenario::Effective {
            params,
            coupling,
            tau_span,
            samples,
        } => {
            let grid = linspace(tau_span[0], tau_span[1], *samples);
            integrate(
                &EffectiveFlow::new(*params, *coupling),
                &initial,
                tau_span[0],
                &grid,
                config,
            )?
        }
    };
    let last = trajectory
        .last_state()
        .ok_or_else(|| Error::domain("ensemble run produced no samples"))?
        .observables();
    Ok(RunRecord {
        run: k,
        seed_plus: [initial.a_plus.re, initial.a_plus.im],
        seed_minus: [initial.a_minus.re, initial.a_minus.im],
        initial_magnetization: initial.observables().magnetization,
        final_populations: [last.n_plus, last.n_zero, last.n_minus, last.n_mol],
        final_transfer: last.n_plus + last.n_minus,
        tau_onset: transfer_onset(&trajectory),
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs are independent and seeded per index, so the result does not
/// depend on scheduling.
pub fn run_ensemble(
    spec: &SeedSpec,
    scenario: &Scenario,
    runs: usize,
    config: &IntegratorConfig,
) -> Result<EnsembleStats> {
    spec.validate()?;
    if runs == 0 {
        return Err(Error::invalid("an ensemble needs at least one run"));
    }
    let records = (0..runs as u64)
        .into_par_iter()
        .map(|k| run_one(spec, scenario, config, k))
        .collect::<Result<Vec<_>>>()?;

    let transfer: Vec<f64> = records.iter().map(|r| r.final_transfer).collect();
    let onsets: Vec<f64> = records.iter().filter_map(|r| r.tau_onset).collect();
    let mags: Vec<f64> = records.iter().map(|r| r.initial_magnetization).collect();
    let (mean_final_transfer, std_final_transfer) = mean_std(&transfer);
    let (mean_initial_magnetization, std_initial_magnetization) = mean_std(&mags);
    let onset = (!onsets.is_empty()).then(|| mean_std(&onsets));
    Ok(EnsembleStats {
        runs,
        mean_final_transfer,
        std_final_transfer,
        onset_count: onsets.len(),
        mean_onset: onset.map(|o| o.0),
        std_onset: onset.map(|o| o.1),
        mean_initial_magnetization,
        std_initial_magnetization,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::rb87_c2_ratio;

    #[test]
    fn classical_seed_amplitudes() {
        let s = sample_seed(
            &SeedSpec::classical(1e-5),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(s.a_plus, Complex64::new(1e-5f64.sqrt(), 0.0));
        assert_eq!(s.a_minus, s.a_plus);
        assert!((s.a_zero.re - (1.0 - 2e-5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn vacuum_seed_moment() {
        let spec = SeedSpec::vacuum(1e4, 42);
        let mut rng = spec.rng_for_run(0);
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| sample_seed(&spec, &mut rng).unwrap().a_plus.norm_sqr())
            .collect();
        let (mean, std) = mean_std(&samples);
        assert!(
            (mean - 5e-5).abs() < 3.0 * std / (n as f64).sqrt(),
            "mean {mean}"
        );
    }

    #[test]
    fn seeds_vanish_for_large_atom_number() {
        let spec = SeedSpec::vacuum(1e30, 1);
        let s = sample_seed(&spec, &mut spec.rng_for_run(0)).unwrap();
        assert!(s.a_plus.norm_sqr() < 1e-28 && s.a_minus.norm_sqr() < 1e-28);
    }

    #[test]
    fn invalid_specs() {
        assert!(SeedSpec::classical(0.2).validate().is_err());
        assert!(SeedSpec::vacuum(5.0, 0).validate().is_err());
    }

    #[test]
    fn ensemble_is_reproducible() {
        let c2 = rb87_c2_ratio();
        let p = SystemParams::collision_only(c2, 0.01);
        let c = crate::params::effective_coupling(&p).unwrap();
        let scenario = Scenario::Effective {
            params: p,
            coupling: c,
            tau_span: [0.0, 20.0],
            samples: 21,
        };
        let spec = SeedSpec::vacuum(100.0, 9);
        let cfg = IntegratorConfig::default();
        let a = run_ensemble(&spec, &scenario, 8, &cfg).unwrap();
        let b = run_ensemble(&spec, &scenario, 8, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.std_final_transfer > 0.0);
    }
}
