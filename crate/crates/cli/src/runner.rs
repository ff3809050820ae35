//! Executes a validated scenario and writes its artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use lcse_core::cpt::{
    adiabaticity_diagnostic, run_transfer, DetuningSchedule, Envelope, PulseSchedule,
    TransferResult,
};
use lcse_core::dynamics::{
    integrate, EffectiveFlow, PendulumFlow, ResonantVariant, Termination, Trajectory,
};
use lcse_core::integrator::linspace;
use lcse_core::landscape::{
    contour_portrait, start_grid, GridSpec, LandscapeParams, PortraitSummary, DEFAULT_TAU_MAX,
};
use lcse_core::params::{classify_regime, effective_coupling, Regime};
use lcse_core::stochastic::{run_ensemble, EnsembleStats, Scenario, SeedMode, SeedSpec};
use lcse_core::{CouplingSummary, PendulumState, SpinorAmplitudes, SystemParams};

use crate::config::*;
use crate::error::CliError;
use crate::presets;

/// Thresholds the fig4 transfer is judged against.
pub const TRANSFER_MIN_EFFICIENCY: f64 = 0.8;
pub const TRANSFER_MAX_PEAK_MOLECULAR: f64 = 0.05;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DriftSummary {
    pub max_norm_drift: f64,
    pub max_magnetization_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_energy_drift: Option<f64>,
}

impl DriftSummary {
    fn of<S>(t: &Trajectory<S>) -> Self {
        Self {
            max_norm_drift: t.max_norm_drift(),
            max_magnetization_drift: t.max_magnetization_drift(),
            max_energy_drift: t
                .monitors
                .first()
                .and_then(|m| m.energy)
                .map(|_| t.max_energy_drift()),
        }
    }

    fn merge(&mut self, other: &DriftSummary) {
        self.max_norm_drift = self.max_norm_drift.max(other.max_norm_drift);
        self.max_magnetization_drift = self
            .max_magnetization_drift
            .max(other.max_magnetization_drift);
        if let Some(e) = other.max_energy_drift {
            self.max_energy_drift = Some(self.max_energy_drift.unwrap_or(0.0).max(e));
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub mode: Mode,
    pub version: String,
    pub config: ScenarioConfig,
    pub wall_clock_seconds: f64,
    pub drift: DriftSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    pub outputs: Vec<String>,
    pub citations: Vec<String>,
    pub notes: Vec<String>,
}

struct Writer {
    dir: PathBuf,
    outputs: Vec<String>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn csv(&mut self, name: &str, comments: &[String], body: &str) -> Result<(), CliError> {
        let mut text = String::new();
        for c in comments {
            text.push_str("# ");
            text.push_str(c);
            text.push('\n');
        }
        text.push_str(body);
        self.write(name, &text)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("artifacts serialize to JSON");
        text.push('\n');
        self.write(name, &text)
    }
}

#[derive(Default)]
struct Report {
    drift: DriftSummary,
    termination: Option<Termination>,
    notes: Vec<String>,
}

/// Runs `config`, writing artifacts and `manifest.json` into `out_dir`.
pub fn run(config: &ScenarioConfig, out_dir: &Path) -> Result<RunManifest, CliError> {
    config.validate().map_err(CliError::Config)?;
    let started = Instant::now();
    let mut w = Writer::new(out_dir)?;
    let report = match config.mode {
        Mode::Effective => run_effective(config, &mut w)?,
        Mode::Pendulum => run_pendulum(config, &mut w)?,
        Mode::Resonant | Mode::Cpt => run_resonant(config, &mut w)?,
        Mode::Landscape => run_landscape(config, &mut w)?,
        Mode::Ensemble => run_ensemble_mode(config, &mut w)?,
    };
    let citations = config
        .name
        .as_deref()
        .and_then(presets::find)
        .map(|p| p.citations.iter().map(|s| s.to_string()).collect())
        .unwrap_or_default();
    let mut outputs = w.outputs.clone();
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        name: config.name.clone(),
        mode: config.mode,
        version: lcse_core::VERSION.to_string(),
        config: config.clone(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        drift: report.drift,
        termination: report.termination,
        outputs,
        citations,
        notes: report.notes,
    };
    w.json("manifest.json", &manifest)?;
    Ok(manifest)
}

fn initial_amplitudes(config: &ScenarioConfig) -> SpinorAmplitudes {
    let init = config.initial.as_ref().expect("validated");
    let sum: f64 = init.populations.iter().sum();
    let pops = init.populations.map(|n| n / sum);
    SpinorAmplitudes::from_populations_and_phases(pops, init.phases.unwrap_or([0.0; 3]))
}

fn grid(config: &ScenarioConfig) -> (f64, Vec<f64>) {
    let t = config.time.as_ref().expect("validated");
    let [a, b] = t.span();
    (a, linspace(a, b, t.samples()))
}

fn coupling_for(
    config: &ScenarioConfig,
    params: &SystemParams,
) -> Result<CouplingSummary, CliError> {
    let c = effective_coupling(params)?;
    Ok(if config.params.light_shifts() {
        c
    } else {
        c.without_shifts()
    })
}

fn regime_note(params: &SystemParams, c: &CouplingSummary) -> String {
    let regime = match classify_regime(c.c_eff, params.c2n) {
        Regime::CollisionDominated => "collision-dominated",
        Regime::Frozen => "frozen",
        Regime::Reversed => "reversed",
    };
    format!(
        "C = {:e} ({regime}), light shifts Delta = {:e}, Omega^2/Delta = {:e}",
        c.c_eff, c.lightshift_delta, c.lightshift_p
    )
}

const TAU_NOTE: &str = "tau: scaled time c0n * t";

fn run_effective(config: &ScenarioConfig, w: &mut Writer) -> Result<Report, CliError> {
    let params = config.params.system_params();
    let coupling = coupling_for(config, &params)?;
    let (t0, times) = grid(config);
    let flow = EffectiveFlow::new(params, coupling);
    let traj = integrate(
        &flow,
        &initial_amplitudes(config),
        t0,
        &times,
        &config.integrator.config(),
    )?;
    let mut body = String::from("tau,n_plus,n_zero,n_minus,theta,magnetization,total_n,energy\n");
    for ((t, s), m) in traj.times.iter().zip(&traj.states).zip(&traj.monitors) {
        let o = s.observables();
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            t,
            o.n_plus,
            o.n_zero,
            o.n_minus,
            s.relative_phase(),
            m.magnetization,
            m.total_n,
            m.energy.unwrap_or(f64::NAN)
        ));
    }
    w.csv(
        "trajectory.csv",
        &[
            "off-resonant amplitude dynamics".into(),
            TAU_NOTE.into(),
            "n_plus, n_zero, n_minus: Zeeman populations; theta: relative phase in (-pi, pi]".into(),
            "magnetization: n_plus - n_minus; total_n: sum of populations; energy: pendulum energy in units of c0n".into(),
            regime_note(&params, &coupling),
        ],
        &body,
    )?;
    Ok(Report {
        drift: DriftSummary::of(&traj),
        termination: Some(traj.termination),
        notes: vec![regime_note(&params, &coupling)],
    })
}

fn run_pendulum(config: &ScenarioConfig, w: &mut Writer) -> Result<Report, CliError> {
    let params = config.params.system_params();
    let coupling = coupling_for(config, &params)?;
    let initial = PendulumState::from_amplitudes(&initial_amplitudes(config))?;
    let lp = LandscapeParams::from_coupling(&params, &coupling, initial.m_mag);
    let (t0, times) = grid(config);
    let traj = integrate(
        &PendulumFlow::new(lp),
        &initial,
        t0,
        &times,
        &config.integrator.config(),
    )?;
    let mut body = String::from("tau,theta,n_zero,energy\n");
    for ((t, s), m) in traj.times.iter().zip(&traj.states).zip(&traj.monitors) {
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            t,
            s.theta,
            s.n_zero,
            m.energy.unwrap_or(f64::NAN)
        ));
    }
    w.csv(
        "trajectory.csv",
        &[
            "reduced pendulum dynamics at fixed magnetization".into(),
            TAU_NOTE.into(),
            "theta: relative phase, unwrapped; n_zero: spin-0 population; energy in units of c0n"
                .into(),
            format!("m = {:e}", initial.m_mag),
        ],
        &body,
    )?;
    Ok(Report {
        drift: DriftSummary::of(&traj),
        termination: Some(traj.termination),
        notes: vec![regime_note(&params, &coupling)],
    })
}

pub fn pulse_schedule(section: &PulseSection) -> PulseSchedule {
    let dump = match section.dump_t0 {
        Some(t0) => Envelope::Sech {
            amplitude: section.dump_amplitude,
            t0,
        },
        None => Envelope::Constant {
            value: section.dump_amplitude,
        },
    };
    PulseSchedule {
        pump: Envelope::Constant {
            value: section.omega_p.unwrap_or(1.0),
        },
        dump,
        detuning: match section.theta {
            Some(theta) => DetuningSchedule::Fixed { theta },
            None => DetuningSchedule::Locked {
                rule: section.rule.unwrap_or_default(),
            },
        },
    }
}

#[derive(Serialize)]
struct TransferReport {
    variant: ResonantVariant,
    pulse: PulseSchedule,
    #[serde(flatten)]
    result: TransferResult,
    adiabaticity: f64,
    /// Dark-state `(n_pm, n0)` at the last sample.
    final_cpt_target: [f64; 2],
    ideal_target: f64,
    min_efficiency: f64,
    max_peak_molecular: f64,
    meets_bounds: bool,
}

fn run_resonant(config: &ScenarioConfig, w: &mut Writer) -> Result<Report, CliError> {
    let params = config.params.system_params();
    let section = config.pulse.as_ref().expect("validated");
    let pulse = pulse_schedule(section);
    let variant = section.variant.unwrap_or_default();
    let (_, times) = grid(config);
    let span = config.time.as_ref().expect("validated").span();
    let run = run_transfer(
        &initial_amplitudes(config),
        &params,
        &pulse,
        variant,
        span,
        times.len(),
        &config.integrator.config(),
    )?;
    w.csv(
        "trajectory.csv",
        &[
            "resonant four-mode dynamics".into(),
            TAU_NOTE.into(),
            "n_plus, n_zero, n_minus, n_mol: populations (molecules count twice in the total)".into(),
            "theta: two-photon detuning; omega_d: dump Rabi frequency".into(),
            "n_pm_cpt, n_zero_cpt: instantaneous dark-state populations; the ideal end state is n_plus + n_minus = 1".into(),
        ],
        &run.to_csv(),
    )?;
    let r = run.result;
    let last = *run.cpt_reference.last().expect("at least two samples");
    let report = TransferReport {
        variant,
        pulse,
        result: r,
        adiabaticity: adiabaticity_diagnostic(&pulse, &times)?,
        final_cpt_target: [last.0, last.1],
        ideal_target: 1.0,
        min_efficiency: TRANSFER_MIN_EFFICIENCY,
        max_peak_molecular: TRANSFER_MAX_PEAK_MOLECULAR,
        meets_bounds: r.efficiency >= TRANSFER_MIN_EFFICIENCY
            && r.peak_molecular < TRANSFER_MAX_PEAK_MOLECULAR,
    };
    w.json("transfer.json", &report)?;
    let mut notes = vec![format!(
        "transfer bounds: n_plus + n_minus >= {TRANSFER_MIN_EFFICIENCY} at the end, peak n_mol < {TRANSFER_MAX_PEAK_MOLECULAR}"
    )];
    if params.gamma > 0.0 {
        notes.push("gamma > 0: total_n decreases through molecular loss, so its drift is not a conservation error".into());
    }
    Ok(Report {
        drift: DriftSummary::of(&run.trajectory),
        termination: Some(run.trajectory.termination),
        notes,
    })
}

#[derive(Serialize)]
struct PortraitFile<'a> {
    coupling_ratio: f64,
    light_shifts: bool,
    #[serde(flatten)]
    summary: &'a PortraitSummary,
}

fn ratio_label(k: f64) -> String {
    format!("k{k:+}")
}

fn run_landscape(config: &ScenarioConfig, w: &mut Writer) -> Result<Report, CliError> {
    let base = config.params.system_params();
    let l = config.landscape.clone().unwrap_or_default();
    let ratios = match &l.coupling_ratios {
        Some(r) => r.clone(),
        None => {
            let c = effective_coupling(&base)?;
            vec![if base.c2n == 0.0 {
                0.0
            } else {
                c.c_eff / base.c2n
            }]
        }
    };
    let shift_settings: &[bool] = match l.shifts {
        Some(ShiftSetting::Both) => &[true, false],
        Some(ShiftSetting::Off) => &[false],
        Some(ShiftSetting::On) => &[true],
        None => {
            if config.params.light_shifts() {
                &[true]
            } else {
                &[false]
            }
        }
    };
    let m = l.m.unwrap_or(0.0);
    let [gt, gn] = l.grid.unwrap_or([181, 101]);
    let [st, sn] = l.starts.unwrap_or([10, 10]);
    let tau_max = l.tau_max.unwrap_or(DEFAULT_TAU_MAX);
    let spec = GridSpec::full(gt, gn);
    let starts = start_grid(st, sn, m);
    let cfg = config.integrator.config();
    let single = ratios.len() == 1 && shift_settings.len() == 1;

    let mut report = Report {
        drift: DriftSummary {
            max_energy_drift: Some(0.0),
            ..DriftSummary::default()
        },
        ..Report::default()
    };
    for &k in &ratios {
        let params = if l.coupling_ratios.is_some() {
            lcse_core::SystemParams {
                small_delta: base.small_delta,
                gamma: base.gamma,
                c0n: base.c0n,
                ..lcse_core::SystemParams::from_target_coupling(
                    base.c2n,
                    base.q,
                    k * base.c2n,
                    lcse_core::params::LaserGeometry::default(),
                )
            }
        } else {
            base
        };
        let coupling = effective_coupling(&params)?;
        for &shifts in shift_settings {
            let lp = LandscapeParams::from_system(&params, &coupling, m, shifts);
            let (energies, summary) = contour_portrait(&lp, &spec, &starts, tau_max, &cfg)?;
            let suffix = if single {
                String::new()
            } else {
                format!(
                    "_{}_shifts-{}",
                    ratio_label(k),
                    if shifts { "on" } else { "off" }
                )
            };
            w.csv(
                &format!("energy{suffix}.csv"),
                &[
                    "pendulum energy over (theta, n_zero) in units of c0n".into(),
                    "mask = 1 marks points outside (1 - n_zero)^2 >= m^2; energy is nan there"
                        .into(),
                    format!(
                        "C / c2 = {k}, light shifts {}, m = {m}",
                        if shifts { "on" } else { "off" }
                    ),
                ],
                &energies.to_csv(),
            )?;
            w.json(
                &format!("portrait{suffix}.json"),
                &PortraitFile {
                    coupling_ratio: k,
                    light_shifts: shifts,
                    summary: &summary,
                },
            )?;
            report.notes.push(format!(
                "C / c2 = {k}, shifts {}: {} open, {} closed, {} boundary, {} indeterminate",
                if shifts { "on" } else { "off" },
                summary.open,
                summary.closed,
                summary.boundary,
                summary.indeterminate
            ));
            report.drift.merge(&DriftSummary {
                max_norm_drift: 0.0,
                max_magnetization_drift: 0.0,
                max_energy_drift: Some(summary.max_energy_drift),
            });
        }
    }
    Ok(report)
}

#[derive(Serialize)]
struct EnsembleReport<'a> {
    seed: SeedSpec,
    runs: usize,
    mean_final_transfer: f64,
    std_final_transfer: f64,
    onset_count: usize,
    mean_onset: Option<f64>,
    std_onset: Option<f64>,
    mean_initial_magnetization: f64,
    std_initial_magnetization: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    classical_reference: Option<&'a ClassicalReference>,
}

#[derive(Serialize)]
struct ClassicalReference {
    classical_n: f64,
    final_transfer: f64,
    difference: f64,
}

pub fn seed_spec(section: &SeedSection) -> SeedSpec {
    let mode = match section.mode {
        SeedModeName::FixedClassical => SeedMode::FixedClassical {
            classical_n: section.classical_n.unwrap_or(0.0),
        },
        SeedModeName::VacuumSampled => SeedMode::VacuumSampled {
            atom_number: section.atom_number.unwrap_or(f64::NAN),
        },
    };
    SeedSpec {
        mode,
        rng_seed: section.rng_seed.unwrap_or(0),
    }
}

fn run_ensemble_mode(config: &ScenarioConfig, w: &mut Writer) -> Result<Report, CliError> {
    let section = config.seed.as_ref().expect("validated");
    let spec = seed_spec(section);
    let runs = section.runs.unwrap_or(64);
    let params = config.params.system_params();
    let t = config.time.as_ref().expect("validated");
    let cfg = config.integrator.config();
    let scenario = match section.scenario.unwrap_or(EnsembleScenario::Cpt) {
        EnsembleScenario::Cpt => {
            let pulse = config.pulse.as_ref().expect("validated");
            Scenario::Transfer {
                params,
                pulse: pulse_schedule(pulse),
                variant: pulse.variant.unwrap_or_default(),
                tau_span: t.span(),
                samples: t.samples(),
            }
        }
        EnsembleScenario::Effective => Scenario::Effective {
            params,
            coupling: coupling_for(config, &params)?,
            tau_span: t.span(),
            samples: t.samples(),
        },
    };
    let stats: EnsembleStats = run_ensemble(&spec, &scenario, runs, &cfg)?;

    let reference = if matches!(spec.mode, SeedMode::VacuumSampled { .. }) {
        let classical_n = 1e-5;
        let r = run_ensemble(&SeedSpec::classical(classical_n), &scenario, 1, &cfg)?;
        Some(ClassicalReference {
            classical_n,
            final_transfer: r.mean_final_transfer,
            difference: stats.mean_final_transfer - r.mean_final_transfer,
        })
    } else {
        None
    };

    w.csv(
        "ensemble.csv",
        &[
            "one row per run; seed_*: initial side-mode amplitudes".into(),
            "n_plus, n_zero, n_minus, n_mol: final populations".into(),
            format!(
                "tau_onset: first tau with n_plus + n_minus > {}, nan if never",
                lcse_core::stochastic::ONSET_THRESHOLD
            ),
        ],
        &stats.to_csv(),
    )?;
    w.json(
        "ensemble.json",
        &EnsembleReport {
            seed: spec,
            runs: stats.runs,
            mean_final_transfer: stats.mean_final_transfer,
            std_final_transfer: stats.std_final_transfer,
            onset_count: stats.onset_count,
            mean_onset: stats.mean_onset,
            std_onset: stats.std_onset,
            mean_initial_magnetization: stats.mean_initial_magnetization,
            std_initial_magnetization: stats.std_initial_magnetization,
            classical_reference: reference.as_ref(),
        },
    )?;
    let mut notes = vec![format!(
        "mean final n_plus + n_minus = {:.6} +- {:.6} over {} runs",
        stats.mean_final_transfer, stats.std_final_transfer, stats.runs
    )];
    if let Some(r) = &reference {
        notes.push(format!(
            "classical seed {:e}: final n_plus + n_minus = {:.6}",
            r.classical_n, r.final_transfer
        ));
    }
    Ok(Report {
        drift: DriftSummary::default(),
        termination: None,
        notes,
    })
}
