//! Scenario files: a TOML document with a top-level `mode` and one flat
//! section per concern. Parsing is strict and reports every problem found.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use lcse_core::cpt::ResonanceRule;
use lcse_core::dynamics::ResonantVariant;
use lcse_core::params::{rb87_c2_ratio, LaserGeometry};
use lcse_core::{IntegratorConfig, SystemParams};

pub const POPULATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Effective,
    Pendulum,
    Resonant,
    Landscape,
    Cpt,
    Ensemble,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Effective,
        Mode::Pendulum,
        Mode::Resonant,
        Mode::Landscape,
        Mode::Cpt,
        Mode::Ensemble,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Effective => "effective",
            Mode::Pendulum => "pendulum",
            Mode::Resonant => "resonant",
            Mode::Landscape => "landscape",
            Mode::Cpt => "cpt",
            Mode::Ensemble => "ensemble",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0n: Option<f64>,
    /// Defaults to the 87Rb ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Target `C / c2n`; the lasers are chosen in the standard geometry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_ratio: Option<f64>,
    /// Target `C` in absolute scaled units.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_eff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_delta_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub light_shifts: Option<bool>,
}

impl ParamsSection {
    pub fn c2n(&self) -> f64 {
        self.c2n.unwrap_or_else(rb87_c2_ratio)
    }

    pub fn system_params(&self) -> SystemParams {
        let c2n = self.c2n();
        let q = self.q.unwrap_or(0.0);
        let mut p = match (self.coupling_ratio, self.c_eff) {
            (Some(k), _) => {
                SystemParams::from_target_coupling(c2n, q, k * c2n, LaserGeometry::default())
            }
            (None, Some(c)) => {
                SystemParams::from_target_coupling(c2n, q, c, LaserGeometry::default())
            }
            (None, None) => {
                let mut p = SystemParams::collision_only(c2n, q);
                p.omega_p = self.omega_p.unwrap_or(p.omega_p);
                p.omega_d = self.omega_d.unwrap_or(p.omega_d);
                p.big_delta_prime = self.big_delta_prime.unwrap_or(p.big_delta_prime);
                p
            }
        };
        p.c0n = self.c0n.unwrap_or(p.c0n);
        p.small_delta = self.small_delta.unwrap_or(0.0);
        p.gamma = self.gamma.unwrap_or(0.0);
        p
    }

    pub fn light_shifts(&self) -> bool {
        self.light_shifts.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialSection {
    pub populations: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    pub end: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl TimeSection {
    pub fn span(&self) -> [f64; 2] {
        [self.start.unwrap_or(0.0), self.end]
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(1001)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_p: Option<f64>,
    pub dump_amplitude: f64,
    /// Sech width; a constant dump when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_t0: Option<f64>,
    /// Fixed two-photon detuning; locked to resonance when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<ResonanceRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<ResonantVariant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftSetting {
    On,
    Off,
    Both,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSection {
    /// `C / c2n` values; the `params` coupling when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_ratios: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifts: Option<ShiftSetting>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// `(n_theta, n_n0)` energy samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    /// `(n_theta, n_n0)` cell-centred starts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedModeName {
    FixedClassical,
    VacuumSampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleScenario {
    Cpt,
    Effective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSection {
    pub mode: SeedModeName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<EnsembleScenario>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method_order: Option<u8>,
}

impl IntegratorSection {
    pub fn config(&self) -> IntegratorConfig {
        let d = IntegratorConfig::default();
        IntegratorConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_step: self.max_step.unwrap_or(d.max_step),
            method_order: self.method_order.unwrap_or(d.method_order),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub params: ParamsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub landscape: Option<LandscapeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedSection>,
    pub integrator: IntegratorSection,
    pub output: OutputSection,
}

impl ScenarioConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            name: None,
            params: ParamsSection::default(),
            initial: None,
            time: None,
            pulse: None,
            landscape: None,
            seed: None,
            integrator: IntegratorSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    /// Checks everything that does not need the document structure.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errors = Vec::new();
        let mode = self.mode;
        let mut need = |present: bool, key: &str| {
            if !present {
                errors.push(format!("missing required key `{key}` for mode `{mode}`"));
            }
        };
        let seed_cpt = self
            .seed
            .as_ref()
            .map(|s| s.scenario != Some(EnsembleScenario::Effective));
        match mode {
            Mode::Effective | Mode::Pendulum => {
                need(self.params.q.is_some(), "params.q");
                need(self.initial.is_some(), "initial.populations");
                need(self.time.is_some(), "time.end");
            }
            Mode::Resonant | Mode::Cpt => {
                need(self.params.small_delta.is_some(), "params.small_delta");
                need(self.params.gamma.is_some(), "params.gamma");
                need(self.initial.is_some(), "initial.populations");
                need(self.time.is_some(), "time.end");
                need(self.pulse.is_some(), "pulse.dump_amplitude");
            }
            Mode::Landscape => {
                need(self.params.q.is_some(), "params.q");
            }
            Mode::Ensemble => {
                need(self.seed.is_some(), "seed.mode");
                need(self.time.is_some(), "time.end");
                if seed_cpt == Some(true) {
                    need(self.pulse.is_some(), "pulse.dump_amplitude");
                    need(self.params.small_delta.is_some(), "params.small_delta");
                    need(self.params.gamma.is_some(), "params.gamma");
                } else if seed_cpt == Some(false) {
                    need(self.params.q.is_some(), "params.q");
                }
            }
        }

        let p = &self.params;
        let laser_keys = [p.omega_p, p.omega_d, p.big_delta_prime]
            .iter()
            .any(Option::is_some);
        let coupling_keys = usize::from(p.coupling_ratio.is_some())
            + usize::from(p.c_eff.is_some())
            + usize::from(laser_keys);
        if coupling_keys > 1 {
            errors.push("give at most one of `params.coupling_ratio`, `params.c_eff`, or explicit laser parameters".into());
        }
        if let Err(e) = p.system_params().validate() {
            errors.push(format!("params: {e}"));
        }
        if matches!(mode, Mode::Effective | Mode::Pendulum | Mode::Landscape)
            && p.big_delta_prime == Some(0.0)
        {
            errors.push("params.big_delta_prime = 0 has no off-resonant elimination; use mode `resonant` or `cpt`".into());
        }

        if let Some(init) = &self.initial {
            let sum: f64 = init.populations.iter().sum();
            if init.populations.iter().any(|n| !n.is_finite() || *n < 0.0) {
                errors.push("initial.populations must be finite and non-negative".into());
            } else if (sum - 1.0).abs() > POPULATION_TOL {
                errors.push(format!(
                    "initial.populations sum to {sum}, expected 1 within {POPULATION_TOL:e}"
                ));
            }
            if init
                .phases
                .is_some_and(|ph| ph.iter().any(|v| !v.is_finite()))
            {
                errors.push("initial.phases must be finite".into());
            }
        }
        if let Some(t) = &self.time {
            let [a, b] = t.span();
            if !(a.is_finite() && b.is_finite() && b > a) {
                errors.push(format!(
                    "time span [{a}, {b}] must be finite and increasing"
                ));
            }
            if t.samples() < 2 {
                errors.push("time.samples must be at least 2".into());
            }
        }
        if let Some(pulse) = &self.pulse {
            if !(pulse.omega_p.unwrap_or(1.0) > 0.0) {
                errors.push("pulse.omega_p must be positive".into());
            }
            if !(pulse.dump_amplitude >= 0.0) {
                errors.push("pulse.dump_amplitude must be non-negative".into());
            }
            if pulse.dump_t0.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                errors.push("pulse.dump_t0 must be positive".into());
            }
            if mode == Mode::Cpt && pulse.theta.is_some() {
                errors.push(
                    "mode `cpt` locks the detuning; remove `pulse.theta` or use mode `resonant`"
                        .into(),
                );
            }
        }
        if let Some(l) = &self.landscape {
            if l.m.is_some_and(|m| !(m.abs() < 1.0)) {
                errors.push("landscape.m must satisfy |m| < 1".into());
            }
            if l.grid.is_some_and(|g| g[0] < 2 || g[1] < 2) {
                errors.push("landscape.grid must be at least 2x2".into());
            }
            if l.tau_max.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                errors.push("landscape.tau_max must be positive".into());
            }
            if l.coupling_ratios
                .as_ref()
                .is_some_and(|c| c.is_empty() || c.iter().any(|v| !v.is_finite()))
            {
                errors.push(
                    "landscape.coupling_ratios must be a non-empty list of finite numbers".into(),
                );
            }
        }
        if let Some(s) = &self.seed {
            match s.mode {
                SeedModeName::FixedClassical => match s.classical_n {
                    None => errors.push(
                        "missing required key `seed.classical_n` for seed mode `fixed-classical`"
                            .into(),
                    ),
                    Some(n) if !(0.0..=0.1).contains(&n) => {
                        errors.push(format!("seed.classical_n = {n} outside [0, 0.1]"))
                    }
                    _ => {}
                },
                SeedModeName::VacuumSampled => match s.atom_number {
                    None => errors.push(
                        "missing required key `seed.atom_number` for seed mode `vacuum-sampled`"
                            .into(),
                    ),
                    Some(n) if !(n >= 10.0) => {
                        errors.push(format!("seed.atom_number = {n} must be at least 10"))
                    }
                    _ => {}
                },
            }
            if s.runs == Some(0) {
                errors.push("seed.runs must be at least 1".into());
            }
        }
        if let Err(e) = self.integrator.config().validate() {
            errors.push(format!("integrator: {e}"));
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

/// Walks one table, remembering which keys were read.
struct Reader<'a, 'e> {
    prefix: &'a str,
    table: &'a Table,
    used: BTreeSet<&'a str>,
    errors: &'e mut Vec<String>,
}

impl<'a, 'e> Reader<'a, 'e> {
    fn new(prefix: &'a str, table: &'a Table, errors: &'e mut Vec<String>) -> Self {
        Self {
            prefix,
            table,
            used: BTreeSet::new(),
            errors,
        }
    }

    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn raw(&mut self, key: &'a str) -> Option<&'a Value> {
        self.used.insert(key);
        self.table.get(key)
    }

    fn bad(&mut self, key: &str, expected: &str) {
        let path = self.path(key);
        self.errors.push(format!("`{path}` must be {expected}"));
    }

    fn float(&mut self, key: &'a str) -> Option<f64> {
        match self.raw(key)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.bad(key, "a number");
                None
            }
        }
    }

    fn unsigned(&mut self, key: &'a str) -> Option<u64> {
        match self.raw(key)? {
            Value::Integer(i) if *i >= 0 => Some(*i as u64),
            _ => {
                self.bad(key, "a non-negative integer");
                None
            }
        }
    }

    fn boolean(&mut self, key: &'a str) -> Option<bool> {
        match self.raw(key)? {
            Value::Boolean(b) => Some(*b),
            _ => {
                self.bad(key, "true or false");
                None
            }
        }
    }

    fn string(&mut self, key: &'a str) -> Option<&'a str> {
        match self.raw(key)? {
            Value::String(s) => Some(s.as_str()),
            _ => {
                self.bad(key, "a string");
                None
            }
        }
    }

    fn choice<T>(&mut self, key: &'a str, options: &[(&str, T)]) -> Option<T>
    where
        T: Copy,
    {
        let s = self.string(key)?;
        match options.iter().find(|(name, _)| *name == s) {
            Some((_, v)) => Some(*v),
            None => {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                let expected = format!("one of {}", names.join(", "));
                self.bad(key, &expected);
                None
            }
        }
    }

    fn floats(&mut self, key: &'a str) -> Option<Vec<f64>> {
        let Value::Array(items) = self.raw(key)? else {
            self.bad(key, "an array of numbers");
            return None;
        };
        let values: Option<Vec<f64>> = items
            .iter()
            .map(|v| match v {
                Value::Float(f) => Some(*f),
                Value::Integer(i) => Some(*i as f64),
                _ => None,
            })
            .collect();
        if values.is_none() {
            self.bad(key, "an array of numbers");
        }
        values
    }

    fn float_array<const N: usize>(&mut self, key: &'a str) -> Option<[f64; N]> {
        let v = self.floats(key)?;
        match <[f64; N]>::try_from(v) {
            Ok(a) => Some(a),
            Err(_) => {
                self.bad(key, &format!("an array of {N} numbers"));
                None
            }
        }
    }

    fn count_pair(&mut self, key: &'a str) -> Option<[usize; 2]> {
        let v = self.floats(key)?;
        if v.len() == 2 && v.iter().all(|x| x.fract() == 0.0 && *x >= 0.0) {
            Some([v[0] as usize, v[1] as usize])
        } else {
            self.bad(key, "an array of 2 non-negative integers");
            None
        }
    }

    fn finish(self) {
        for key in self.table.keys() {
            if !self.used.contains(key.as_str()) {
                let path = if self.prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{}.{key}", self.prefix)
                };
                self.errors.push(format!("unknown key `{path}`"));
            }
        }
    }
}

fn section<'a>(root: &'a Table, name: &str, errors: &mut Vec<String>) -> Option<&'a Table> {
    match root.get(name)? {
        Value::Table(t) => Some(t),
        _ => {
            errors.push(format!("`{name}` must be a table"));
            None
        }
    }
}

const RULES: [(&str, ResonanceRule); 2] = [
    ("stationary", ResonanceRule::Stationary),
    ("paper-literal", ResonanceRule::PaperLiteral),
];
const VARIANTS: [(&str, ResonantVariant); 3] = [
    ("symmetrized", ResonantVariant::Symmetrized),
    ("paper-literal", ResonantVariant::PaperLiteral),
    ("literal", ResonantVariant::PaperLiteral),
];

/// Parses and validates a scenario file, returning every problem found.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Vec<String>> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| vec![format!("malformed config: {e}")])?;
    let mut errors = Vec::new();
    let empty = Table::new();

    let mut top = Reader::new("", &root, &mut errors);
    let mode_name = top.string("mode");
    let name = top.string("name").map(str::to_string);
    for s in [
        "params",
        "initial",
        "time",
        "pulse",
        "landscape",
        "seed",
        "integrator",
        "output",
    ] {
        top.used.insert(s);
    }
    top.finish();
    let mode = match mode_name {
        Some(m) => {
            let parsed = Mode::parse(m);
            if parsed.is_none() {
                let names: Vec<&str> = Mode::ALL.iter().map(|m| m.as_str()).collect();
                errors.push(format!(
                    "unknown mode {m:?}; expected one of {}",
                    names.join(", ")
                ));
            }
            parsed
        }
        None => {
            errors.push("missing required key `mode`".into());
            None
        }
    };

    let params_table = section(&root, "params", &mut errors).unwrap_or(&empty);
    let params = {
        let mut r = Reader::new("params", params_table, &mut errors);
        let p = ParamsSection {
            c0n: r.float("c0n"),
            c2n: r.float("c2n"),
            q: r.float("q"),
            coupling_ratio: r.float("coupling_ratio"),
            c_eff: r.float("c_eff"),
            omega_p: r.float("omega_p"),
            omega_d: r.float("omega_d"),
            big_delta_prime: r.float("big_delta_prime"),
            small_delta: r.float("small_delta"),
            gamma: r.float("gamma"),
            light_shifts: r.boolean("light_shifts"),
        };
        r.finish();
        p
    };

    let initial = section(&root, "initial", &mut errors).and_then(|t| {
        let mut r = Reader::new("initial", t, &mut errors);
        let populations = r.float_array::<3>("populations");
        let phases = r.float_array::<3>("phases");
        let missing = populations.is_none() && !t.contains_key("populations");
        r.finish();
        if missing {
            errors.push("missing required key `initial.populations`".into());
        }
        populations.map(|populations| InitialSection {
            populations,
            phases,
        })
    });

    let time = section(&root, "time", &mut errors).and_then(|t| {
        let mut r = Reader::new("time", t, &mut errors);
        let start = r.float("start");
        let end = r.float("end");
        let samples = r.unsigned("samples").map(|s| s as usize);
        r.finish();
        if end.is_none() && !t.contains_key("end") {
            errors.push("missing required key `time.end`".into());
        }
        end.map(|end| TimeSection {
            start,
            end,
            samples,
        })
    });

    let pulse = section(&root, "pulse", &mut errors).and_then(|t| {
        let mut r = Reader::new("pulse", t, &mut errors);
        let omega_p = r.float("omega_p");
        let dump_amplitude = r.float("dump_amplitude");
        let dump_t0 = r.float("dump_t0");
        let theta = r.float("theta");
        let rule = r.choice("rule", &RULES);
        let variant = r.choice("variant", &VARIANTS);
        r.finish();
        if dump_amplitude.is_none() && !t.contains_key("dump_amplitude") {
            errors.push("missing required key `pulse.dump_amplitude`".into());
        }
        dump_amplitude.map(|dump_amplitude| PulseSection {
            omega_p,
            dump_amplitude,
            dump_t0,
            theta,
            rule,
            variant,
        })
    });

    let landscape = section(&root, "landscape", &mut errors).map(|t| {
        let mut r = Reader::new("landscape", t, &mut errors);
        let l = LandscapeSection {
            coupling_ratios: r.floats("coupling_ratios"),
            shifts: r.choice(
                "shifts",
                &[
                    ("on", ShiftSetting::On),
                    ("off", ShiftSetting::Off),
                    ("both", ShiftSetting::Both),
                ],
            ),
            m: r.float("m"),
            grid: r.count_pair("grid"),
            starts: r.count_pair("starts"),
            tau_max: r.float("tau_max"),
        };
        r.finish();
        l
    });

    let seed = section(&root, "seed", &mut errors).and_then(|t| {
        let mut r = Reader::new("seed", t, &mut errors);
        let mode = r.choice(
            "mode",
            &[
                ("fixed-classical", SeedModeName::FixedClassical),
                ("vacuum-sampled", SeedModeName::VacuumSampled),
            ],
        );
        let s = SeedSection {
            mode: mode.unwrap_or(SeedModeName::FixedClassical),
            classical_n: r.float("classical_n"),
            atom_number: r.float("atom_number"),
            rng_seed: r.unsigned("rng_seed"),
            runs: r.unsigned("runs").map(|v| v as usize),
            scenario: r.choice(
                "scenario",
                &[
                    ("cpt", EnsembleScenario::Cpt),
                    ("effective", EnsembleScenario::Effective),
                ],
            ),
        };
        r.finish();
        if mode.is_none() && !t.contains_key("mode") {
            errors.push("missing required key `seed.mode`".into());
        }
        mode.map(|_| s)
    });

    let integrator =
        section(&root, "integrator", &mut errors).map_or_else(IntegratorSection::default, |t| {
            let mut r = Reader::new("integrator", t, &mut errors);
            let method_order = r
                .unsigned("method_order")
                .map(|v| v.min(u8::MAX as u64) as u8);
            let s = IntegratorSection {
                rel_tol: r.float("rel_tol"),
                abs_tol: r.float("abs_tol"),
                max_step: r.float("max_step"),
                method_order,
            };
            r.finish();
            s
        });

    let output = section(&root, "output", &mut errors).map_or_else(OutputSection::default, |t| {
        let mut r = Reader::new("output", t, &mut errors);
        let dir = r.string("dir").map(str::to_string);
        r.finish();
        OutputSection { dir }
    });

    let Some(mode) = mode else {
        return Err(errors);
    };
    let config = ScenarioConfig {
        mode,
        name,
        params,
        initial,
        time,
        pulse,
        landscape,
        seed,
        integrator,
        output,
    };
    if let Err(more) = config.validate() {
        for e in more {
            if !errors.contains(&e) {
                errors.push(e);
            }
        }
    }
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_lists_mode() {
        let errs = parse_config("").unwrap_err();
        assert!(errs.iter().any(|e| e.contains("`mode`")));
    }

    #[test]
    fn missing_keys_are_all_reported() {
        let errs = parse_config("mode = \"cpt\"").unwrap_err();
        for key in [
            "params.small_delta",
            "params.gamma",
            "initial.populations",
            "time.end",
            "pulse.dump_amplitude",
        ] {
            assert!(
                errs.iter().any(|e| e.contains(key) && e.contains("cpt")),
                "{key}: {errs:?}"
            );
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = "mode = \"landscape\"\ncolour = 1\n[params]\nq = 0.01\nqq = 2\n";
        let errs = parse_config(text).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("`colour`")));
        assert!(errs.iter().any(|e| e.contains("`params.qq`")));
    }

    #[test]
    fn unnormalized_populations() {
        let text = "mode = \"effective\"\n[params]\nq = 0.01\n[initial]\npopulations = [0.5, 0.5, 0.5]\n[time]\nend = 10\n";
        let errs = parse_config(text).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("sum to 1.5")), "{errs:?}");
    }

    #[test]
    fn type_errors_name_the_key() {
        let text = "mode = \"landscape\"\n[params]\nq = \"small\"\n";
        let errs = parse_config(text).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| e.contains("`params.q` must be a number")));
    }
}
