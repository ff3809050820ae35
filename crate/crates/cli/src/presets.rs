//! Built-in scenarios, one per figure.

use crate::config::*;

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub citations: &'static [&'static str],
    build: fn() -> ScenarioConfig,
}

impl Preset {
    pub fn config(&self) -> ScenarioConfig {
        let mut c = (self.build)();
        c.name = Some(self.name.to_string());
        c
    }
}

const FIG2_CITES: &[&str] = &[
    "Fig. 2: initial state (n+, n0, n-) = (0.05, 0.9, 0.05), q = 0.01, 87Rb scattering lengths",
    "Delta' = 100 Omega_p, Omega_d = 10 Omega_p",
];
const FIG4_CITES: &[&str] = &[
    "Fig. 4: Omega'_p = 1, Omega'_d = 40 sech(tau / 20), delta = 3, gamma = 1",
    "classical seed n+- = 1e-5",
];

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig2-collision",
        summary: "off-resonant dynamics with C = c2 (collision dominated)",
        citations: FIG2_CITES,
        build: || fig2(1.0),
    },
    Preset {
        name: "fig2-frozen",
        summary: "off-resonant dynamics with C = 0 (frozen spin mixing)",
        citations: FIG2_CITES,
        build: || fig2(0.0),
    },
    Preset {
        name: "fig2-reversed",
        summary: "off-resonant dynamics with C = -c2 (reversed coupling)",
        citations: FIG2_CITES,
        build: || fig2(-1.0),
    },
    Preset {
        name: "fig3-portraits",
        summary: "energy contours and orbit classification for C = c2, c2/2, -c2/2, -c2",
        citations: &["Fig. 3: q = 0.01, m = 0, C in {c2, 0.5 c2, -0.5 c2, -c2}"],
        build: fig3,
    },
    Preset {
        name: "fig4-cpt",
        summary: "resonant transfer along the dark state with a sech dump pulse",
        citations: FIG4_CITES,
        build: fig4,
    },
    Preset {
        name: "fig4-vacuum-ensemble",
        summary: "the fig4-cpt transfer started from sampled vacuum noise",
        citations: &[
            "Fig. 4 pulse: Omega'_p = 1, Omega'_d = 40 sech(tau / 20), delta = 3, gamma = 1",
            "evolution from quantum noise compared with the classical seed n+- = 1e-5",
        ],
        build: fig4_ensemble,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn fig2(ratio: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(Mode::Effective);
    c.params.q = Some(0.01);
    c.params.coupling_ratio = Some(ratio);
    c.initial = Some(InitialSection {
        populations: [0.05, 0.9, 0.05],
        phases: None,
    });
    c.time = Some(TimeSection {
        start: None,
        end: 500.0,
        samples: Some(5001),
    });
    c
}

fn fig3() -> ScenarioConfig {
    let mut c = ScenarioConfig::new(Mode::Landscape);
    c.params.q = Some(0.01);
    c.landscape = Some(LandscapeSection {
        coupling_ratios: Some(vec![1.0, 0.5, -0.5, -1.0]),
        shifts: Some(ShiftSetting::Both),
        m: Some(0.0),
        grid: Some([181, 101]),
        starts: Some([10, 10]),
        tau_max: Some(5000.0),
    });
    c
}

fn fig4_pulse() -> PulseSection {
    PulseSection {
        omega_p: Some(1.0),
        dump_amplitude: 40.0,
        dump_t0: Some(20.0),
        theta: None,
        rule: None,
        variant: None,
    }
}

fn fig4() -> ScenarioConfig {
    let mut c = ScenarioConfig::new(Mode::Cpt);
    c.params.small_delta = Some(3.0);
    c.params.gamma = Some(1.0);
    c.initial = Some(InitialSection {
        populations: [1e-5, 1.0 - 2e-5, 1e-5],
        phases: None,
    });
    c.time = Some(TimeSection {
        start: Some(0.0),
        end: 150.0,
        samples: Some(1501),
    });
    c.pulse = Some(fig4_pulse());
    c
}

fn fig4_ensemble() -> ScenarioConfig {
    let mut c = fig4();
    c.mode = Mode::Ensemble;
    c.initial = None;
    c.seed = Some(SeedSection {
        mode: SeedModeName::VacuumSampled,
        classical_n: None,
        atom_number: Some(1e4),
        rng_seed: Some(1),
        runs: Some(64),
        scenario: Some(EnsembleScenario::Cpt),
    });
    c
}
