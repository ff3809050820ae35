//! Energy landscape of the reduced `(theta, n0)` dynamics at fixed
//! magnetization: evaluation on grids, fixed points, and open/closed
//! classification of individual orbits.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::PendulumFlow;
use crate::error::{Error, Result};
use crate::integrator::{Control, IntegratorConfig, Outcome, Solver, StepView};
use crate::params::{CouplingSummary, SystemParams};
use crate::state::{wrap_angle, PendulumState};

pub const EPS_RETURN: f64 = 1e-4;
pub const DEFAULT_TAU_MAX: f64 = 500.0;
const FIXED_POINT_SCAN: usize = 2000;
const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeParams {
    pub c_eff: f64,
    pub c2n: f64,
    pub q: f64,
    pub m_mag: f64,
    /// Pair light shift `Delta`.
    pub lightshift_delta: f64,
    /// Spin-0 light shift `Omega^2 / Delta`.
    pub lightshift_p: f64,
}

impl LandscapeParams {
    pub fn from_coupling(params: &SystemParams, coupling: &CouplingSummary, m_mag: f64) -> Self {
        Self {
            c_eff: coupling.c_eff,
            c2n: params.c2n,
            q: params.q,
            m_mag,
            lightshift_delta: coupling.lightshift_delta,
            lightshift_p: coupling.lightshift_p,
        }
    }

    /// Same landscape with an explicit light-shift switch.
    pub fn from_system(
        params: &SystemParams,
        coupling: &CouplingSummary,
        m_mag: f64,
        shifts: bool,
    ) -> Self {
        let coupling = if shifts {
            *coupling
        } else {
            coupling.without_shifts()
        };
        Self::from_coupling(params, &coupling, m_mag)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.c_eff,
            self.c2n,
            self.q,
            self.m_mag,
            self.lightshift_delta,
            self.lightshift_p,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("landscape parameters must be finite"));
        }
        if self.m_mag.abs() > 1.0 {
            return Err(Error::invalid(format!(
                "|m| = {} exceeds 1",
                self.m_mag.abs()
            )));
        }
        Ok(())
    }

    /// Largest admissible `n0`.
    pub fn n0_max(&self) -> f64 {
        1.0 - self.m_mag.abs()
    }

    fn radicand(&self, n_zero: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&n_zero) || !n_zero.is_finite() {
            return Err(Error::domain(format!("n0 = {n_zero} outside [0, 1]")));
        }
        let rest = 1.0 - n_zero;
        let r = rest * rest - self.m_mag * self.m_mag;
        if r < 0.0 {
            return Err(Error::domain(format!(
                "(1 - n0)^2 < m^2 at n0 = {n_zero}, m = {}",
                self.m_mag
            )));
        }
        Ok(r)
    }
}

/// The pendulum energy
///
/// ```text
/// E = q (1 - n0) + C n0 sqrt((1 - n0)^2 - m^2) cos(theta) + c2 n0 (1 - n0)
///   + (Delta/4) n0 (2 - n0) - (Omega^2/Delta) n0^2
/// ```
pub fn energy(theta: f64, n_zero: f64, lp: &LandscapeParams) -> Result<f64> {
    let s = lp.radicand(n_zero)?.sqrt();
    Ok(lp.q * (1.0 - n_zero)
        + lp.c_eff * n_zero * s * theta.cos()
        + lp.c2n * n_zero * (1.0 - n_zero)
        + 0.25 * lp.lightshift_delta * n_zero * (2.0 - n_zero)
        - lp.lightshift_p * n_zero * n_zero)
}

/// `(dE/dtheta, dE/dn0)`.
///
/// At `m = 0` the exchange derivative is regular up to `n0 = 1`; for
/// `m != 0` it diverges on the boundary, which is reported as a domain error.
pub fn gradient(theta: f64, n_zero: f64, lp: &LandscapeParams) -> Result<(f64, f64)> {
    let r = lp.radicand(n_zero)?;
    let s = r.sqrt();
    let d_exchange = if lp.m_mag == 0.0 {
        1.0 - 2.0 * n_zero
    } else if s > 0.0 {
        s - n_zero * (1.0 - n_zero) / s
    } else {
        return Err(Error::domain(format!(
            "pendulum boundary reached at n0 = {n_zero}"
        )));
    };
    let d_theta = -lp.c_eff * n_zero * s * theta.sin();
    let d_n0 = -lp.q
        + lp.c_eff * theta.cos() * d_exchange
        + lp.c2n * (1.0 - 2.0 * n_zero)
        + 0.5 * lp.lightshift_delta * (1.0 - n_zero)
        - 2.0 * lp.lightshift_p * n_zero;
    Ok((d_theta, d_n0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub theta_range: [f64; 2],
    pub n0_range: [f64; 2],
    /// `(n_theta, n_n0)` samples, endpoints included.
    pub resolution: [usize; 2],
}

impl GridSpec {
    /// `theta` in `[-pi, pi]`, `n0` in `[0, 1]`.
    pub fn full(n_theta: usize, n_n0: usize) -> Self {
        Self {
            theta_range: [-PI, PI],
            n0_range: [0.0, 1.0],
            resolution: [n_theta, n_n0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [t0, t1] = self.theta_range;
        let [n0, n1] = self.n0_range;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::invalid(
                "theta range must be finite and non-degenerate",
            ));
        }
        if !(0.0 <= n0 && n0 < n1 && n1 <= 1.0) {
            return Err(Error::invalid(
                "n0 range must be a non-degenerate subset of [0, 1]",
            ));
        }
        if self.resolution[0] < 2 || self.resolution[1] < 2 {
            return Err(Error::invalid("grid resolution must be at least 2x2"));
        }
        Ok(())
    }

    pub fn thetas(&self) -> Vec<f64> {
        crate::integrator::linspace(self.theta_range[0], self.theta_range[1], self.resolution[0])
    }

    pub fn n0s(&self) -> Vec<f64> {
        crate::integrator::linspace(self.n0_range[0], self.n0_range[1], self.resolution[1])
    }
}

/// Row-major energies; row index runs over `n0`, column over `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    pub thetas: Vec<f64>,
    pub n0s: Vec<f64>,
    /// `NaN` where masked.
    pub values: Vec<f64>,
    /// True where the point lies outside the domain.
    pub mask: Vec<bool>,
}

impl EnergyGrid {
    pub fn at(&self, i_n0: usize, i_theta: usize) -> Option<f64> {
        let k = i_n0 * self.thetas.len() + i_theta;
        (!self.mask[k]).then_some(self.values[k])
    }

    pub fn masked_fraction(&self) -> f64 {
        self.mask.iter().filter(|&&m| m).count() as f64 / self.mask.len() as f64
    }

    /// `theta, n_zero, energy, mask` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,n_zero,energy,mask\n");
        for (i, &n0) in self.n0s.iter().enumerate() {
            for (j, &th) in self.thetas.iter().enumerate() {
                let k = i * self.thetas.len() + j;
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{}\n",
                    th,
                    n0,
                    self.values[k],
                    u8::from(self.mask[k])
                ));
            }
        }
        out
    }
}

pub fn energy_grid(lp: &LandscapeParams, grid: &GridSpec) -> Result<EnergyGrid> {
    grid.validate()?;
    let thetas = grid.thetas();
    let n0s = grid.n0s();
    let (values, mask): (Vec<f64>, Vec<bool>) = n0s
        .par_iter()
        .flat_map_iter(|&n0| {
            thetas.iter().map(move |&th| match energy(th, n0, lp) {
                Ok(e) => (e, false),
                Err(_) => (f64::NAN, true),
            })
        })
        .unzip();
    Ok(EnergyGrid {
        thetas,
        n0s,
        values,
        mask,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Center,
    Saddle,
    BoundaryExtremum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub theta: f64,
    pub n_zero: f64,
    pub energy: f64,
    pub stability: Stability,
}

fn d_n0(theta: f64, n0: f64, lp: &LandscapeParams) -> f64 {
    gradient(theta, n0, lp).map(|g| g.1).unwrap_or(f64::NAN)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Fixed points on the `theta = 0` and `theta = pi` lines, plus the
/// energy extrema of those lines at the `n0` boundaries.
pub fn find_fixed_points(lp: &LandscapeParams) -> Result<Vec<FixedPoint>> {
    lp.validate()?;
    let n_max = lp.n0_max();
    let mut points = Vec::new();
    if n_max <= 0.0 {
        return Ok(points);
    }
    for theta in [0.0, PI] {
        let f = |n: f64| d_n0(theta, n, lp);
        // keep clear of the singular boundary when m != 0
        let hi = if lp.m_mag == 0.0 {
            n_max
        } else {
            n_max * (1.0 - 1e-12)
        };
        let step = hi / FIXED_POINT_SCAN as f64;
        let mut prev_n = 0.0;
        let mut prev_f = f(prev_n);
        for k in 1..=FIXED_POINT_SCAN {
            let n = if k == FIXED_POINT_SCAN {
                hi
            } else {
                step * k as f64
            };
            let fv = f(n);
            if prev_f.is_finite() && fv.is_finite() && prev_f * fv < 0.0 {
                let root = bisect(f, prev_n, n, ROOT_TOL);
                if root > 0.0 && root < n_max {
                    let e = energy(theta, root, lp)?;
                    points.push(FixedPoint {
                        theta,
                        n_zero: root,
                        energy: e,
                        stability: interior_stability(theta, root, lp),
                    });
                }
            }
            prev_n = n;
            prev_f = fv;
        }

        let ends = [0.0, n_max];
        let energies = ends.map(|n| energy(theta, n, lp).ok());
        let line_scan = (0..=200).filter_map(|k| energy(theta, n_max * k as f64 / 200.0, lp).ok());
        let (lo, hi_e) = line_scan.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| {
            (a.min(e), b.max(e))
        });
        for (n, e) in ends.into_iter().zip(energies) {
            let Some(e) = e else { continue };
            if e <= lo || e >= hi_e {
                points.push(FixedPoint {
                    theta,
                    n_zero: n,
                    energy: e,
                    stability: Stability::BoundaryExtremum,
                });
            }
        }
    }
    Ok(points)
}

/// Hessian of `E` at an interior point with `sin(theta) = 0`.
fn interior_stability(theta: f64, n0: f64, lp: &LandscapeParams) -> Stability {
    let s = lp.radicand(n0).map(f64::sqrt).unwrap_or(0.0);
    let e_tt = -lp.c_eff * n0 * s * theta.cos();
    let h = 1e-6 * n0.min(lp.n0_max() - n0).clamp(1e-9, 1.0);
    let e_nn = (d_n0(theta, n0 + h, lp) - d_n0(theta, n0 - h, lp)) / (2.0 * h);
    if e_tt * e_nn > 0.0 {
        Stability::Center
    } else {
        Stability::Saddle
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Open,
    Closed,
    Boundary,
    /// Neither closed nor winding by `tau_max`.
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// When the verdict was reached, or `tau_max`.
    pub tau: f64,
    /// Largest energy deviation seen along the integrated segment.
    pub energy_drift: f64,
}

/// Follows the pendulum orbit from `initial` until it winds, returns, hits
/// the domain edge, or `tau_max` passes.
///
/// A return is an upward crossing of the line through the start that is
/// orthogonal to the initial velocity, landing within [`EPS_RETURN`] of it.
pub fn classify_trajectory(
    lp: &LandscapeParams,
    initial: &PendulumState,
    tau_max: f64,
    config: &IntegratorConfig,
) -> Result<Classification> {
    initial.check_domain()?;
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::invalid("tau_max must be positive and finite"));
    }
    let lp = LandscapeParams {
        m_mag: initial.m_mag,
        ..*lp
    };
    let flow = PendulumFlow::new(lp);
    let y0 = [initial.theta, initial.n_zero];
    let e0 = energy(y0[0], y0[1], &lp)?;
    let (g_theta, g_n0) = gradient(y0[0], y0[1], &lp)?;
    let v0 = [2.0 * g_n0, -2.0 * g_theta];
    let speed = v0[0].hypot(v0[1]);
    if speed < 1e-14 {
        return Ok(Classification {
            verdict: Verdict::Closed,
            tau: 0.0,
            energy_drift: 0.0,
        });
    }
    let normal = [v0[0] / speed, v0[1] / speed];
    let section = |y: &[f64]| normal[0] * (y[0] - y0[0]) + normal[1] * (y[1] - y0[1]);

    let mut verdict = Verdict::Indeterminate;
    let mut tau_verdict = tau_max;
    let mut drift: f64 = 0.0;
    let mut been_behind = false;
    let mut theta_lo = y0[0];
    let mut theta_hi = y0[0];

    let solver = Solver::new(*config)?;
    let summary = solver.run(&flow, 0.0, &y0, tau_max, |step: &StepView<'_>| {
        let y = step.y_new;
        if let Ok(e) = energy(y[0], y[1], &lp) {
            drift = drift.max((e - e0).abs());
        }
        theta_lo = theta_lo.min(y[0]);
        theta_hi = theta_hi.max(y[0]);
        if (y[0] - y0[0]).abs() > TAU {
            verdict = Verdict::Open;
            tau_verdict = step.t_new;
            return Control::Stop;
        }
        let g_old = section(step.y_old);
        let g_new = section(y);
        if g_new < 0.0 {
            been_behind = true;
        }
        if been_behind && g_old < 0.0 && g_new >= 0.0 {
            let t_cross = bisect(
                |t| section(&step.interpolated(t)),
                step.t_old,
                step.t_new,
                1e-13,
            );
            let yc = step.interpolated(t_cross);
            let d_theta = yc[0] - y0[0];
            let dist = wrap_angle(d_theta).hypot(yc[1] - y0[1]);
            if dist < EPS_RETURN {
                verdict = if d_theta.abs() < PI && theta_hi - theta_lo < TAU {
                    Verdict::Closed
                } else {
                    Verdict::Open
                };
                tau_verdict = t_cross;
                return Control::Stop;
            }
            been_behind = false;
        }
        Control::Continue
    })?;
    if let Outcome::DomainExit { .. } = summary.outcome {
        verdict = Verdict::Boundary;
        tau_verdict = summary.t_final;
    }
    Ok(Classification {
        verdict,
        tau: tau_verdict,
        energy_drift: drift,
    })
}

/// Cell-centred starts in `theta` in `[-pi, pi)` and `n0` in `(0, 1)`,
/// dropping any outside the domain for `m_mag`.
pub fn start_grid(n_theta: usize, n_n0: usize, m_mag: f64) -> Vec<PendulumState> {
    let mut starts = Vec::with_capacity(n_theta * n_n0);
    for i in 0..n_theta {
        let theta = -PI + (i as f64 + 0.5) * TAU / n_theta as f64;
        for j in 0..n_n0 {
            let n0 = (j as f64 + 0.5) / n_n0 as f64;
            if let Ok(s) = PendulumState::new(theta, n0, m_mag) {
                starts.push(s);
            }
        }
    }
    starts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedStart {
    pub theta: f64,
    pub n_zero: f64,
    pub verdict: Verdict,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitSummary {
    pub params: LandscapeParams,
    pub open: usize,
    pub closed: usize,
    pub boundary: usize,
    pub indeterminate: usize,
    pub fixed_points: Vec<FixedPoint>,
    pub masked_fraction: f64,
    pub max_energy_drift: f64,
    pub starts: Vec<ClassifiedStart>,
}

pub fn contour_portrait(
    lp: &LandscapeParams,
    grid: &GridSpec,
    starts: &[PendulumState],
    tau_max: f64,
    config: &IntegratorConfig,
) -> Result<(EnergyGrid, PortraitSummary)> {
    let energies = energy_grid(lp, grid)?;
    let fixed_points = find_fixed_points(lp)?;
    let results: Vec<Result<(PendulumState, Classification)>> = starts
        .par_iter()
        .map(|s| classify_trajectory(lp, s, tau_max, config).map(|c| (*s, c)))
        .collect();
    let mut summary = PortraitSummary {
        params: *lp,
        open: 0,
        closed: 0,
        boundary: 0,
        indeterminate: 0,
        fixed_points,
        masked_fraction: energies.masked_fraction(),
        max_energy_drift: 0.0,
        starts: Vec::with_capacity(starts.len()),
    };
    for r in results {
        let (s, c) = r?;
        match c.verdict {
            Verdict::Open => summary.open += 1,
            Verdict::Closed => summary.closed += 1,
            Verdict::Boundary => summary.boundary += 1,
            Verdict::Indeterminate => summary.indeterminate += 1,
        }
        summary.max_energy_drift = summary.max_energy_drift.max(c.energy_drift);
        summary.starts.push(ClassifiedStart {
            theta: s.theta,
            n_zero: s.n_zero,
            verdict: c.verdict,
            tau: c.tau,
        });
    }
    Ok((energies, summary))
}
