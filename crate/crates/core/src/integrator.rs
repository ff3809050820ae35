//! Explicit Runge-Kutta integration with dense output.
//!
//! The default method is the Dormand-Prince 5(4) embedded pair with
//! a max-norm error estimate and Hairer's fourth-order continuous
//! extension. A fixed-step classical RK4 (`method_order = 4`, step
//! `max_step`) is kept for cross-checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A first-order system `dy/dt = f(t, y)`.
///
/// `derivative` returns a domain error when `y` leaves the region where
/// the right-hand side is defined. The solver answers by shrinking the
/// step; if that cannot make progress the run ends with
/// [`Outcome::DomainExit`].
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn derivative(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on |h|, in tau units. Also the RK4 step.
    pub max_step: f64,
    /// 5: adaptive Dormand-Prince 5(4). 4: fixed-step RK4.
    pub method_order: u8,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1.0,
            method_order: 5,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(Error::invalid(format!(
                    "{name} must lie in (0, 1e-2], got {tol}"
                )));
            }
        }
        if !(self.max_step > 0.0) {
            return Err(Error::invalid(format!(
                "max_step must be positive, got {}",
                self.max_step
            )));
        }
        if self.method_order != 4 && self.method_order != 5 {
            return Err(Error::invalid(format!(
                "method_order must be 4 (fixed RK4) or 5 (Dormand-Prince), got {}",
                self.method_order
            )));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

enum Dense<'a> {
    /// Hairer's `rcont1..rcont5`.
    Dopri(&'a [Vec<f64>; 5]),
    /// Cubic Hermite from endpoint values and slopes.
    Hermite { f_old: &'a [f64], f_new: &'a [f64] },
}

/// One accepted step, with access to the continuous extension.
pub struct StepView<'a> {
    pub t_old: f64,
    pub t_new: f64,
    pub y_old: &'a [f64],
    pub y_new: &'a [f64],
    dense: Dense<'a>,
}

impl StepView<'_> {
    /// Evaluates the interpolant at `t` (expected inside the step).
    pub fn interpolate(&self, t: f64, out: &mut [f64]) {
        let h = self.t_new - self.t_old;
        let s = if h == 0.0 { 1.0 } else { (t - self.t_old) / h };
        let s1 = 1.0 - s;
        match self.dense {
            Dense::Dopri(r) => {
                for i in 0..out.len() {
                    out[i] =
                        r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
                }
            }
            Dense::Hermite { f_old, f_new } => {
                let h00 = (1.0 + 2.0 * s) * s1 * s1;
                let h10 = s * s1 * s1;
                let h01 = s * s * (3.0 - 2.0 * s);
                let h11 = -s * s * s1;
                for i in 0..out.len() {
                    out[i] = h00 * self.y_old[i]
                        + h10 * h * f_old[i]
                        + h01 * self.y_new[i]
                        + h11 * h * f_new[i];
                }
            }
        }
    }

    pub fn interpolated(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.y_new.len()];
        self.interpolate(t, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// Reached `t_end`.
    Completed,
    /// The observer asked to stop.
    Stopped,
    /// The right-hand side rejected every step near `t`.
    DomainExit { message: String },
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub t_final: f64,
    pub y_final: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Solver {
    config: IntegratorConfig,
}

impl Solver {
    pub fn new(config: IntegratorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    /// Integrates from `t0` to `t_end` (either direction), calling
    /// `observer` after every accepted step.
    pub fn run<S, F>(
        &self,
        sys: &S,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        mut observer: F,
    ) -> Result<RunSummary>
    where
        S: OdeSystem + ?Sized,
        F: FnMut(&StepView<'_>) -> Control,
    {
        let n = sys.dim();
        if y0.len() != n {
            return Err(Error::invalid(format!(
                "initial state has {} components, system expects {n}",
                y0.len()
            )));
        }
        if !t0.is_finite() || !t_end.is_finite() {
            return Err(Error::invalid("integration bounds must be finite"));
        }
        let mut work = Workspace::new(n);
        let mut y = y0.to_vec();
        let mut summary = RunSummary {
            outcome: Outcome::Completed,
            t_final: t0,
            y_final: y.clone(),
            accepted_steps: 0,
            rejected_steps: 0,
        };
        if t_end == t0 {
            return Ok(summary);
        }
        if let Err(e) = sys.derivative(t0, &y, &mut work.k[0]) {
            return domain_exit(summary, e);
        }
        match self.config.method_order {
            4 => self.run_rk4(
                sys,
                t0,
                &mut y,
                t_end,
                &mut work,
                &mut summary,
                &mut observer,
            )?,
            _ => self.run_dopri(
                sys,
                t0,
                &mut y,
                t_end,
                &mut work,
                &mut summary,
                &mut observer,
            )?,
        }
        Ok(summary)
    }

    #[allow(clippy::too_many_arguments)]
    fn run_dopri<S, F>(
        &self,
        sys: &S,
        t0: f64,
        y: &mut Vec<f64>,
        t_end: f64,
        w: &mut Workspace,
        summary: &mut RunSummary,
        observer: &mut F,
    ) -> Result<()>
    where
        S: OdeSystem + ?Sized,
        F: FnMut(&StepView<'_>) -> Control,
    {
        let cfg = self.config;
        let dir = (t_end - t0).signum();
        let n = y.len();
        let mut t = t0;
        let mut h = self.initial_step(sys, t0, y, t_end, w) * dir;
        let mut last_rejected = false;
        let mut last_domain: Option<Error> = None;

        loop {
            let remaining = t_end - t;
            let mut last = false;
            if (h.abs() >= remaining.abs()) || ((t + h - t_end) * dir > 0.0) {
                h = remaining;
                last = true;
            }
            let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
            if h.abs() < h_min && !last {
                summary.t_final = t;
                summary.y_final = y.clone();
                if let Some(err) = last_domain.take() {
                    return domain_exit_into(summary, err);
                }
                return Err(Error::StepUnderflow { tau: t, step: h });
            }

            match self.dopri_attempt(sys, t, y, h, w) {
                Err(e) if matches!(e, Error::Domain(_)) => {
                    summary.rejected_steps += 1;
                    last_domain = Some(e);
                    h *= 0.25;
                    last_rejected = true;
                    continue;
                }
                Err(e) => return Err(e),
                Ok(err) => {
                    if !err.is_finite() || err > 1.0 {
                        summary.rejected_steps += 1;
                        if !err.is_finite() && h.abs() < h_min * 4.0 {
                            return Err(Error::NonFinite { tau: t });
                        }
                        let fac = if err.is_finite() {
                            (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
                        } else {
                            0.2
                        };
                        h *= fac;
                        last_rejected = true;
                        continue;
                    }
                    last_domain = None;

                    // dense output coefficients
                    let t_new = if last { t_end } else { t + h };
                    for i in 0..n {
                        let ydiff = w.y_new[i] - y[i];
                        let bspl = h * w.k[0][i] - ydiff;
                        w.cont[0][i] = y[i];
                        w.cont[1][i] = ydiff;
                        w.cont[2][i] = bspl;
                        w.cont[3][i] = ydiff - h * w.k[6][i] - bspl;
                        w.cont[4][i] = h
                            * (D[0] * w.k[0][i]
                                + D[2] * w.k[2][i]
                                + D[3] * w.k[3][i]
                                + D[4] * w.k[4][i]
                                + D[5] * w.k[5][i]
                                + D[6] * w.k[6][i]);
                    }
                    summary.accepted_steps += 1;
                    let control = {
                        let view = StepView {
                            t_old: t,
                            t_new,
                            y_old: y,
                            y_new: &w.y_new,
                            dense: Dense::Dopri(&w.cont),
                        };
                        observer(&view)
                    };
                    // FSAL
                    w.k.swap(0, 6);
                    y.copy_from_slice(&w.y_new);
                    t = t_new;
                    summary.t_final = t;
                    if control == Control::Stop {
                        summary.outcome = Outcome::Stopped;
                        summary.y_final = y.clone();
                        return Ok(());
                    }
                    if last {
                        summary.outcome = Outcome::Completed;
                        summary.y_final = y.clone();
                        return Ok(());
                    }
                    let mut fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
                    if last_rejected {
                        fac = fac.min(1.0);
                    }
                    last_rejected = false;
                    h = (h * fac).abs().min(cfg.max_step) * dir;
                }
            }
        }
    }

    /// One trial step. Returns the scaled error norm; stage values and the
    /// fifth-order solution are left in the workspace. Expects `w.k[0]` to
    /// hold `f(t, y)`.
    fn dopri_attempt<S: OdeSystem + ?Sized>(
        &self,
        sys: &S,
        t: f64,
        y: &[f64],
        h: f64,
        w: &mut Workspace,
    ) -> Result<f64> {
        let n = y.len();
        for stage in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..stage {
                    acc += A[stage][j] * w.k[j][i];
                }
                w.y_stage[i] = y[i] + h * acc;
            }
            if stage == 6 {
                w.y_new.copy_from_slice(&w.y_stage);
                if w.y_new.iter().any(|v| !v.is_finite()) {
                    return Ok(f64::INFINITY);
                }
            }
            sys.derivative(t + C[stage] * h, &w.y_stage, &mut w.k[stage])?;
        }
        let cfg = self.config;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, ej) in E.iter().enumerate() {
                e += ej * w.k[j][i];
            }
            let sk = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(w.y_new[i].abs());
            worst = worst.max((h * e / sk).abs());
        }
        Ok(worst)
    }

    fn initial_step<S: OdeSystem + ?Sized>(
        &self,
        sys: &S,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        w: &mut Workspace,
    ) -> f64 {
        let cfg = self.config;
        let n = y0.len();
        let span = (t_end - t0).abs();
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..n {
            let sk = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
            d0 += (y0[i] / sk).powi(2);
            d1 += (w.k[0][i] / sk).powi(2);
        }
        d0 = (d0 / n as f64).sqrt();
        d1 = (d1 / n as f64).sqrt();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(cfg.max_step).min(span);
        let dir = (t_end - t0).signum();
        for i in 0..n {
            w.y_stage[i] = y0[i] + dir * h0 * w.k[0][i];
        }
        let mut d2 = 0.0;
        if sys
            .derivative(t0 + dir * h0, &w.y_stage, &mut w.k[1])
            .is_ok()
        {
            for i in 0..n {
                let sk = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
                d2 += ((w.k[1][i] - w.k[0][i]) / sk).powi(2);
            }
            d2 = (d2 / n as f64).sqrt() / h0;
        }
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(cfg.max_step).min(span)
    }

    #[allow(clippy::too_many_arguments)]
    fn run_rk4<S, F>(
        &self,
        sys: &S,
        t0: f64,
        y: &mut Vec<f64>,
        t_end: f64,
        w: &mut Workspace,
        summary: &mut RunSummary,
        observer: &mut F,
    ) -> Result<()>
    where
        S: OdeSystem + ?Sized,
        F: FnMut(&StepView<'_>) -> Control,
    {
        let n = y.len();
        let span = t_end - t0;
        let steps = (span.abs() / self.config.max_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        let mut t = t0;
        for step in 0..steps {
            let t_new = if step + 1 == steps {
                t_end
            } else {
                t0 + (step + 1) as f64 * h
            };
            let result = (|| -> Result<()> {
                for i in 0..n {
                    w.y_stage[i] = y[i] + 0.5 * h * w.k[0][i];
                }
                sys.derivative(t + 0.5 * h, &w.y_stage, &mut w.k[1])?;
                for i in 0..n {
                    w.y_stage[i] = y[i] + 0.5 * h * w.k[1][i];
                }
                sys.derivative(t + 0.5 * h, &w.y_stage, &mut w.k[2])?;
                for i in 0..n {
                    w.y_stage[i] = y[i] + h * w.k[2][i];
                }
                sys.derivative(t + h, &w.y_stage, &mut w.k[3])?;
                for i in 0..n {
                    w.y_new[i] = y[i]
                        + h / 6.0 * (w.k[0][i] + 2.0 * w.k[1][i] + 2.0 * w.k[2][i] + w.k[3][i]);
                }
                sys.derivative(t_new, &w.y_new, &mut w.k[4])
            })();
            if let Err(e) = result {
                summary.t_final = t;
                summary.y_final = y.clone();
                return domain_exit_into(summary, e);
            }
            if w.y_new.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { tau: t_new });
            }
            summary.accepted_steps += 1;
            let control = {
                let view = StepView {
                    t_old: t,
                    t_new,
                    y_old: y,
                    y_new: &w.y_new,
                    dense: Dense::Hermite {
                        f_old: &w.k[0],
                        f_new: &w.k[4],
                    },
                };
                observer(&view)
            };
            w.k.swap(0, 4);
            y.copy_from_slice(&w.y_new);
            t = t_new;
            summary.t_final = t;
            if control == Control::Stop {
                summary.outcome = Outcome::Stopped;
                summary.y_final = y.clone();
                return Ok(());
            }
        }
        summary.outcome = Outcome::Completed;
        summary.y_final = y.clone();
        Ok(())
    }
}

fn domain_exit(mut summary: RunSummary, err: Error) -> Result<RunSummary> {
    domain_exit_into(&mut summary, err)?;
    Ok(summary)
}

fn domain_exit_into(summary: &mut RunSummary, err: Error) -> Result<()> {
    match err {
        Error::Domain(message) => {
            summary.outcome = Outcome::DomainExit { message };
            Ok(())
        }
        other => Err(other),
    }
}

struct Workspace {
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    cont: [Vec<f64>; 5],
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            y_stage: vec![0.0; n],
            y_new: vec![0.0; n],
            cont: std::array::from_fn(|_| vec![0.0; n]),
        }
    }
}

/// States on a requested time grid.
#[derive(Debug, Clone)]
pub struct SampledRun {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub summary: RunSummary,
}

/// Integrates from `t0` through every point of `grid` (monotone in the
/// direction of integration, all on the same side of `t0`), recording the
/// dense-output state at each grid point.
pub fn integrate_on_grid<S: OdeSystem + ?Sized>(
    solver: &Solver,
    sys: &S,
    t0: f64,
    y0: &[f64],
    grid: &[f64],
) -> Result<SampledRun> {
    let t_end = *grid
        .last()
        .ok_or_else(|| Error::invalid("sampling grid is empty"))?;
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    for pair in grid.windows(2) {
        if (pair[1] - pair[0]) * dir <= 0.0 {
            return Err(Error::invalid(
                "sampling grid must be strictly monotone in the integration direction",
            ));
        }
    }
    if (grid[0] - t0) * dir < 0.0 {
        return Err(Error::invalid(
            "sampling grid starts before the initial time",
        ));
    }
    let mut times = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    let mut next = 0;
    while next < grid.len() && grid[next] == t0 {
        times.push(t0);
        states.push(y0.to_vec());
        next += 1;
    }
    let summary = solver.run(sys, t0, y0, t_end, |step| {
        while next < grid.len() && (grid[next] - step.t_new) * dir <= 0.0 {
            let t = grid[next];
            let y = if t == step.t_new {
                step.y_new.to_vec()
            } else {
                step.interpolated(t)
            };
            times.push(t);
            states.push(y);
            next += 1;
        }
        Control::Continue
    })?;
    Ok(SampledRun {
        times,
        states,
        summary,
    })
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![end],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i + 1 == n {
                        end
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Decay;
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn derivative(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
            dydt[0] = -y[0];
            Ok(())
        }
    }

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn derivative(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
            dydt[0] = y[1];
            dydt[1] = -y[0];
            Ok(())
        }
    }

    /// dy/dt = -1 defined only for y > 0.
    struct Wall;
    impl OdeSystem for Wall {
        fn dim(&self) -> usize {
            1
        }
        fn derivative(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
            if y[0] <= 0.0 {
                return Err(Error::domain("y <= 0"));
            }
            dydt[0] = -1.0;
            Ok(())
        }
    }

    #[test]
    fn exponential_decay() {
        let solver = Solver::new(IntegratorConfig::default()).unwrap();
        let s = solver
            .run(&Decay, 0.0, &[1.0], 5.0, |_| Control::Continue)
            .unwrap();
        assert_eq!(s.outcome, Outcome::Completed);
        assert_eq!(s.t_final, 5.0);
        assert_relative_eq!(s.y_final[0], (-5.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn backward_integration() {
        let solver = Solver::new(IntegratorConfig::default()).unwrap();
        let s = solver
            .run(&Decay, 2.0, &[1.0], 0.0, |_| Control::Continue)
            .unwrap();
        assert_relative_eq!(s.y_final[0], 2.0f64.exp(), max_relative = 1e-9);
    }

    #[test]
    fn dense_output_matches_exact_solution() {
        let solver = Solver::new(IntegratorConfig {
            max_step: 10.0,
            ..IntegratorConfig::with_tolerances(1e-9, 1e-12)
        })
        .unwrap();
        let grid = linspace(0.0, 20.0, 401);
        let run = integrate_on_grid(&solver, &Oscillator, 0.0, &[1.0, 0.0], &grid).unwrap();
        assert_eq!(run.times.len(), grid.len());
        for (t, y) in run.times.iter().zip(&run.states) {
            assert!(
                (y[0] - t.cos()).abs() < 1e-7,
                "t = {t}: {} vs {}",
                y[0],
                t.cos()
            );
        }
        assert!(
            run.summary.accepted_steps < 1000,
            "{} steps",
            run.summary.accepted_steps
        );
    }

    #[test]
    fn rk4_fixed_step() {
        let cfg = IntegratorConfig {
            max_step: 0.01,
            method_order: 4,
            ..IntegratorConfig::default()
        };
        let solver = Solver::new(cfg).unwrap();
        let grid = linspace(0.0, 3.0, 31);
        let run = integrate_on_grid(&solver, &Oscillator, 0.0, &[1.0, 0.0], &grid).unwrap();
        assert_eq!(run.summary.accepted_steps, 300);
        for (t, y) in run.times.iter().zip(&run.states) {
            assert!((y[0] - t.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn domain_exit_is_reported() {
        let solver = Solver::new(IntegratorConfig::default()).unwrap();
        let s = solver
            .run(&Wall, 0.0, &[1.0], 5.0, |_| Control::Continue)
            .unwrap();
        assert!(matches!(s.outcome, Outcome::DomainExit { .. }));
        assert!((s.t_final - 1.0).abs() < 1e-6, "stopped at {}", s.t_final);
    }

    #[test]
    fn observer_can_stop() {
        let solver = Solver::new(IntegratorConfig::default()).unwrap();
        let s = solver
            .run(&Decay, 0.0, &[1.0], 100.0, |step| {
                if step.t_new > 1.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            })
            .unwrap();
        assert_eq!(s.outcome, Outcome::Stopped);
        assert!(s.t_final > 1.0 && s.t_final < 100.0);
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::with_tolerances(0.0, 1e-12)
            .validate()
            .is_err());
        assert!(IntegratorConfig::with_tolerances(0.1, 1e-12)
            .validate()
            .is_err());
        assert!(IntegratorConfig {
            method_order: 3,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(IntegratorConfig::default().validate().is_ok());
    }

    #[test]
    fn grid_must_be_monotone() {
        let solver = Solver::new(IntegratorConfig::default()).unwrap();
        assert!(integrate_on_grid(&solver, &Decay, 0.0, &[1.0], &[0.0, 2.0, 1.0]).is_err());
        assert!(integrate_on_grid(&solver, &Decay, 0.0, &[1.0], &[]).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-1.0, 2.0, 4);
        assert_eq!(g, vec![-1.0, 0.0, 1.0, 2.0]);
    }
}
