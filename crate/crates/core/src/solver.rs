//! Pseudospectral integration of the periodic Degasperis-Procesi equation
//! with dispersion,
//!
//! ```text
//! v_t + v v_x + ∂x p * (3/2 v² + 3κ v) = 0,
//! ```
//!
//! using classical RK4 and a slope / resolution based wave-breaking
//! detector.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::characteristics::{advance_flow, CharTracker, StageVelocities, TraceRow};
use crate::error::{DpError, Result};
use crate::spectral::{d2dx2, ddx, Grid, Interpolant, PeriodicField, SpectralField};

const TWO_PI: f64 = 2.0 * PI;

/// Hard cap on the number of steps in one run.
const MAX_STEPS: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub n: usize,
    pub kappa: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub dt_max: f64,
    /// Breaking is declared once `min u_x <= -slope_max`.
    pub slope_max: f64,
    /// ... or once the upper third of the active band holds more than this
    /// fraction of the energy of `u_x`.
    pub tail_max: f64,
    pub dealias: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n: 256,
            kappa: 0.0,
            t_end: 1.0,
            cfl: 0.3,
            dt_max: 1e-3,
            slope_max: 1e3,
            tail_max: 0.1,
            dealias: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        Grid::new(self.n)?;
        let bad = |m: &str| Err(DpError::InvalidConfig(m.to_string()));
        if !self.kappa.is_finite() {
            return bad("kappa must be finite");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive");
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl must lie in (0, 1]");
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return bad("dt_max must be positive");
        }
        if self.slope_max.is_nan() || self.slope_max <= 0.0 {
            return bad("slope_max must be positive");
        }
        if !(self.tail_max > 0.0 && self.tail_max < 1.0) {
            return bad("tail_max must lie in (0, 1)");
        }
        Ok(())
    }

    pub fn system(&self) -> DpSystem {
        DpSystem {
            kappa: self.kappa,
            dealias: self.dealias,
        }
    }

    /// `min(dt_max, cfl / (n max(1, max|u|)))`.
    pub fn adaptive_dt(&self, u: &PeriodicField) -> f64 {
        let speed = u.max_abs().max(1.0);
        self.dt_max.min(self.cfl / (self.n as f64 * speed))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub u: PeriodicField,
    pub dt: f64,
    pub step_count: u64,
}

impl SolverState {
    pub fn initial(u: PeriodicField) -> Self {
        SolverState {
            t: 0.0,
            u,
            dt: 0.0,
            step_count: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Completed,
    WaveBreaking,
    Indeterminate,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Completed => "completed",
            Classification::WaveBreaking => "wave_breaking",
            Classification::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupReport {
    pub classification: Classification,
    /// Last resolved time before breaking was declared.
    pub t_detect: Option<f64>,
    /// Location of the most negative slope when breaking was declared.
    pub x_detect: Option<f64>,
    /// Most negative `u_x` observed.
    pub min_slope: f64,
    pub tail_ratio: f64,
    /// Time of the last accepted state.
    pub t_final: f64,
    pub steps: u64,
    pub message: Option<String>,
}

/// Right-hand side of the semi-discrete equation for fixed `κ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpSystem {
    pub kappa: f64,
    pub dealias: bool,
}

impl DpSystem {
    pub fn new(kappa: f64) -> Self {
        DpSystem {
            kappa,
            dealias: true,
        }
    }

    pub fn rhs(&self, u: &PeriodicField) -> PeriodicField {
        rhs(u, self.kappa, self.dealias)
    }

    /// One RK4 step. Also returns the four stage inputs, which the flow map
    /// integrator needs to stay consistent with the field update.
    pub fn step_with_stages(
        &self,
        state: &SolverState,
        dt: f64,
    ) -> Result<(SolverState, [PeriodicField; 4])> {
        assert!(dt >= 0.0, "negative step");
        let u1 = state.u.clone();
        if dt == 0.0 {
            return Ok((state.clone(), [u1.clone(), u1.clone(), u1.clone(), u1]));
        }
        let half = 0.5 * dt;
        let check = |f: PeriodicField, stage: usize, t: f64| {
            if f.is_finite() {
                Ok(f)
            } else {
                Err(DpError::Breakdown { stage, t })
            }
        };
        let k1 = check(self.rhs(&u1), 1, state.t)?;
        let u2 = u1.axpy(half, &k1);
        let k2 = check(self.rhs(&u2), 2, state.t + half)?;
        let u3 = u1.axpy(half, &k2);
        let k3 = check(self.rhs(&u3), 3, state.t + half)?;
        let u4 = u1.axpy(dt, &k3);
        let k4 = check(self.rhs(&u4), 4, state.t + dt)?;

        let w = dt / 6.0;
        let values = u1
            .values()
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                v + w * (k1.values()[j] + 2.0 * k2.values()[j] + 2.0 * k3.values()[j] + k4.values()[j])
            })
            .collect();
        let u = check(PeriodicField::from_raw(u1.grid(), values), 4, state.t + dt)?;
        let next = SolverState {
            t: state.t + dt,
            u,
            dt,
            step_count: state.step_count + 1,
        };
        Ok((next, [u1, u2, u3, u4]))
    }

    pub fn step(&self, state: &SolverState, dt: f64) -> Result<SolverState> {
        self.step_with_stages(state, dt).map(|(s, _)| s)
    }
}

/// `-u u_x - ∂x p * (3/2 u² + 3κ u)`, evaluated in flux form
/// `-∂x [u²/2 + p * (3/2 u²) + 3κ p * u]`.
///
/// With `dealias` the square is formed from the modes `|k| <= K` of the
/// 2/3 rule and the whole tendency is band-limited to `|k| <= K`.
pub fn rhs(u: &PeriodicField, kappa: f64, dealias: bool) -> PeriodicField {
    let grid = u.grid();
    let cutoff = grid.dealias_cutoff();
    let u_hat = SpectralField::forward(u);
    let square = if dealias {
        let mut filtered = u_hat.clone();
        filtered.truncate(cutoff);
        filtered.inverse().map(|v| v * v)
    } else {
        u.map(|v| v * v)
    };
    let w_hat = SpectralField::forward(&square);
    let (uc, wc) = (u_hat.coeffs(), w_hat.coeffs());
    let ny = grid.nyquist_index();
    let coeffs = (0..grid.n())
        .map(|j| {
            let k = grid.wavenumber(j);
            if j == ny || (dealias && k.unsigned_abs() as usize > cutoff) {
                return Complex64::new(0.0, 0.0);
            }
            let kw = TWO_PI * k as f64;
            let helm = 1.0 / (1.0 + kw * kw);
            let flux = wc[j] * (0.5 + 1.5 * helm) + uc[j] * (3.0 * kappa * helm);
            Complex64::new(0.0, -kw) * flux
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs).inverse()
}

/// Momentum `y = u - u_xx`.
pub fn momentum(u: &PeriodicField) -> PeriodicField {
    let uxx = d2dx2(u);
    u.axpy(-1.0, &uxx)
}

/// Slope and resolution diagnostics used by the breaking detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeDiagnostics {
    pub min_slope: f64,
    pub x_min_slope: f64,
    pub tail_ratio: f64,
}

pub fn slope_diagnostics(u: &PeriodicField, dealias: bool) -> SlopeDiagnostics {
    let grid = u.grid();
    let ux = ddx(u);
    let (j, min_slope) = ux.argmin();
    let hat = SpectralField::forward(u);
    let top = if dealias {
        grid.dealias_cutoff()
    } else {
        grid.n() / 2
    };
    let total = hat.slope_band_energy(0, top);
    let tail = hat.slope_band_energy(2 * top / 3, top);
    // Slopes at round-off level carry no resolution information.
    let floor = 1e-26 * hat.band_energy(0, top).max(hat.coeffs()[0].norm_sqr()).max(1.0);
    let tail_ratio = if total > floor { tail / total } else { 0.0 };
    SlopeDiagnostics {
        min_slope,
        x_min_slope: grid.point(j),
        tail_ratio,
    }
}

/// Output cadence of a run. Steps are shortened to land on every output
/// time exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputSchedule {
    pub snapshot_every: f64,
    pub trace_every: f64,
}

impl OutputSchedule {
    /// 50 uniform snapshots and trace samples over the horizon.
    pub fn uniform(t_end: f64) -> Self {
        OutputSchedule {
            snapshot_every: t_end / 50.0,
            trace_every: t_end / 50.0,
        }
    }
}

/// A stored state together with the characteristic trackers at that time.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub state: SolverState,
    pub trackers: Vec<CharTracker>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub trace: Vec<TraceRow>,
    pub report: BlowupReport,
}

/// Integrates from `u0` with the default schedule and no trackers.
pub fn run(u0: &PeriodicField, config: &SolverConfig) -> Result<RunOutput> {
    run_tracked(u0, config, &OutputSchedule::uniform(config.t_end), &[])
}

struct Clock {
    every: f64,
    next: u64,
}

impl Clock {
    fn new(every: f64) -> Self {
        Clock { every, next: 1 }
    }

    fn target(&self, t_end: f64) -> f64 {
        (self.next as f64 * self.every).min(t_end)
    }

    /// True (and advances) if `t` is an output time.
    fn fire(&mut self, t: f64, t_end: f64) -> bool {
        let target = self.target(t_end);
        if t >= target - 1e-12 * target.max(1.0) {
            while self.target(t_end) <= t + 1e-12 * t.max(1.0) && self.target(t_end) < t_end {
                self.next += 1;
            }
            if t >= t_end {
                self.next = u64::MAX / 2;
            }
            true
        } else {
            false
        }
    }
}

/// Integrates from `u0`, advancing characteristics that start at `labels`
/// alongside the field. Stops at `t_end`, at declared wave breaking, or at
/// numerical breakdown.
pub fn run_tracked(
    u0: &PeriodicField,
    config: &SolverConfig,
    schedule: &OutputSchedule,
    labels: &[f64],
) -> Result<RunOutput> {
    config.validate()?;
    if u0.n() != config.n {
        return Err(DpError::LengthMismatch {
            expected: config.n,
            got: u0.n(),
        });
    }
    if !(schedule.snapshot_every > 0.0 && schedule.trace_every > 0.0) {
        return Err(DpError::InvalidConfig("output cadences must be positive".into()));
    }
    let system = config.system();
    let t_end = config.t_end;

    let ip0 = Interpolant::new(u0);
    let mut trackers: Vec<CharTracker> = labels.iter().map(|&a| CharTracker::seed(a, &ip0)).collect();
    let mut state = SolverState::initial(u0.clone());
    let mut snapshots = vec![Snapshot {
        state: state.clone(),
        trackers: trackers.clone(),
    }];
    let mut trace: Vec<TraceRow> = trackers.iter().map(|tr| tr.row(0.0)).collect();
    let mut snap_clock = Clock::new(schedule.snapshot_every);
    let mut trace_clock = Clock::new(schedule.trace_every);

    let diag0 = slope_diagnostics(u0, config.dealias);
    let mut min_slope = diag0.min_slope;
    let breaking = |d: &SlopeDiagnostics| d.min_slope <= -config.slope_max || d.tail_ratio > config.tail_max;

    let mut report = BlowupReport {
        classification: Classification::Completed,
        t_detect: None,
        x_detect: None,
        min_slope,
        tail_ratio: diag0.tail_ratio,
        t_final: 0.0,
        steps: 0,
        message: None,
    };
    if breaking(&diag0) {
        report.classification = Classification::WaveBreaking;
        report.t_detect = Some(0.0);
        report.x_detect = Some(diag0.x_min_slope);
        return Ok(RunOutput {
            snapshots,
            trace,
            report,
        });
    }

    let mut last_tail = diag0.tail_ratio;
    loop {
        if state.t >= t_end {
            break;
        }
        if state.step_count >= MAX_STEPS {
            report.classification = Classification::Indeterminate;
            report.message = Some(format!("step limit {MAX_STEPS} reached"));
            break;
        }
        let target = snap_clock.target(t_end).min(trace_clock.target(t_end));
        let gap = target - state.t;
        let dt_adapt = config.adaptive_dt(&state.u);
        let (dt, lands) = if dt_adapt >= gap - 1e-14 {
            (gap, true)
        } else {
            (dt_adapt, false)
        };

        let (mut next, stages) = match system.step_with_stages(&state, dt) {
            Ok(r) => r,
            Err(e) => {
                report.classification = Classification::Indeterminate;
                report.message = Some(e.to_string());
                break;
            }
        };
        if lands {
            next.t = target;
        }
        if !trackers.is_empty() {
            let vel = StageVelocities::new([&stages[0], &stages[1], &stages[2], &stages[3]], &next.u);
            match advance_flow(&vel, &trackers, dt) {
                Ok(t) => trackers = t,
                Err(e) => {
                    report.classification = Classification::Indeterminate;
                    report.message = Some(e.to_string());
                    break;
                }
            }
        }

        let diag = slope_diagnostics(&next.u, config.dealias);
        min_slope = min_slope.min(diag.min_slope);
        last_tail = diag.tail_ratio;
        if breaking(&diag) {
            report.classification = Classification::WaveBreaking;
            report.t_detect = Some(state.t);
            report.x_detect = Some(diag.x_min_slope);
            break;
        }
        state = next;

        if snap_clock.fire(state.t, t_end) {
            snapshots.push(Snapshot {
                state: state.clone(),
                trackers: trackers.clone(),
            });
        }
        if trace_clock.fire(state.t, t_end) {
            trace.extend(trackers.iter().map(|tr| tr.row(state.t)));
        }
    }

    // Keep the last resolved state even when it is off-cadence.
    if snapshots.last().is_none_or(|s| s.state.t != state.t) {
        snapshots.push(Snapshot {
            state: state.clone(),
            trackers: trackers.clone(),
        });
    }
    if !trackers.is_empty() && trace.last().is_none_or(|r| r.t != state.t) {
        trace.extend(trackers.iter().map(|tr| tr.row(state.t)));
    }

    report.min_slope = min_slope;
    report.tail_ratio = last_tail;
    report.t_final = state.t;
    report.steps = state.step_count;
    Ok(RunOutput {
        snapshots,
        trace,
        report,
    })
}
