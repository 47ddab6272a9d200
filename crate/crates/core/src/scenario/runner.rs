use std::fs;

use super::config::Scenario;
use super::initial::build_initial;
use super::io;
use crate::analysis::{
    blowup_bound, conservation_report, criterion_scan, determine_sign, envelope_check,
    liouville_probe, relative_zero_tol, LiouvilleClass, SignU,
};
use crate::characteristics::riccati_audit;
use crate::error::{DpError, Result};
use crate::solver::{run_tracked, Classification, OutputSchedule, RunOutput};
use crate::spectral::{Grid, PeriodicField};

/// Slack allowed between the detected breaking time and the lifespan bound.
pub const BOUND_SLACK: f64 = 0.02;

/// Number of uniformly spaced labels tracked besides the admissible points.
pub const UNIFORM_LABELS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub scenario: String,
    pub classification: Classification,
    pub t_detect: Option<f64>,
    pub x_detect: Option<f64>,
    pub horizon: f64,
    pub t_final: f64,
    pub a_star: Option<f64>,
    pub t_bound: Option<f64>,
    /// `t_detect <= t_bound + BOUND_SLACK`, for breaking runs with a bound.
    pub bound_respected: Option<bool>,
    pub min_slope: f64,
    pub tail_ratio: f64,
    pub mean_drift: f64,
    pub flow_invariant_error: f64,
    pub min_momentum: f64,
    pub liouville: LiouvilleClass,
    pub contradiction: bool,
    pub sign_u: Option<i32>,
    pub envelope_lower: Option<f64>,
    pub envelope_upper: Option<f64>,
    pub envelope_monotone: Option<f64>,
    pub riccati_di1: Option<f64>,
    pub riccati_di2: Option<f64>,
    pub riccati_bound: Option<f64>,
    pub riccati_inv_h_slope: Option<f64>,
    pub riccati_passed: Option<bool>,
}

impl RunSummary {
    /// 0 completed, 2 wave breaking, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.classification {
            Classification::Completed => 0,
            Classification::WaveBreaking => 2,
            Classification::Indeterminate => 1,
        }
    }
}

/// Everything a scenario run produces, before it is written out.
#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    pub initial: PeriodicField,
    pub labels: Vec<f64>,
    pub run: RunOutput,
    pub summary: RunSummary,
}

/// Admissible points first (best first), then uniform labels not already
/// present.
pub fn tracker_labels(u0: &PeriodicField, kappa: f64) -> Vec<f64> {
    let mut labels: Vec<f64> = criterion_scan(u0, kappa).iter().map(|h| h.a).collect();
    for j in 0..UNIFORM_LABELS {
        let a = j as f64 / UNIFORM_LABELS as f64;
        if !labels.contains(&a) {
            labels.push(a);
        }
    }
    labels
}

/// Runs the full pipeline in memory.
pub fn execute(s: &Scenario) -> Result<ScenarioOutput> {
    s.validate()?;
    let grid = Grid::new(s.solver.n)?;
    let kappa = s.kappa();
    let u0 = build_initial(&s.initial, grid)?;
    let bound = blowup_bound(&u0, kappa);
    let labels = tracker_labels(&u0, kappa);
    let schedule = OutputSchedule {
        snapshot_every: s.snapshot_every(),
        trace_every: s.trace_every(),
    };
    let run = run_tracked(&u0, &s.solver, &schedule, &labels)?;
    let report = &run.report;

    let audit = riccati_audit(&run.trace, None).ok();
    let cons = conservation_report(&run.snapshots);
    let states = || run.snapshots.iter().map(|sn| &sn.state);
    let zero_tol = relative_zero_tol(states(), kappa, s.zero_tol);
    let probe = liouville_probe(states(), kappa, zero_tol);

    // Envelope of u = v + κ, with the sign fixed by the initial data.
    let shifted = |v: &PeriodicField| v.map(|x| x + kappa);
    let sign = determine_sign(&shifted(&u0), zero_tol);
    let mut envelope: Option<(f64, f64, f64)> = None;
    if sign != SignU::Indeterminate {
        let s_int = sign.as_int().unwrap_or(0);
        for snap in &run.snapshots {
            let w = shifted(&snap.state.u);
            let (j, _) = w.argmin();
            let r = envelope_check(&w, w.grid().point(j), s_int);
            let e = envelope.get_or_insert((f64::INFINITY, f64::INFINITY, f64::INFINITY));
            e.0 = e.0.min(r.worst_lower_margin);
            e.1 = e.1.min(r.worst_upper_margin);
            e.2 = e.2.min(r.min_monotone_increment);
        }
    }

    let bound_respected = match (report.classification, report.t_detect, bound) {
        (Classification::WaveBreaking, Some(td), Some(b)) => Some(td <= b.t_bound + BOUND_SLACK),
        _ => None,
    };

    let summary = RunSummary {
        scenario: s.name.clone(),
        classification: report.classification,
        t_detect: report.t_detect,
        x_detect: report.x_detect,
        horizon: s.solver.t_end,
        t_final: report.t_final,
        a_star: bound.map(|b| b.a_star),
        t_bound: bound.map(|b| b.t_bound),
        bound_respected,
        min_slope: report.min_slope,
        tail_ratio: report.tail_ratio,
        mean_drift: cons.mean_drift,
        flow_invariant_error: cons.flow_invariant_error,
        min_momentum: cons.min_momentum,
        liouville: probe.classification,
        contradiction: probe.contradiction_indicator(report.classification),
        sign_u: sign.as_int().filter(|_| sign != SignU::Indeterminate),
        envelope_lower: envelope.map(|e| e.0),
        envelope_upper: envelope.map(|e| e.1),
        envelope_monotone: envelope.map(|e| e.2),
        riccati_di1: audit.as_ref().map(|a| a.min_di1),
        riccati_di2: audit.as_ref().map(|a| a.min_di2),
        riccati_bound: audit.as_ref().and_then(|a| a.min_bound_margin),
        riccati_inv_h_slope: audit.as_ref().and_then(|a| a.max_inv_h_slope),
        riccati_passed: audit.as_ref().map(|a| a.passed()),
    };

    Ok(ScenarioOutput {
        initial: u0,
        labels,
        run,
        summary,
    })
}

/// Runs the scenario and writes `fields.csv`, `trace.csv` and
/// `summary.csv` into its output directory.
pub fn run_scenario(s: &Scenario) -> Result<RunSummary> {
    let out = execute(s)?;
    let dir = s.output_dir();
    fs::create_dir_all(&dir).map_err(|e| DpError::io(&dir, e))?;
    io::write(&dir, "fields.csv", &io::fields_csv(&out.run.snapshots))?;
    io::write(&dir, "trace.csv", &io::trace_csv(&out.run.trace))?;
    io::write(&dir, "summary.csv", &io::summary_csv(&out.summary))?;
    Ok(out.summary)
}
