//! Characteristics of the velocity field: the flow map `q_t = u(t, q)`,
//! its spatial derivative `q_x`, and the quantities
//!
//! ```text
//! f = -u_x + √(3/2) u,   g = -(u_x + √(3/2) u),   h = √(f g)
//! ```
//!
//! evaluated along each characteristic. Along any characteristic of a smooth
//! solution `f' >= f g` and `g' >= f g`; once `f, g > 0` this forces
//! `(1/h)' <= -1`, so the lifespan is at most `1/h(0)`. [`riccati_audit`]
//! checks these inequalities on a recorded trace.

use std::collections::HashMap;

use crate::error::{DpError, Result};
use crate::spectral::{Interpolant, PeriodicField};

pub(crate) const SQRT_3_2: f64 = 1.224_744_871_391_589;

/// State of one characteristic, labelled by its starting point `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharTracker {
    pub a: f64,
    pub q: f64,
    pub qx: f64,
    pub f: f64,
    pub g: f64,
    /// `√(f g)` when `f g >= 0`, otherwise undefined.
    pub h: Option<f64>,
}

impl CharTracker {
    /// Tracker at `q(0, a) = a`, `q_x = 1`, with `f, g, h` taken from `u0`.
    pub fn seed(a: f64, u0: &Interpolant) -> Self {
        let (f, g, h) = fgh_at(u0, a);
        CharTracker {
            a,
            q: a,
            qx: 1.0,
            f,
            g,
            h,
        }
    }

    pub fn refresh(&mut self, u: &Interpolant) {
        let (f, g, h) = fgh_at(u, self.q);
        self.f = f;
        self.g = g;
        self.h = h;
    }

    pub fn row(&self, t: f64) -> TraceRow {
        TraceRow {
            t,
            a: self.a,
            q: self.q,
            qx: self.qx,
            f: self.f,
            g: self.g,
            h: self.h,
        }
    }
}

pub(crate) fn h_from(f: f64, g: f64) -> Option<f64> {
    let fg = f * g;
    (fg >= 0.0).then(|| fg.sqrt())
}

/// `(f, g, h)` at position `q` from a prepared interpolant.
pub fn fgh_at(u: &Interpolant, q: f64) -> (f64, f64, Option<f64>) {
    let (v, vx) = u.eval_with_derivative(q);
    let f = -vx + SQRT_3_2 * v;
    let g = -(vx + SQRT_3_2 * v);
    (f, g, h_from(f, g))
}

/// `(f, g, h)` of the field `u` at position `q`.
pub fn fgh(u: &PeriodicField, q: f64) -> (f64, f64, Option<f64>) {
    fgh_at(&Interpolant::new(u), q)
}

/// Velocities seen by the four RK4 stages of one solver step, plus the
/// velocity at the end of the step (used to refresh `f, g, h`).
#[derive(Clone, Debug)]
pub struct StageVelocities {
    stages: [Interpolant; 4],
    end: Interpolant,
}

impl StageVelocities {
    pub fn new(stages: [&PeriodicField; 4], end: &PeriodicField) -> Self {
        StageVelocities {
            stages: stages.map(Interpolant::new),
            end: Interpolant::new(end),
        }
    }

    /// A velocity held fixed over the step.
    pub fn frozen(u: &PeriodicField) -> Self {
        let ip = Interpolant::new(u);
        StageVelocities {
            stages: [ip.clone(), ip.clone(), ip.clone(), ip.clone()],
            end: ip,
        }
    }

    pub fn end(&self) -> &Interpolant {
        &self.end
    }
}

/// Advances `(q, q_x)` of every tracker by one RK4 step of size `dt`,
/// using `q_t = u(t, q)` and `(q_x)_t = u_x(t, q) q_x`, then refreshes
/// `f, g, h` with the end-of-step velocity.
pub fn advance_flow(
    stages: &StageVelocities,
    trackers: &[CharTracker],
    dt: f64,
) -> Result<Vec<CharTracker>> {
    assert!(dt >= 0.0, "negative step");
    trackers
        .iter()
        .map(|tr| {
            let mut next = tr.clone();
            if dt > 0.0 {
                let (q, qx) = rk4_flow(&stages.stages, tr.q, tr.qx, dt);
                if !(q.is_finite() && qx.is_finite()) {
                    return Err(DpError::FlowBreakdown { label: tr.a });
                }
                next.q = q;
                next.qx = qx;
            }
            next.refresh(&stages.end);
            Ok(next)
        })
        .collect()
}

fn rk4_flow(s: &[Interpolant; 4], q: f64, m: f64, dt: f64) -> (f64, f64) {
    let rate = |ip: &Interpolant, q: f64, m: f64| {
        let (v, vx) = ip.eval_with_derivative(q);
        (v, vx * m)
    };
    let half = 0.5 * dt;
    let (a1, b1) = rate(&s[0], q, m);
    let (a2, b2) = rate(&s[1], q + half * a1, m + half * b1);
    let (a3, b3) = rate(&s[2], q + half * a2, m + half * b2);
    let (a4, b4) = rate(&s[3], q + dt * a3, m + dt * b3);
    (
        q + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
        m + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
    )
}

/// One row of a characteristic trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub a: f64,
    pub q: f64,
    pub qx: f64,
    pub f: f64,
    pub g: f64,
    pub h: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelAudit {
    pub a: f64,
    pub samples: usize,
    /// `min (Δf/Δt - f g)` over interior samples.
    pub min_di1: f64,
    /// `min (Δg/Δt - f g)` over interior samples.
    pub min_di2: f64,
    /// `min (1/h(t0) - (t - t0) - 1/h(t))` from the first sample with
    /// `f, g > 0`; `None` when that never happens.
    pub bound_margin: Option<f64>,
    /// Largest centered difference of `1/h` inside the `f, g > 0` window.
    pub max_inv_h_slope: Option<f64>,
    /// Samples where `f` or `g` dropped to `<= 0` after both were positive.
    pub sign_violations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiAudit {
    pub labels: Vec<LabelAudit>,
    pub tol: f64,
    pub min_di1: f64,
    pub min_di2: f64,
    pub min_bound_margin: Option<f64>,
    pub max_inv_h_slope: Option<f64>,
    pub sign_violations: usize,
    /// Time after which samples were discarded.
    pub truncated_at: Option<f64>,
}

impl RiccatiAudit {
    pub fn passed(&self) -> bool {
        self.min_di1 >= -self.tol
            && self.min_di2 >= -self.tol
            && self.min_bound_margin.is_none_or(|m| m >= -self.tol)
            && self.sign_violations == 0
    }

    pub fn label(&self, a: f64) -> Option<&LabelAudit> {
        self.labels.iter().find(|l| l.a == a)
    }
}

/// Checks `f' >= f g`, `g' >= f g` and `1/h(t) <= 1/h(t0) - (t - t0)` on a
/// trace, using centered differences at the trace cadence. Samples after
/// `smooth_until` are ignored.
pub fn riccati_audit(trace: &[TraceRow], smooth_until: Option<f64>) -> Result<RiccatiAudit> {
    let mut order: Vec<u64> = Vec::new();
    let mut groups: HashMap<u64, Vec<TraceRow>> = HashMap::new();
    for row in trace {
        if smooth_until.is_some_and(|tmax| row.t > tmax) {
            continue;
        }
        let key = row.a.to_bits();
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(*row);
    }
    if order.is_empty() {
        return Err(DpError::Trace("no samples to audit".into()));
    }

    let max_fg = groups
        .values()
        .flatten()
        .fold(0.0f64, |m, r| m.max((r.f * r.g).abs()));
    let tol = 1e-2 * max_fg.max(1.0);

    let mut labels = Vec::with_capacity(order.len());
    for key in order {
        let mut rows = groups.remove(&key).unwrap_or_default();
        rows.sort_by(|x, y| x.t.total_cmp(&y.t));
        rows.dedup_by(|x, y| x.t == y.t);
        labels.push(audit_label(&rows)?);
    }

    let min_di1 = labels.iter().map(|l| l.min_di1).fold(f64::INFINITY, f64::min);
    let min_di2 = labels.iter().map(|l| l.min_di2).fold(f64::INFINITY, f64::min);
    let min_bound_margin = labels
        .iter()
        .filter_map(|l| l.bound_margin)
        .reduce(f64::min);
    let max_inv_h_slope = labels
        .iter()
        .filter_map(|l| l.max_inv_h_slope)
        .reduce(f64::max);
    let sign_violations = labels.iter().map(|l| l.sign_violations).sum();

    Ok(RiccatiAudit {
        labels,
        tol,
        min_di1,
        min_di2,
        min_bound_margin,
        max_inv_h_slope,
        sign_violations,
        truncated_at: smooth_until,
    })
}

fn audit_label(rows: &[TraceRow]) -> Result<LabelAudit> {
    let a = rows[0].a;
    if rows.iter().any(|r| !(r.t.is_finite() && r.f.is_finite() && r.g.is_finite())) {
        return Err(DpError::Trace(format!("non-finite sample for label {a}")));
    }

    let mut min_di1 = f64::INFINITY;
    let mut min_di2 = f64::INFINITY;
    for w in rows.windows(3) {
        let (prev, mid, next) = (&w[0], &w[1], &w[2]);
        let span = next.t - prev.t;
        let fg = mid.f * mid.g;
        min_di1 = min_di1.min((next.f - prev.f) / span - fg);
        min_di2 = min_di2.min((next.g - prev.g) / span - fg);
    }
    if rows.len() < 3 {
        min_di1 = 0.0;
        min_di2 = 0.0;
    }

    let positive = |r: &TraceRow| r.f > 0.0 && r.g > 0.0;
    let mut bound_margin = None;
    let mut max_inv_h_slope: Option<f64> = None;
    let mut sign_violations = 0;
    if let Some(i0) = rows.iter().position(positive) {
        let t0 = rows[i0].t;
        let inv0 = 1.0 / (rows[i0].f * rows[i0].g).sqrt();
        let mut worst = f64::INFINITY;
        let window = &rows[i0..];
        for r in window {
            if positive(r) {
                let inv = 1.0 / (r.f * r.g).sqrt();
                worst = worst.min(inv0 - (r.t - t0) - inv);
            } else {
                sign_violations += 1;
            }
        }
        bound_margin = Some(worst);
        for w in window.windows(3) {
            if w.iter().all(positive) {
                let inv = |r: &TraceRow| 1.0 / (r.f * r.g).sqrt();
                let slope = (inv(&w[2]) - inv(&w[0])) / (w[2].t - w[0].t);
                max_inv_h_slope = Some(max_inv_h_slope.map_or(slope, |m| m.max(slope)));
            }
        }
    }

    Ok(LabelAudit {
        a,
        samples: rows.len(),
        min_di1,
        min_di2,
        bound_margin,
        max_inv_h_slope,
        sign_violations,
    })
}
