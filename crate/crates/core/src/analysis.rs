//! Diagnostics on initial data and trajectories.
//!
//! * [`criterion_scan`] finds grid points with `v0'(a) < -√(3/2) |v0(a) + κ|`.
//!   Any such point forces breaking, and [`blowup_bound`] turns the best one
//!   into the lifespan bound `1/h0` with `h0 = √(u0'(a)² - 3/2 u0(a)²)`,
//!   `u0 = v0 + κ`.
//! * [`envelope_check`] evaluates the two-sided exponential envelope that
//!   global solutions obey on every period.
//! * [`liouville_probe`] tracks how close `v + κ` comes to zero.
//! * [`conservation_report`] audits the mean, the momentum sign and the
//!   flow invariant `y(t, q) q_x³ = y0(a)`.

use crate::characteristics::SQRT_3_2;
use crate::solver::{momentum, Classification, Snapshot, SolverState};
use crate::spectral::{ddx, Interpolant, PeriodicField};

/// Margins at or below this are not counted as admissible.
pub const STRICTNESS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionHit {
    pub a: f64,
    pub index: usize,
    /// `v0'(a)`.
    pub lhs: f64,
    /// `-√(3/2) |v0(a) + κ|`.
    pub rhs: f64,
    pub margin: f64,
    pub h0: f64,
}

/// Grid points satisfying the breaking criterion, by descending `h0` and
/// then ascending `a`.
pub fn criterion_scan(v0: &PeriodicField, kappa: f64) -> Vec<CriterionHit> {
    let grid = v0.grid();
    let dv = ddx(v0);
    let mut hits: Vec<CriterionHit> = v0
        .values()
        .iter()
        .zip(dv.values())
        .enumerate()
        .filter_map(|(j, (&v, &lhs))| {
            let u = v + kappa;
            let rhs = -SQRT_3_2 * u.abs();
            let margin = rhs - lhs;
            (margin > STRICTNESS).then(|| CriterionHit {
                a: grid.point(j),
                index: j,
                lhs,
                rhs,
                margin,
                h0: (lhs * lhs - 1.5 * u * u).max(0.0).sqrt(),
            })
        })
        .collect();
    hits.sort_by(|x, y| y.h0.total_cmp(&x.h0).then(x.a.total_cmp(&y.a)));
    hits
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupBound {
    pub a_star: f64,
    pub h0_max: f64,
    pub t_bound: f64,
}

/// Upper bound on the lifespan from the best admissible point, if any.
pub fn blowup_bound(v0: &PeriodicField, kappa: f64) -> Option<BlowupBound> {
    criterion_scan(v0, kappa).first().map(|hit| BlowupBound {
        a_star: hit.a,
        h0_max: hit.h0,
        t_bound: 1.0 / hit.h0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignU {
    Positive,
    Zero,
    Negative,
    Indeterminate,
}

impl SignU {
    pub fn as_int(self) -> Option<i32> {
        match self {
            SignU::Positive => Some(1),
            SignU::Zero => Some(0),
            SignU::Negative => Some(-1),
            SignU::Indeterminate => None,
        }
    }

    pub fn from_int(s: i32) -> Option<Self> {
        match s {
            1 => Some(SignU::Positive),
            0 => Some(SignU::Zero),
            -1 => Some(SignU::Negative),
            _ => None,
        }
    }
}

/// `Zero` when `max|u| <= zero_tol`, otherwise the sign of the mean if it
/// exceeds `zero_tol`, otherwise `Indeterminate`.
pub fn determine_sign(u: &PeriodicField, zero_tol: f64) -> SignU {
    if u.max_abs() <= zero_tol {
        return SignU::Zero;
    }
    let m = u.mean();
    if m > zero_tol {
        SignU::Positive
    } else if m < -zero_tol {
        SignU::Negative
    } else {
        SignU::Indeterminate
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeReport {
    /// Grid point the reference `α` was snapped to.
    pub alpha: f64,
    pub sign_u: SignU,
    /// `min_x [u(x) - e^{s√(3/2)(α-x)} u(α)]`.
    pub worst_lower_margin: f64,
    /// `min_x [e^{s√(3/2)(α+1-x)} u(α) - u(x)]`.
    pub worst_upper_margin: f64,
    /// Smallest forward difference of `x ↦ e^{s√(3/2) x} u(x)` over one period.
    pub min_monotone_increment: f64,
    pub max_abs: f64,
}

impl EnvelopeReport {
    pub fn passes(&self, margin_tol: f64, zero_tol: f64) -> bool {
        match self.sign_u {
            SignU::Zero => self.max_abs <= zero_tol,
            SignU::Indeterminate => false,
            _ => self.worst_lower_margin >= -margin_tol && self.worst_upper_margin >= -margin_tol,
        }
    }
}

/// Evaluates both envelope inequalities at the grid points `α + m/n`,
/// `m = 0..n`, with `α` snapped to the nearest grid point.
///
/// Panics unless `sign_u` is -1, 0 or 1.
pub fn envelope_check(u: &PeriodicField, alpha: f64, sign_u: i32) -> EnvelopeReport {
    let sign = SignU::from_int(sign_u).expect("sign_u must be -1, 0 or 1");
    let grid = u.grid();
    let n = grid.n();
    let j0 = grid.nearest_index(alpha);
    let alpha = grid.point(j0);
    let s = sign_u as f64 * SQRT_3_2;
    let vals = u.values();
    let u_alpha = vals[j0];

    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    let mut increment = f64::INFINITY;
    let mut prev: Option<f64> = None;
    for m in 0..=n {
        let d = m as f64 / n as f64;
        let x = alpha + d;
        let v = vals[(j0 + m) % n];
        if m < n {
            lower = lower.min(v - (-s * d).exp() * u_alpha);
            upper = upper.min((s * (1.0 - d)).exp() * u_alpha - v);
        }
        let phi = (s * x).exp() * v;
        if let Some(p) = prev {
            increment = increment.min(phi - p);
        }
        prev = Some(phi);
    }

    EnvelopeReport {
        alpha,
        sign_u: sign,
        worst_lower_margin: lower,
        worst_upper_margin: upper,
        min_monotone_increment: increment,
        max_abs: u.max_abs(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiouvilleClass {
    IdenticallyFlat,
    Separated,
    Touching,
}

impl LiouvilleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            LiouvilleClass::IdenticallyFlat => "identically_flat",
            LiouvilleClass::Separated => "separated",
            LiouvilleClass::Touching => "touching",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleReport {
    /// `(t, min_x |v(t, x) + κ|)` per snapshot.
    pub distance: Vec<(f64, f64)>,
    pub t_star: f64,
    pub x_star: f64,
    pub min_distance: f64,
    /// `max_{t,x} |v + κ|`.
    pub max_deviation: f64,
    pub zero_tol: f64,
    pub classification: LiouvilleClass,
}

impl LiouvilleReport {
    /// A run that touches `-κ` yet completes without breaking contradicts
    /// global existence; breaking is then expected past the horizon.
    pub fn contradiction_indicator(&self, run: Classification) -> bool {
        self.classification == LiouvilleClass::Touching && run == Classification::Completed
    }
}

/// Absolute zero tolerance for a trajectory: `rel` times
/// `max_t max_x |v| + |κ|`.
pub fn relative_zero_tol<'a>(
    states: impl IntoIterator<Item = &'a SolverState>,
    kappa: f64,
    rel: f64,
) -> f64 {
    let scale = states.into_iter().fold(0.0f64, |m, s| m.max(s.u.max_abs()));
    rel * (scale + kappa.abs())
}

/// Panics on an empty trajectory.
pub fn liouville_probe<'a>(
    trajectory: impl IntoIterator<Item = &'a SolverState>,
    kappa: f64,
    zero_tol: f64,
) -> LiouvilleReport {
    let mut distance = Vec::new();
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    let mut max_deviation = 0.0f64;
    for s in trajectory {
        let grid = s.u.grid();
        let (j, m) = s
            .u
            .values()
            .iter()
            .map(|v| (v + kappa).abs())
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, d)| if d < acc.1 { (j, d) } else { acc });
        max_deviation = max_deviation.max(s.u.values().iter().fold(0.0, |a, v| a.max((v + kappa).abs())));
        if m < best.2 {
            best = (s.t, grid.point(j), m);
        }
        distance.push((s.t, m));
    }
    assert!(!distance.is_empty(), "empty trajectory");

    let classification = if max_deviation <= zero_tol {
        LiouvilleClass::IdenticallyFlat
    } else if best.2 > zero_tol {
        LiouvilleClass::Separated
    } else {
        LiouvilleClass::Touching
    };
    LiouvilleReport {
        distance,
        t_star: best.0,
        x_star: best.1,
        min_distance: best.2,
        max_deviation,
        zero_tol,
        classification,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationReport {
    /// `max_t |mean(u(t)) - mean(u0)|`.
    pub mean_drift: f64,
    /// `max |y(t, q) q_x³ - y0(a)| / max(|y0(a)|, 1e-6 ‖y0‖∞)`.
    pub flow_invariant_error: f64,
    /// `min_t min_x y(t, x)`.
    pub min_momentum: f64,
    pub y0_sup: f64,
}

/// Panics on an empty trajectory.
pub fn conservation_report(snapshots: &[Snapshot]) -> ConservationReport {
    let first = snapshots.first().expect("empty trajectory");
    let mean0 = first.state.u.mean();
    let y0 = momentum(&first.state.u);
    let y0_sup = y0.max_abs();
    let y0_ip = Interpolant::new(&y0);
    let y0_at: Vec<f64> = first.trackers.iter().map(|tr| y0_ip.eval(tr.a)).collect();

    let mut mean_drift = 0.0f64;
    let mut flow_err = 0.0f64;
    let mut min_momentum = f64::INFINITY;
    for snap in snapshots {
        mean_drift = mean_drift.max((snap.state.u.mean() - mean0).abs());
        let y = momentum(&snap.state.u);
        min_momentum = min_momentum.min(y.values().iter().copied().fold(f64::INFINITY, f64::min));
        if snap.trackers.is_empty() {
            continue;
        }
        let y_ip = Interpolant::new(&y);
        for (tr, &ya) in snap.trackers.iter().zip(&y0_at) {
            let transported = y_ip.eval(tr.q) * tr.qx.powi(3);
            let denom = ya.abs().max(1e-6 * y0_sup).max(f64::MIN_POSITIVE);
            flow_err = flow_err.max((transported - ya).abs() / denom);
        }
    }
    ConservationReport {
        mean_drift,
        flow_invariant_error: flow_err,
        min_momentum,
        y0_sup,
    }
}
