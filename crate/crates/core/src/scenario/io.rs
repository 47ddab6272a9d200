//! CSV output. Numbers use the shortest decimal that round-trips to the
//! same `f64`; absent values are empty cells. UTF-8, LF, one header row.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::runner::RunSummary;
use crate::characteristics::TraceRow;
use crate::error::{DpError, Result};
use crate::solver::Snapshot;

pub const FIELDS_HEADER: &str = "t,x,u";
pub const TRACE_HEADER: &str = "t,a,q,qx,f,g,h_or_blank";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn fields_csv(snapshots: &[Snapshot]) -> String {
    let mut out = String::new();
    out.push_str(FIELDS_HEADER);
    out.push('\n');
    for snap in snapshots {
        let grid = snap.state.u.grid();
        for (j, v) in snap.state.u.values().iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", snap.state.t, grid.point(j), v);
        }
    }
    out
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.t,
            r.a,
            r.q,
            r.qx,
            r.f,
            r.g,
            opt(r.h)
        );
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| DpError::Trace("empty trace".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let idx = |name: &str| {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| DpError::Trace(format!("missing column `{name}`")))
    };
    let [ct, ca, cq, cqx, cf, cg, ch] = [
        idx("t")?,
        idx("a")?,
        idx("q")?,
        idx("qx")?,
        idx("f")?,
        idx("g")?,
        idx("h_or_blank")?,
    ];
    lines
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |c: usize| -> Result<f64> {
                cells
                    .get(c)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| DpError::Trace(format!("line {}: bad value in column {}", i + 1, cols[c])))
            };
            let h = match cells.get(ch) {
                Some(s) if !s.is_empty() => Some(num(ch)?),
                _ => None,
            };
            Ok(TraceRow {
                t: num(ct)?,
                a: num(ca)?,
                q: num(cq)?,
                qx: num(cqx)?,
                f: num(cf)?,
                g: num(cg)?,
                h,
            })
        })
        .collect()
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let text = fs::read_to_string(path).map_err(|e| DpError::io(path, e))?;
    parse_trace(&text)
}

pub const SUMMARY_HEADER: &str = "scenario,classification,exit_code,t_detect,x_detect,horizon,t_final,\
a_star,t_bound,bound_respected,min_slope,tail_ratio,mean_drift,flow_invariant_error,min_momentum,\
liouville,contradiction,sign_u,envelope_lower,envelope_upper,envelope_monotone,\
riccati_di1,riccati_di2,riccati_bound,riccati_inv_h_slope,riccati_passed";

pub fn summary_csv(s: &RunSummary) -> String {
    let flag = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
    let fields = [
        s.scenario.clone(),
        s.classification.as_str().to_string(),
        s.exit_code().to_string(),
        opt(s.t_detect),
        opt(s.x_detect),
        s.horizon.to_string(),
        s.t_final.to_string(),
        opt(s.a_star),
        opt(s.t_bound),
        flag(s.bound_respected),
        s.min_slope.to_string(),
        s.tail_ratio.to_string(),
        s.mean_drift.to_string(),
        s.flow_invariant_error.to_string(),
        s.min_momentum.to_string(),
        s.liouville.as_str().to_string(),
        s.contradiction.to_string(),
        s.sign_u.map(|v| v.to_string()).unwrap_or_default(),
        opt(s.envelope_lower),
        opt(s.envelope_upper),
        opt(s.envelope_monotone),
        opt(s.riccati_di1),
        opt(s.riccati_di2),
        opt(s.riccati_bound),
        opt(s.riccati_inv_h_slope),
        flag(s.riccati_passed),
    ];
    format!("{SUMMARY_HEADER}\n{}\n", fields.join(","))
}

pub(crate) fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| DpError::io(path, e))
}
