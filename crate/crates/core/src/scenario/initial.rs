use std::f64::consts::PI;
use std::path::Path;

use super::config::InitialData;
use crate::error::{DpError, Result};
use crate::spectral::{helmholtz_inverse, Grid, PeriodicField};

pub fn build_initial(spec: &InitialData, grid: Grid) -> Result<PeriodicField> {
    let tau = 2.0 * PI;
    match spec {
        InitialData::Sine { amplitude, modes } => {
            let m = *modes as f64;
            if *modes as usize >= grid.n() / 2 {
                return Err(DpError::InitialData(format!(
                    "mode {modes} is not resolved on {} points",
                    grid.n()
                )));
            }
            Ok(PeriodicField::from_fn(grid, |x| amplitude * (tau * m * x).sin()))
        }
        InitialData::Constant { value } => Ok(PeriodicField::constant(grid, *value)),
        InitialData::Fourier { mean, cos, sin } => {
            let top = cos.len().max(sin.len());
            if top >= grid.n() / 2 {
                return Err(DpError::InitialData(format!(
                    "mode {top} is not resolved on {} points",
                    grid.n()
                )));
            }
            Ok(PeriodicField::from_fn(grid, |x| {
                let c: f64 = cos
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * (tau * (i + 1) as f64 * x).cos())
                    .sum();
                let s: f64 = sin
                    .iter()
                    .enumerate()
                    .map(|(i, b)| b * (tau * (i + 1) as f64 * x).sin())
                    .sum();
                mean + c + s
            }))
        }
        InitialData::PositiveMomentum { amplitude } => {
            if amplitude.abs() >= 1.0 {
                return Err(DpError::InitialData(
                    "positive_momentum needs |amplitude| < 1".into(),
                ));
            }
            let y0 = PeriodicField::from_fn(grid, |x| 1.0 + amplitude * (tau * x).sin());
            Ok(helmholtz_inverse(&y0))
        }
        InitialData::Samples { path } => {
            let values = read_samples(path)?;
            PeriodicField::new(grid, values).map_err(|e| match e {
                DpError::LengthMismatch { expected, got } => DpError::InitialData(format!(
                    "{}: {got} samples for a grid of {expected}",
                    path.display()
                )),
                other => other,
            })
        }
    }
}

/// Reads samples either as bare numbers (separated by commas, whitespace or
/// newlines) or from a CSV with a header containing a `u` column. With a
/// `t` column as well, only the rows at the first time are used, so a
/// `fields.csv` from a previous run reproduces its initial field.
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| DpError::io(path, e))?;
    parse_samples(&text).map_err(|m| DpError::InitialData(format!("{}: {m}", path.display())))
}

fn parse_samples(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .peekable();
    let Some(first) = lines.peek().copied() else {
        return Err("no samples".into());
    };

    if first.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        let header: Vec<&str> = first.split(',').map(str::trim).collect();
        lines.next();
        let col_u = header
            .iter()
            .position(|h| *h == "u")
            .ok_or("header has no `u` column")?;
        let col_t = header.iter().position(|h| *h == "t");
        let mut t0: Option<f64> = None;
        let mut out = Vec::new();
        for (i, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let cell = |c: usize| -> std::result::Result<f64, String> {
                cells
                    .get(c)
                    .and_then(|s| s.parse().ok())
                    .ok_or(format!("bad value on data row {}", i + 1))
            };
            if let Some(ct) = col_t {
                let t = cell(ct)?;
                match t0 {
                    None => t0 = Some(t),
                    Some(t0) if t != t0 => break,
                    _ => {}
                }
            }
            out.push(cell(col_u)?);
        }
        Ok(out)
    } else {
        lines
            .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| format!("not a number: `{s}`")))
            .collect()
    }
}
