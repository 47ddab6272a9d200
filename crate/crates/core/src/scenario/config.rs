//! Flat `key = value` scenario files.
//!
//! ```text
//! # breaking sine wave
//! name = sine
//! initial = sine
//! amplitude = 1.0
//! modes = 1
//! t_end = 0.3
//! ```
//!
//! One key per line, `#` starts a comment. Lists are comma separated.

use std::path::{Path, PathBuf};

use crate::error::{DpError, Result};
use crate::solver::SolverConfig;

/// Default relative tolerance for touching / zero detection.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    /// `amplitude · sin(2π · modes · x)`.
    Sine { amplitude: f64, modes: u32 },
    Constant { value: f64 },
    /// `mean + Σ_k cos[k-1] cos(2πkx) + sin[k-1] sin(2πkx)`, `k >= 1`.
    Fourier { mean: f64, cos: Vec<f64>, sin: Vec<f64> },
    /// `p * (1 + amplitude · sin(2πx))`, whose momentum is positive.
    PositiveMomentum { amplitude: f64 },
    /// `n` samples read from a file.
    Samples { path: PathBuf },
}

impl InitialData {
    pub fn kind(&self) -> &'static str {
        match self {
            InitialData::Sine { .. } => "sine",
            InitialData::Constant { .. } => "constant",
            InitialData::Fourier { .. } => "fourier",
            InitialData::PositiveMomentum { .. } => "positive_momentum",
            InitialData::Samples { .. } => "samples",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outputs {
    /// Defaults to `t_end / 50`.
    pub snapshot_every: Option<f64>,
    /// Defaults to `t_end / 50`.
    pub trace_every: Option<f64>,
    /// Defaults to `out/<name>`.
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub initial: InitialData,
    pub solver: SolverConfig,
    pub outputs: Outputs,
    /// Relative zero tolerance for sign and touching decisions.
    pub zero_tol: f64,
}

impl Scenario {
    pub fn kappa(&self) -> f64 {
        self.solver.kappa
    }

    pub fn snapshot_every(&self) -> f64 {
        self.outputs.snapshot_every.unwrap_or(self.solver.t_end / 50.0)
    }

    pub fn trace_every(&self) -> f64 {
        self.outputs.trace_every.unwrap_or(self.solver.t_end / 50.0)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.outputs
            .dir
            .clone()
            .unwrap_or_else(|| Path::new("out").join(&self.name))
    }

    /// Resolves a relative sample path against `base` (the config file's
    /// directory).
    pub fn resolve_paths(&mut self, base: &Path) {
        if let InitialData::Samples { path } = &mut self.initial {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }

    /// Applies command-line overrides and re-validates.
    pub fn with_overrides(mut self, n: Option<usize>, kappa: Option<f64>, t_end: Option<f64>) -> Result<Self> {
        if let Some(n) = n {
            self.solver.n = n;
        }
        if let Some(k) = kappa {
            self.solver.kappa = k;
        }
        if let Some(t) = t_end {
            self.solver.t_end = t;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        for (what, v) in [
            ("snapshot_every", self.outputs.snapshot_every),
            ("trace_every", self.outputs.trace_every),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(DpError::InvalidConfig(format!("{what} must be positive")));
                }
            }
        }
        if !(self.zero_tol >= 0.0 && self.zero_tol.is_finite()) {
            return Err(DpError::InvalidConfig("zero_tol must be nonnegative".into()));
        }
        if let InitialData::PositiveMomentum { amplitude } = self.initial {
            if amplitude.abs() >= 1.0 {
                return Err(DpError::InitialData(
                    "positive_momentum needs |amplitude| < 1".into(),
                ));
            }
        }
        Ok(())
    }
}

const KEYS: &[&str] = &[
    "name",
    "initial",
    "amplitude",
    "modes",
    "value",
    "mean",
    "cos",
    "sin",
    "path",
    "kappa",
    "n",
    "t_end",
    "cfl",
    "dt_max",
    "slope_max",
    "tail_max",
    "dealias",
    "snapshot_every",
    "trace_every",
    "output_dir",
    "zero_tol",
];

/// Keys that only make sense for some kinds of initial data.
fn applies_to(key: &str) -> Option<&'static [&'static str]> {
    match key {
        "amplitude" => Some(&["sine", "positive_momentum"]),
        "modes" => Some(&["sine"]),
        "value" => Some(&["constant"]),
        "mean" | "cos" | "sin" => Some(&["fourier"]),
        "path" => Some(&["samples"]),
        _ => None,
    }
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> DpError {
        DpError::Parse {
            line: self.line,
            key: self.key.to_string(),
            message: message.into(),
        }
    }

    fn real(&self) -> Result<f64> {
        let v: f64 = self
            .value
            .parse()
            .map_err(|_| self.err(format!("expected a number, got `{}`", self.value)))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.err("value must be finite"))
        }
    }

    fn integer<T: std::str::FromStr>(&self) -> Result<T> {
        self.value
            .parse()
            .map_err(|_| self.err(format!("expected an integer, got `{}`", self.value)))
    }

    fn boolean(&self) -> Result<bool> {
        match self.value {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            other => Err(self.err(format!("expected true or false, got `{other}`"))),
        }
    }

    fn list(&self) -> Result<Vec<f64>> {
        if self.value.is_empty() {
            return Ok(Vec::new());
        }
        self.value
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.err(format!("expected a number in list, got `{s}`")))
            })
            .collect()
    }
}

pub fn parse_config(text: &str) -> Result<Scenario> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(DpError::Parse {
                line,
                key: content.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let entry = Entry {
            line,
            key: key.trim(),
            value: value.trim(),
        };
        if !KEYS.contains(&entry.key) {
            return Err(entry.err("unknown key"));
        }
        if entries.iter().any(|e| e.key == entry.key) {
            return Err(entry.err("duplicate key"));
        }
        entries.push(entry);
    }

    let find = |k: &str| entries.iter().find(|e| e.key == k);
    let kind = match find("initial") {
        Some(e) => e.value,
        None => {
            return Err(DpError::Parse {
                line: 0,
                key: "initial".into(),
                message: "missing initial data".into(),
            })
        }
    };
    for e in &entries {
        if let Some(kinds) = applies_to(e.key) {
            if !kinds.contains(&kind) {
                return Err(e.err(format!("not used by initial = {kind}")));
            }
        }
    }

    let real_or = |k: &str, d: f64| find(k).map_or(Ok(d), Entry::real);
    let list_or_empty = |k: &str| find(k).map_or(Ok(Vec::new()), Entry::list);

    let initial = match kind {
        "sine" => InitialData::Sine {
            amplitude: real_or("amplitude", 1.0)?,
            modes: find("modes").map_or(Ok(1), Entry::integer)?,
        },
        "constant" => InitialData::Constant {
            value: real_or("value", 0.0)?,
        },
        "fourier" => InitialData::Fourier {
            mean: real_or("mean", 0.0)?,
            cos: list_or_empty("cos")?,
            sin: list_or_empty("sin")?,
        },
        "positive_momentum" => {
            let amplitude = real_or("amplitude", 0.5)?;
            if amplitude.abs() >= 1.0 {
                return Err(find("amplitude")
                    .map(|e| e.err("positive_momentum needs |amplitude| < 1"))
                    .unwrap_or_else(|| DpError::InitialData("bad amplitude".into())));
            }
            InitialData::PositiveMomentum { amplitude }
        }
        "samples" => match find("path") {
            Some(e) => InitialData::Samples {
                path: PathBuf::from(e.value),
            },
            None => {
                return Err(find("initial").unwrap().err("samples needs a `path`"));
            }
        },
        other => {
            return Err(find("initial")
                .unwrap()
                .err(format!("unknown initial data `{other}`")))
        }
    };

    let defaults = SolverConfig::default();
    let solver = SolverConfig {
        n: find("n").map_or(Ok(defaults.n), Entry::integer)?,
        kappa: real_or("kappa", defaults.kappa)?,
        t_end: real_or("t_end", defaults.t_end)?,
        cfl: real_or("cfl", defaults.cfl)?,
        dt_max: real_or("dt_max", defaults.dt_max)?,
        slope_max: real_or("slope_max", defaults.slope_max)?,
        tail_max: real_or("tail_max", defaults.tail_max)?,
        dealias: find("dealias").map_or(Ok(defaults.dealias), Entry::boolean)?,
    };
    let outputs = Outputs {
        snapshot_every: find("snapshot_every").map(Entry::real).transpose()?,
        trace_every: find("trace_every").map(Entry::real).transpose()?,
        dir: find("output_dir").map(|e| PathBuf::from(e.value)),
    };
    let scenario = Scenario {
        name: find("name").map_or("scenario", |e| e.value).to_string(),
        initial,
        solver,
        outputs,
        zero_tol: real_or("zero_tol", DEFAULT_ZERO_TOL)?,
    };

    // Report range problems against the offending line when possible.
    if let Err(e) = scenario.validate() {
        let key = match &e {
            DpError::InvalidGrid(_) => Some("n"),
            DpError::InvalidConfig(m) => KEYS.iter().copied().find(|k| m.starts_with(k)),
            _ => None,
        };
        if let Some(entry) = key.and_then(find) {
            return Err(entry.err(e.to_string()));
        }
        return Err(e);
    }
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_with_defaults() {
        let s = parse_config("initial = sine\namplitude = 1.0\nmodes = 1\nt_end = 0.3").unwrap();
        assert_eq!(s.initial, InitialData::Sine { amplitude: 1.0, modes: 1 });
        let want = SolverConfig { t_end: 0.3, ..SolverConfig::default() };
        assert_eq!(s.solver, want);
        assert_eq!(s.solver.n, 256);
        assert_eq!(s.solver.cfl, 0.3);
        assert_eq!(s.solver.dt_max, 1e-3);
        assert_eq!(s.solver.slope_max, 1e3);
        assert_eq!(s.solver.tail_max, 0.1);
        assert!(s.solver.dealias);
        assert_eq!(s.kappa(), 0.0);
        assert!((s.snapshot_every() - 0.006).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_scenario() {
        let s = parse_config("initial = constant\nvalue = -2.0\nkappa = 2.0\nt_end = 1").unwrap();
        assert_eq!(s.initial, InitialData::Constant { value: -2.0 });
        assert_eq!(s.kappa(), 2.0);
        assert_eq!(s.solver.t_end, 1.0);
    }

    #[test]
    fn non_numeric_value() {
        match parse_config("initial = sine\nt_end = oops") {
            Err(DpError::Parse { line, key, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(key, "t_end");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_and_missing_keys() {
        match parse_config("initial = sine\nbogus = 1") {
            Err(DpError::Parse { line: 2, key, .. }) => assert_eq!(key, "bogus"),
            other => panic!("{other:?}"),
        }
        match parse_config("t_end = 1") {
            Err(DpError::Parse { key, .. }) => assert_eq!(key, "initial"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_lists_and_flags() {
        let text = "# header\ninitial = fourier  # trailing\nmean = 0.5\ncos = 0.1, -0.2\nsin = 0.3\n\ndealias = false\nn = 64\n";
        let s = parse_config(text).unwrap();
        assert_eq!(
            s.initial,
            InitialData::Fourier { mean: 0.5, cos: vec![0.1, -0.2], sin: vec![0.3] }
        );
        assert!(!s.solver.dealias);
        assert_eq!(s.solver.n, 64);
    }

    #[test]
    fn inapplicable_and_duplicate_keys() {
        assert!(matches!(
            parse_config("initial = constant\nmodes = 2"),
            Err(DpError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("initial = sine\nkappa = 1\nkappa = 2"),
            Err(DpError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn range_errors_name_the_key() {
        match parse_config("initial = sine\nn = 31") {
            Err(DpError::Parse { key, line: 2, .. }) => assert_eq!(key, "n"),
            other => panic!("{other:?}"),
        }
        match parse_config("initial = sine\ncfl = 2") {
            Err(DpError::Parse { key, .. }) => assert_eq!(key, "cfl"),
            other => panic!("{other:?}"),
        }
        assert!(parse_config("initial = positive_momentum\namplitude = 1.0").is_err());
        assert!(parse_config("initial = samples").is_err());
    }

    #[test]
    fn overrides() {
        let s = parse_config("initial = sine").unwrap();
        let s = s.with_overrides(Some(128), Some(0.5), Some(2.0)).unwrap();
        assert_eq!((s.solver.n, s.kappa(), s.solver.t_end), (128, 0.5, 2.0));
        let s = parse_config("initial = sine").unwrap();
        assert!(s.with_overrides(Some(7), None, None).is_err());
    }
}
