use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dp_core::characteristics::riccati_audit;
use dp_core::scenario::{self, io, Scenario};
use dp_core::spectral::Grid;
use dp_core::{analysis, DpError};

#[derive(Parser)]
#[command(name = "dp", version, about = "Periodic Degasperis-Procesi simulator and wave-breaking analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write fields.csv, trace.csv and summary.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        kappa: Option<f64>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
    },
    /// Print the grid points of the initial data that satisfy the breaking criterion.
    Scan {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-run the Riccati audit on a trace.csv.
    Audit {
        #[arg(long)]
        trace: PathBuf,
    },
}

fn load(path: &Path) -> Result<Scenario, DpError> {
    let text = std::fs::read_to_string(path).map_err(|e| DpError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut s = scenario::parse_config(&text)?;
    if s.name == "scenario" {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            s.name = stem.to_string();
        }
    }
    s.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(s)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn run(cli: Cli) -> Result<u8, DpError> {
    match cli.command {
        Command::Run { config, out, n, kappa, t_end } => {
            let mut s = load(&config)?.with_overrides(n, kappa, t_end)?;
            if let Some(dir) = out {
                s.outputs.dir = Some(dir);
            }
            let summary = scenario::run_scenario(&s)?;
            println!("scenario        {}", summary.scenario);
            println!("classification  {}", summary.classification.as_str());
            println!("t_detect        {}", opt(summary.t_detect));
            println!("t_bound         {}", opt(summary.t_bound));
            if let Some(ok) = summary.bound_respected {
                println!("bound respected {ok}");
            }
            println!("mean drift      {}", summary.mean_drift);
            println!("flow invariant  {}", summary.flow_invariant_error);
            println!("liouville       {}", summary.liouville.as_str());
            println!("output          {}", s.output_dir().display());
            Ok(summary.exit_code() as u8)
        }
        Command::Scan { config } => {
            let s = load(&config)?;
            let grid = Grid::new(s.solver.n)?;
            let u0 = scenario::build_initial(&s.initial, grid)?;
            let hits = analysis::criterion_scan(&u0, s.kappa());
            println!("a,lhs,rhs,margin,h0");
            for h in &hits {
                println!("{},{},{},{},{}", h.a, h.lhs, h.rhs, h.margin, h.h0);
            }
            Ok(if hits.is_empty() { 3 } else { 0 })
        }
        Command::Audit { trace } => {
            let rows = io::read_trace(&trace)?;
            let audit = riccati_audit(&rows, None)?;
            println!("labels          {}", audit.labels.len());
            println!("tol             {}", audit.tol);
            println!("min di1 margin  {}", audit.min_di1);
            println!("min di2 margin  {}", audit.min_di2);
            println!("bound margin    {}", opt(audit.min_bound_margin));
            println!("max d(1/h)/dt   {}", opt(audit.max_inv_h_slope));
            println!("sign violations {}", audit.sign_violations);
            println!("passed          {}", audit.passed());
            Ok(if audit.passed() { 0 } else { 4 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
