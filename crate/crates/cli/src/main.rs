use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dsvac_cli::{diff_reports, run, Format, Report, RunConfig, Suite};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "dsvac", version, about = "Sector-by-sector verification of Euclidean vacua on de Sitter space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the check suites and write a report.
    Run(RunArgs),
    /// Compare two JSON reports.
    Diff {
        old: PathBuf,
        new: PathBuf,
        /// Print the diff as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with RunConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    dynamics_k_max: Option<u32>,
    #[arg(long)]
    tol_verdict: Option<f64>,
    #[arg(long)]
    tol_margin: Option<f64>,
    /// Comma-separated suite names.
    #[arg(long, value_delimiter = ',')]
    suites: Option<Vec<Suite>>,
    /// Comma-separated α values for the α-vacua.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha: Option<Vec<f64>>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Record wall time per sector task.
    #[arg(long)]
    timings: bool,
}

fn build_config(a: &RunArgs) -> Result<RunConfig, dsvac_cli::ConfigError> {
    let mut c = match &a.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(k) = a.k_max {
        c.k_max = k;
    }
    if let Some(k) = a.dynamics_k_max {
        c.dynamics_k_max = k;
    }
    if let Some(t) = a.tol_verdict {
        c.tolerances.verdict = t;
    }
    if let Some(t) = a.tol_margin {
        c.tolerances.margin = t;
    }
    if let Some(s) = &a.suites {
        c.suites = s.clone();
    }
    if let Some(al) = &a.alpha {
        c.alpha_values = al.clone();
    }
    if a.out.is_some() {
        c.output = a.out.clone();
    }
    if let Some(f) = a.format {
        c.format = f;
    }
    c.timings |= a.timings;
    c.normalize();
    c.validate()?;
    Ok(c)
}

fn write_report(r: &Report, cfg: &RunConfig) -> io::Result<()> {
    let sink: Box<dyn Write> = match &cfg.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = sink;
    match cfg.format {
        Format::Json => sink.write_all(r.to_json().map_err(io::Error::other)?.as_bytes())?,
        Format::Csv => r.write_csv(&mut sink).map_err(io::Error::other)?,
    }
    sink.flush()
}

fn cmd_run(a: RunArgs) -> ExitCode {
    let cfg = match build_config(&a) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = run(&cfg);
    if let Err(e) = write_report(&report, &cfg) {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let s = &report.summary;
    eprintln!("{} checks: {} pass, {} fail, {} structural, {} skipped", s.total, s.pass, s.fail, s.structural, s.skipped);
    for r in report.failures() {
        eprintln!("FAIL {}", r.check_id);
    }
    if report.any_fail() {
        ExitCode::from(EXIT_FAIL)
    } else {
        ExitCode::SUCCESS
    }
}

fn load(p: &PathBuf) -> Result<Report, String> {
    let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))
}

fn cmd_diff(old: PathBuf, new: PathBuf, json: bool) -> ExitCode {
    let (a, b) = match (load(&old), load(&new)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("cannot read report {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let d = match diff_reports(&a, &b) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("reports not comparable: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&d).expect("diff serializes"));
    } else {
        print!("{}", d.render());
    }
    if d.verdict_changes.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(a) => cmd_run(a),
        Command::Diff { old, new, json } => cmd_diff(old, new, json),
    }
}
