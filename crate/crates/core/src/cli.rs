//! Command dispatch for the `boussinesq` binary.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{
    parse_config, read_snapshot, series_ndjson, write_file, write_series, write_snapshot, RunConfig,
};
use crate::lab::{run_corpus, CorpusReport, CHECK_IDS};
use crate::littlewood_paley::{checksum, shell_energies, LpBank};
use crate::monitor::{sample_norms, MonitorReport};
use crate::solver::{simulate, BlowUp, CflWarning};

pub const SUBCOMMANDS: [&str; 4] = ["simulate", "analyze", "verify", "decompose"];

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ABORT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "boussinesq", version, about = "Boussinesq simulator and regularity diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a trajectory and write the monitored series, report and snapshots
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `[output] dir`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the norm sample of a snapshot as one NDJSON line
    Analyze { snapshot: PathBuf },
    /// Run the inequality corpus and write one CSV per check
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        grids: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Print the dyadic shell energies of a snapshot as CSV
    Decompose { snapshot: PathBuf },
}

enum Outcome {
    Done,
    Aborted,
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn dispatch<S: AsRef<str>>(argv: &[S]) -> i32 {
    let argv: Vec<&str> = argv.iter().map(AsRef::as_ref).collect();
    if let Some(cmd) = argv.get(1).filter(|a| !a.starts_with('-')) {
        if !SUBCOMMANDS.contains(cmd) && *cmd != "help" {
            eprintln!("error: unknown subcommand '{cmd}'; available: {}", SUBCOMMANDS.join(", "));
            return EXIT_INVALID;
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Simulate { config, out } => run_simulate(&config, out),
        Command::Analyze { snapshot } => run_analyze(&snapshot),
        Command::Verify { config, out, grids, seed, count } => run_verify(config.as_deref(), out, grids, seed, count),
        Command::Decompose { snapshot } => run_decompose(&snapshot),
    };
    match result {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Aborted) => EXIT_ABORT,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = parse_config(&text)?;
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(config)
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    config: &'a str,
    monitor: &'a MonitorReport,
    cfl_warnings: &'a [CflWarning],
    blow_up: Option<&'a BlowUp>,
}

fn run_simulate(config_path: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let config = load_config(config_path)?;
    let dir = out.unwrap_or_else(|| config.output_dir.clone());
    let sim = simulate(&config.solver)?;
    let t_last = sim.samples.last().map_or(0.0, |s| s.t);
    let monitor = MonitorReport::build(sim.samples.clone(), sim.energy.clone(), config.monitor.t0.min(t_last))?;

    write_series(&sim.samples, &dir.join("series.ndjson"), &dir.join("series.csv"))?;
    for (step, state) in &sim.snapshots {
        write_snapshot(&dir.join("snapshots").join(format!("step_{step:07}.bsvf")), state)?;
    }
    let rendered = crate::io::render_config(&config);
    let report = SimulateReport {
        config: &rendered,
        monitor: &monitor,
        cfl_warnings: &sim.warnings,
        blow_up: sim.blow_up.as_ref(),
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))?;
    write_file(&dir.join("monitor.json"), json.as_bytes())?;

    for w in &sim.warnings {
        eprintln!("warning: step {} (t = {}): Courant number {:.3} exceeds 0.5", w.step, w.t, w.courant);
    }
    let last = sim.samples.last().expect("initial sample");
    println!(
        "{} samples to t = {}; criterion integral {:e}; output in {}",
        sim.samples.len(),
        last.t,
        last.criterion_cum,
        dir.display()
    );
    if let Some(b) = sim.blow_up {
        eprintln!("error: non-finite fields at t = {} (step {}); last finite sample at t = {}", b.t, b.step, b.last_sample.t);
        return Ok(Outcome::Aborted);
    }
    Ok(Outcome::Done)
}

fn run_analyze(path: &Path) -> Result<Outcome> {
    let state = read_snapshot(path)?;
    let bank = LpBank::build(state.grid());
    print!("{}", series_ndjson(&[sample_norms(&state, &bank, None)]));
    Ok(Outcome::Done)
}

fn verify_csv(report: &CorpusReport, id: &str) -> String {
    let mut out = String::from("family,grid,lhs,rhs_core,ratio\n");
    for r in report.reports.iter().filter(|r| r.id == id) {
        for e in &r.entries {
            out.push_str(&format!("{},{},{:?},{:?},{:?}\n", e.family, e.grid, e.lhs, e.rhs_core, e.ratio));
        }
    }
    out
}

fn run_verify(
    config_path: Option<&Path>,
    out: Option<PathBuf>,
    grids: Option<Vec<usize>>,
    seed: Option<u64>,
    count: Option<usize>,
) -> Result<Outcome> {
    let config = match config_path {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    let mut spec = config.corpus.clone();
    if let Some(g) = grids {
        spec.grids = g;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(c) = count {
        spec.count = c;
    }
    let dir = out.unwrap_or(config.output_dir).join("verify");
    let report = run_corpus(&spec)?;

    let mut summary = String::from("id,grid,entries,skipped,failures,max_ratio\n");
    println!("corpus {}", report.corpus_hash);
    println!("{:<24} {:>5} {:>8} {:>8} {:>24}", "id", "grid", "entries", "skipped", "max_ratio");
    for r in &report.reports {
        let max = r.max_ratio.map_or_else(|| "none".to_string(), |m| format!("{m:?}"));
        summary.push_str(&format!("{},{},{},{},{},{}\n", r.id, r.grid, r.entries.len(), r.skipped, r.failures.len(), max));
        println!("{:<24} {:>5} {:>8} {:>8} {:>24}", r.id, r.grid, r.entries.len(), r.skipped, max);
        for f in &r.failures {
            eprintln!("warning: {}: {f}", r.id);
        }
    }
    for id in CHECK_IDS {
        write_file(&dir.join(format!("{id}.csv")), verify_csv(&report, id).as_bytes())?;
    }
    write_file(&dir.join("summary.csv"), summary.as_bytes())?;
    Ok(Outcome::Done)
}

fn run_decompose(path: &Path) -> Result<Outcome> {
    let state = read_snapshot(path)?;
    let bank = LpBank::build(state.grid());
    let u = shell_energies(&state.u, &bank);
    let theta = shell_energies(&state.theta, &bank);
    println!("# u {}", checksum(&state.u));
    println!("# theta {}", checksum(&state.theta));
    println!("j,energy_u,energy_theta");
    for ((j, eu), (_, et)) in u.iter().zip(&theta) {
        println!("{j},{eu:?},{et:?}");
    }
    Ok(Outcome::Done)
}
