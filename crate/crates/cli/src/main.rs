mod commands;
mod config;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use commands::{CliError, Context};
use config::{Command, Format, RimGauge, RunConfig};
use report::{Report, Timings};

/// Exact computations on the quantum double D(G) and its gapped boundaries.
#[derive(Debug, Parser)]
#[command(name = "qdw", version)]
struct Cli {
    /// Command to run; may instead come from --config.
    #[arg(value_enum)]
    command: Option<Command>,

    /// Group: cyclic:N, dihedral:N, symmetric:N, quaternion8, product:A,B,
    /// inline Cayley-table JSON or @table.json.
    #[arg(long)]
    group: Option<String>,

    /// Subgroup: element list, trivial, full, cyclic:<element> or generated:<elements>.
    /// Also the outer rim of lattice patches.
    #[arg(long)]
    subgroup: Option<String>,

    /// Second subgroup; also the boundary of inner holes.
    #[arg(long)]
    subgroup2: Option<String>,

    /// torus:RxC, disk:RxC, annulus:RxC, inline JSON or @lattice.json.
    #[arg(long)]
    lattice: Option<String>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Worker threads for parallel kernels.
    #[arg(long, env = "QDW_THREADS")]
    threads: Option<usize>,

    /// Absolute tolerance for floating-point checks.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Read a JSON run configuration; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Print the resolved configuration and exit.
    #[arg(long)]
    dump_config: bool,

    /// Add wall-clock timings to the report (output is then no longer reproducible byte for byte).
    #[arg(long)]
    timings: bool,

    /// GSD method: auto, counting, trace or dense.
    #[arg(long)]
    method: Option<String>,

    /// Which rim edges get gauge projectors.
    #[arg(long, value_enum)]
    rim_gauge: Option<RimGauge>,

    /// Tunnel generator `[NAME=]KEY:I->J`; repeatable.
    #[arg(long = "tunnel")]
    tunnels: Vec<String>,

    /// Loop generator `[NAME=]KEY@H`; repeatable.
    #[arg(long = "loop")]
    loops: Vec<String>,

    /// Hole measured by charge-project (default: first inner hole).
    #[arg(long)]
    hole: Option<usize>,

    /// Vertex ring offset of charge loops.
    #[arg(long)]
    offset: Option<usize>,

    /// Cell ring of flux loops (>= 1).
    #[arg(long)]
    ring: Option<usize>,
}

impl Cli {
    fn resolve(self) -> Result<(RunConfig, Option<PathBuf>, bool, bool), String> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                RunConfig::parse(&text).map_err(|e| format!("config {}: {e}", path.display()))?
            }
            None => {
                let command = self.command.ok_or("missing command")?;
                let group = self.group.clone().ok_or("missing --group")?;
                RunConfig::new(command, &group)
            }
        };
        if let Some(c) = self.command {
            cfg.command = c;
        }
        if let Some(g) = self.group {
            cfg.group = g;
        }
        macro_rules! set {
            ($($f:ident),*) => {$( if self.$f.is_some() { cfg.$f = self.$f; } )*};
        }
        set!(subgroup, subgroup2, lattice, threads, method, hole, offset, ring);
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        if let Some(r) = self.rim_gauge {
            cfg.rim_gauge = r;
        }
        if !self.tunnels.is_empty() {
            cfg.tunnels = self.tunnels;
        }
        if !self.loops.is_empty() {
            cfg.loops = self.loops;
        }
        if !(cfg.tolerance.is_finite() && cfg.tolerance >= 0.0) {
            return Err(format!("tolerance must be a nonnegative number, got {}", cfg.tolerance));
        }
        Ok((cfg, self.out, self.dump_config, self.timings))
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let (cfg, out, dump, timings) = match cli.resolve() {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}\n\nRun `qdw --help` for usage.");
            return ExitCode::from(2);
        }
    };
    if dump {
        return match emit(&(cfg.to_json() + "\n"), out.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }

    let start = Instant::now();
    let format = cfg.format;
    let outcome = Context::new(cfg.clone()).and_then(|cx| commands::run(&cx));
    let outcome = match outcome {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("invariant failed: {msg}");
            return ExitCode::from(1);
        }
    };
    let mut report = Report::new(cfg, outcome);
    if timings {
        report.timings = Some(Timings {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    let text = match report.render(format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&text, out.as_ref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let failed: Vec<_> = report.failed_checks().collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for c in failed {
            eprintln!("check failed: {}: {}", c.name, c.detail);
        }
        ExitCode::from(1)
    }
}
