//! `sle0` command line: solve, trace, evolve and check multiple SLE(0)
//! systems described by scenario files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sle0_cli::commands::{self, Ctx, Run};
use sle0_cli::scenario::Scenario;
use sle0_cli::settings::Tolerances;
use sle0_cli::{presets, report, Failure};

#[derive(Parser)]
#[command(name = "sle0", version, about = "Stationary charges, real loci, Loewner flow and Calogero-Moser checks for multiple SLE(0) systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario JSON file (schema version 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for every emitted file.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the scenario time step.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Overrides the scenario end time.
    #[arg(long = "t-end", global = true)]
    t_end: Option<f64>,
    /// Emit SVG figures (with neither --svg nor --csv, both are emitted).
    #[arg(long, global = true)]
    svg: bool,
    /// Emit CSV tables.
    #[arg(long, global = true)]
    csv: bool,
    /// Run downstream stages on every solver solution, not just the selected one.
    #[arg(long, global = true)]
    all_solutions: bool,
    /// Trace each solver solution and report its realized link pattern.
    #[arg(long, global = true)]
    patterns: bool,
    /// Reconstruct curve tips at this many sample times (evolve).
    #[arg(long, global = true, default_value_t = 0)]
    tips: usize,
    #[command(flatten)]
    tol: Tolerances,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Solve the stationary relations for the screening charges.
    Solve,
    /// Trace the real locus from the growth points.
    Trace,
    /// Run the Loewner flow and monitor the field integral.
    Evolve,
    /// Null vector Hamiltonians, Lax matrices and the fitted pair coupling.
    Calogero,
    /// Run every consistency check on the scenario.
    Verify,
    /// Render a built-in figure preset (`4.1` to `4.15`, or `all`).
    RenderFigure { id: String },
}

fn write_runs(out: &PathBuf, runs: &[Run]) -> Result<(), Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;
    for run in runs {
        for (name, bytes) in &run.files {
            let path = out.join(name);
            std::fs::write(&path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<Vec<Run>, Failure> {
    let (svg, csv) = if cli.svg || cli.csv { (cli.svg, cli.csv) } else { (true, true) };
    let make_ctx = |scenario: Scenario| Ctx {
        scenario,
        tol: cli.tol.clone(),
        all_solutions: cli.all_solutions,
        svg,
        csv,
        patterns: cli.patterns,
        tips: cli.tips,
    };
    if let Command::RenderFigure { id } = &cli.command {
        let ids: Vec<&str> = if id == "all" { presets::IDS.to_vec() } else { vec![id.as_str()] };
        let mut base = Scenario::new(sle0::config::Uniformization::Disk, vec![]);
        base.seed = cli.seed.unwrap_or(0);
        let ctx = make_ctx(base);
        let mut runs = Vec::new();
        for id in ids {
            let p = presets::preset(id)
                .ok_or_else(|| Failure::Validation(format!("unknown figure `{id}`; known: {}", presets::IDS.join(", "))))?;
            runs.push(commands::figure(&p, &ctx));
        }
        return Ok(runs);
    }
    let path = cli.config.as_ref().ok_or_else(|| Failure::Validation("--config <path> is required".into()))?;
    let mut sc = Scenario::load(path)?;
    if let Some(seed) = cli.seed {
        sc.seed = seed;
    }
    if cli.dt.is_some() {
        sc.dt = cli.dt;
    }
    if cli.t_end.is_some() {
        sc.t_end = cli.t_end;
    }
    sc.check()?;
    let ctx = make_ctx(sc);
    let run = match cli.command {
        Command::Solve => commands::solve(&ctx),
        Command::Trace => commands::trace(&ctx),
        Command::Evolve => commands::evolve_cmd(&ctx),
        Command::Calogero => commands::calogero(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::RenderFigure { .. } => unreachable!(),
    };
    Ok(vec![run])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let runs = match execute(cli) {
        Ok(runs) => runs,
        Err(f) => {
            eprintln!("sle0: {f}");
            return ExitCode::from(f.code() as u8);
        }
    };
    if let Err(f) = write_runs(&out, &runs) {
        eprintln!("sle0: {f}");
        return ExitCode::from(f.code() as u8);
    }
    let mut code = 0;
    for run in &runs {
        let r = &run.report;
        let label = r.figure.as_ref().map(|f| format!("figure {}", f.id)).unwrap_or_else(|| r.command.clone());
        let summary = summarize(r);
        println!("{label}: {summary}");
        for m in &r.messages {
            eprintln!("  {m}");
        }
        if code == 0 {
            code = r.exit_code;
        }
    }
    ExitCode::from(code as u8)
}

fn summarize(r: &report::Report) -> String {
    if let Some(f) = &r.figure {
        return match (&f.realized_pattern, f.matches) {
            (Some(p), Some(true)) => format!("{p} (matches caption)"),
            (Some(p), Some(false)) => format!("{p} (caption: {})", f.caption_pattern.as_deref().unwrap_or("-")),
            (Some(p), None) => format!("{p} (caption gives no usable pattern)"),
            (None, _) => "no pattern".into(),
        };
    }
    match r.command.as_str() {
        "solve" => r
            .solve
            .as_ref()
            .map(|s| format!("{} solution(s), regime {:?}", s.solutions.len(), s.regime))
            .unwrap_or_else(|| "no result".into()),
        "trace" => r
            .traces
            .iter()
            .map(|t| t.pattern.clone().unwrap_or_else(|| "unresolved".into()))
            .collect::<Vec<_>>()
            .join("; "),
        "evolve" => r
            .evolve
            .as_ref()
            .map(|e| format!("t = {:.6}, max field drift {:.3e}", e.t_last, e.iom_max_drift))
            .unwrap_or_else(|| "no result".into()),
        "calogero" => r
            .calogero
            .iter()
            .map(|c| {
                let g = c.coupling.as_ref().map(|g| format!("{:.6}", g.g)).unwrap_or_else(|| "-".into());
                format!("max |H| {:.3e}, fitted coupling {g}", c.hamiltonians.iter().fold(0.0f64, |a, b| a.max(b.abs())))
            })
            .collect::<Vec<_>>()
            .join("; "),
        _ => format!("{} of {} checks passed", r.checks.iter().filter(|c| c.passed).count(), r.checks.len()),
    }
}
