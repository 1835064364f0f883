//! Command-line front end for the simulator.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use collisim::harness::config::parse_config_text;
use collisim::harness::{
    region_csv, run_experiment, run_experiment_traced, sweep, Mode, Scheme, SimConfig,
};

#[derive(Parser)]
#[command(
    name = "collisim",
    about = "Two-pair packet network simulator with stored collisions and delayed state knowledge",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run seeded trials of a scheme and emit one CSV row per trial.
    Simulate(SimulateArgs),
    /// Emit the analytic regions (capacity, tdma, rateless) as CSV vertices.
    Region(RegionArgs),
    /// Regions plus measured operating points over a probability grid.
    Sweep(SweepArgs),
    /// Run the built-in property suites.
    Verify,
    /// Re-run a trace file, verify it byte-for-byte, and print its result.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Config file of `key = value` lines; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// theorem1 | tdma | rateless
    #[arg(long)]
    scheme: Option<String>,
    /// Link on-probability.
    #[arg(long)]
    p: Option<f64>,
    /// Packets per transmitter.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u32>,
    /// paper-faithful | adaptive
    #[arg(long)]
    mode: Option<String>,
    /// Worker threads; output bytes do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Results CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace path; with several trials, trial k goes to `<path>.k`.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    /// Single probability.
    #[arg(long)]
    p: Option<f64>,
    /// Comma list `0.1,0.5` or range `start:step:end`.
    #[arg(long, value_name = "GRID")]
    p_grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_name = "GRID", default_value = "0.25,0.5,0.75")]
    p_grid: String,
    /// Comma list of schemes to measure.
    #[arg(long, default_value = "theorem1,tdma,rateless")]
    schemes: String,
    #[arg(long, default_value_t = 10_000)]
    m: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: u32,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    trace: PathBuf,
}

fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    if let Some((start, rest)) = s.split_once(':') {
        let (step, end) = rest
            .split_once(':')
            .ok_or_else(|| format!("grid '{s}' must be start:step:end"))?;
        let (start, step, end): (f64, f64, f64) = (
            start.parse().map_err(|_| format!("bad grid start in '{s}'"))?,
            step.parse().map_err(|_| format!("bad grid step in '{s}'"))?,
            end.parse().map_err(|_| format!("bad grid end in '{s}'"))?,
        );
        if step <= 0.0 {
            return Err("grid step must be positive".into());
        }
        let mut out = Vec::new();
        let mut v = start;
        while v <= end + 1e-12 {
            out.push((v * 1e12).round() / 1e12);
            v += step;
        }
        Ok(out)
    } else {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad grid entry '{t}'")))
            .collect()
    }
}

fn write_or_print(path: Option<&Path>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<(), String> {
    let mut cfg = SimConfig::default();
    let mut out_path = args.out.clone();
    let mut trace_path = args.trace.clone();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let partial = parse_config_text(&text).map_err(|e| e.to_string())?;
        cfg = partial.apply(cfg);
        if out_path.is_none() {
            out_path = partial.out.map(PathBuf::from);
        }
        if trace_path.is_none() {
            trace_path = partial.trace.map(PathBuf::from);
        }
    }
    if let Some(s) = &args.scheme {
        cfg.scheme = Scheme::parse(s).map_err(|e| e.to_string())?;
    }
    if let Some(v) = args.p {
        cfg.p = v;
    }
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(s) = &args.mode {
        cfg.mode = Mode::parse(s).map_err(|e| e.to_string())?;
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    cfg.validate().map_err(|e| e.to_string())?;

    let result = if let Some(trace_base) = &trace_path {
        let (result, traces) = run_experiment_traced(&cfg).map_err(|e| e.to_string())?;
        for (i, text) in traces.iter().enumerate() {
            let path = if traces.len() == 1 {
                trace_base.clone()
            } else {
                let mut s = trace_base.as_os_str().to_os_string();
                s.push(format!(".{i}"));
                PathBuf::from(s)
            };
            std::fs::write(&path, text).map_err(|e| e.to_string())?;
        }
        result
    } else {
        run_experiment(&cfg).map_err(|e| e.to_string())?
    };

    write_or_print(out_path.as_deref(), &result.to_csv(&cfg)).map_err(|e| e.to_string())?;
    let a = result.aggregate;
    eprintln!(
        "{} trials: {} decoded, {} halted; mean (r1, r2) = ({:.5}, {:.5}), sum {:.5} +/- {:.5}",
        a.trials,
        a.fully_decoded,
        a.halted,
        a.mean_r1,
        a.mean_r2,
        a.mean_sum,
        a.stderr_sum
    );
    Ok(())
}

fn region(args: RegionArgs) -> Result<(), String> {
    let ps = match (args.p, args.p_grid) {
        (Some(p), None) => vec![p],
        (None, Some(grid)) => parse_grid(&grid)?,
        (None, None) => vec![0.5],
        (Some(_), Some(_)) => return Err("give either --p or --p-grid, not both".into()),
    };
    let csv = region_csv(&ps).map_err(|e| e.to_string())?;
    write_or_print(args.out.as_deref(), &csv).map_err(|e| e.to_string())
}

fn run_sweep(args: SweepArgs) -> Result<(), String> {
    let ps = parse_grid(&args.p_grid)?;
    let schemes: Vec<Scheme> = args
        .schemes
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| Scheme::parse(s.trim()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let (csv, points) = sweep(&ps, &schemes, args.m, args.seed, args.trials, args.workers)
        .map_err(|e| e.to_string())?;
    write_or_print(args.out.as_deref(), &csv).map_err(|e| e.to_string())?;
    for pt in points {
        eprintln!(
            "p={} {}: ({:.5}, {:.5}) +/- ({:.5}, {:.5})",
            pt.p, pt.scheme.name(), pt.r1, pt.r2, pt.stderr_r1, pt.stderr_r2
        );
    }
    Ok(())
}

fn verify() -> Result<(), String> {
    let mut failed = 0;
    for c in collisim::harness::verify::run_all() {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<18} {}", c.name, c.detail);
        if !c.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        Err(format!("{failed} check(s) failed"))
    } else {
        Ok(())
    }
}

fn replay(args: ReplayArgs) -> Result<(), String> {
    let r = collisim::harness::trace::replay(&args.trace).map_err(|e| e.to_string())?;
    println!(
        "replay ok: trial {} ran {} slots ({} + {}), decode rx1={} rx2={}, halt={}",
        r.trial,
        r.total_slots,
        r.phase1_slots,
        r.phase2_slots,
        r.decode_ok_rx1,
        r.decode_ok_rx2,
        r.halt.map(|h| h.name()).unwrap_or("none"),
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Simulate(args) => simulate(args),
        Cmd::Region(args) => region(args),
        Cmd::Sweep(args) => run_sweep(args),
        Cmd::Verify => verify(),
        Cmd::Replay(args) => replay(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
