use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use multicover_core::adversary::{self, BaseInstance};
use multicover_core::engine::{self, Variant};
use multicover_core::harness::{self, Verdict};
use multicover_core::instance::{self, Sequence, SetSystem};
use multicover_core::{bounds, offline, prob, rng};

#[derive(Parser)]
#[command(
    name = "multicover",
    version,
    about = "Online set multicover experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated seeded trials on one instance and compare with the bounds.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "universal")]
        variant: Variant,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSONL trace of trial 0 here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a grid of random instances described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numeric checks of the probability oracle.
    Verify {
        #[arg(long, default_value_t = prob::SuiteConfig::default().seed)]
        seed: u64,
        /// Random inputs per tail-statement sweep.
        #[arg(long, default_value_t = prob::SuiteConfig::default().tail_inputs)]
        inputs: usize,
        /// Also write the reproduced C(2, l, x0) table as CSV.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Generate a lifted hard instance.
    Gen {
        #[arg(long)]
        lift: Lift,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.001)]
        epsilon: f64,
        /// Base instance file (coverage factor 1). Overrides the binary-split base.
        #[arg(long)]
        base: Option<PathBuf>,
        /// Depth of the binary-split base.
        #[arg(long, default_value_t = 2)]
        base_depth: u32,
        /// Leaf whose root path the binary-split base presents.
        #[arg(long, default_value_t = 0)]
        leaf: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the closed-form bounds.
    Bound {
        #[arg(long)]
        m: f64,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Defaults to k, its value for unit costs.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        c_ratio: Option<f64>,
        /// Universe size, for the lower-bound reference curves.
        #[arg(long)]
        n: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Lift {
    OscK,
    WoscK,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Run {
            instance,
            variant,
            trials,
            seed,
            trace,
        } => cmd_run(&instance, variant, trials, seed, trace.as_deref()),
        Command::Sweep { config, out } => cmd_sweep(&config, out.as_deref()),
        Command::Verify {
            seed,
            inputs,
            table,
        } => cmd_verify(seed, inputs, table.as_deref()),
        Command::Gen {
            lift,
            k,
            epsilon,
            base,
            base_depth,
            leaf,
            out,
        } => cmd_gen(
            lift,
            k,
            epsilon,
            base.as_deref(),
            base_depth,
            leaf,
            out.as_deref(),
        ),
        Command::Bound {
            m,
            d,
            k,
            kappa,
            c_ratio,
            n,
        } => cmd_bound(m, d, k, kappa, c_ratio, n),
    }
}

fn load_instance(path: &Path) -> Result<(SetSystem, Sequence)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    instance::read_instance(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_run(
    path: &Path,
    variant: Variant,
    trials: usize,
    seed: u64,
    trace: Option<&Path>,
) -> Result<bool> {
    let (system, seq) = load_instance(path)?;
    let summary = harness::empirical_ratio(&system, &seq, variant, trials, seed)?;
    let opt = offline::exact_optimum(&system, seq.elements(), system.k())?;
    let bounds = harness::applicable_bounds(&system, &seq, variant, &opt, true)?;
    let verdict = harness::compare_to_bounds(&summary, &bounds.values());

    if let Some(trace_path) = trace {
        let result = engine::run(&system, &seq, variant, rng::derive_seed(seed, 0))?;
        let file = File::create(trace_path)
            .with_context(|| format!("creating {}", trace_path.display()))?;
        engine::write_trace(&result.trace, BufWriter::new(file))?;
    }

    let report = serde_json::json!({
        "summary": summary,
        "bounds": bounds,
        "optimum": opt.set_ids,
        "verdict": verdict,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(verdict == Verdict::Pass)
}

fn cmd_sweep(config: &Path, out: Option<&Path>) -> Result<bool> {
    let file = File::open(config).with_context(|| format!("opening {}", config.display()))?;
    let config = harness::SweepConfig::from_json(io::BufReader::new(file))?;
    let rows = harness::sweep(&config);
    harness::write_sweep_csv(&rows, output(out)?)?;
    let failed = rows
        .iter()
        .filter(|r| r.verdict != Some(Verdict::Pass))
        .count();
    if failed > 0 {
        eprintln!("{failed} of {} rows did not pass", rows.len());
    }
    Ok(failed == 0)
}

fn cmd_verify(seed: u64, inputs: usize, table: Option<&Path>) -> Result<bool> {
    let report = prob::run_suite(prob::SuiteConfig {
        seed,
        tail_inputs: inputs,
        ..prob::SuiteConfig::default()
    });
    for check in &report.checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {}", check.name, check.detail);
    }
    for (m, f) in &report.f_table {
        println!("F(1/{m}) = {f:.4}");
    }
    if let Some(path) = table {
        let mut out = output(Some(path))?;
        writeln!(out, "ell,x0,c")?;
        for row in &report.table1 {
            writeln!(out, "{},{:.6},{:.18}", row.ell, row.x0, row.c)?;
        }
        out.flush()?;
    }
    Ok(report.all_passed())
}

fn cmd_gen(
    lift: Lift,
    k: usize,
    epsilon: f64,
    base: Option<&Path>,
    depth: u32,
    leaf: usize,
    out: Option<&Path>,
) -> Result<bool> {
    let base = match base {
        Some(path) => {
            let (system, seq) = load_instance(path)?;
            BaseInstance::new(system, seq)?
        }
        None => adversary::binary_split(depth, leaf)?,
    };
    let lifted = match lift {
        Lift::OscK => adversary::lift_osc_k(&base, k)?,
        Lift::WoscK => adversary::lift_wosc_k(&base, k, epsilon)?,
    };
    let mut out = output(out)?;
    out.write_all(&instance::write_instance(&lifted.system, &lifted.seq))?;
    out.flush()?;
    Ok(true)
}

fn cmd_bound(
    m: f64,
    d: f64,
    k: f64,
    kappa: Option<f64>,
    c_ratio: Option<f64>,
    n: Option<f64>,
) -> Result<bool> {
    if kappa.is_some() && c_ratio.is_some() {
        bail!("give at most one of --kappa and --c-ratio");
    }
    let mut report = serde_json::Map::new();
    let theorem1 = match (kappa, c_ratio) {
        (_, Some(c)) => bounds::corollary2_bound(m, d, k, c)?,
        (Some(kappa), None) => bounds::theorem1_bound(m, d, kappa)?,
        (None, None) => bounds::theorem1_bound(m, d, k)?,
    };
    report.insert("theorem1".into(), theorem1.into());
    if k == 1.0 {
        report.insert("theorem7".into(), bounds::theorem7_bound(m, d)?.into());
    }
    report.insert("theorem10".into(), bounds::theorem10_bound(m, d, k)?.into());
    if let Some(n) = n {
        for (key, weighted) in [("lower_unweighted", false), ("lower_weighted", true)] {
            if let Ok(expr) = bounds::lemma11_lower_expr(m, n, k, weighted) {
                report.insert(key.into(), serde_json::to_value(expr)?);
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(true)
}
