use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lowcross::bench::{run_sweep_to_files, summary_path, verify_artifacts, SweepConfig};
use lowcross::coloring::{color_deterministic, color_random, discrepancy, load_coloring, save_coloring};
use lowcross::geometry::{
    enforce_degree, family_dimension, generate_points, generate_system, load_points, save_points, DegreePolicy,
    PointDistribution,
};
use lowcross::matching::{build_matching_mwu, load_matching, save_matching, CandidatePolicy, MwuOptions, WeightMode};
use lowcross::setsystem::{import_system, save_system};

const EXIT_VERIFY: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "lowcross", version, about = "Low-crossing matchings and the colorings they induce")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColorMode {
    Deterministic,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Arith {
    Exact,
    Scaled,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set.
    GenPoints {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: Option<usize>,
        /// Infers the dimension from a family tag.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value = "uniform-square")]
        dist: PointDistribution,
        #[command(flatten)]
        common: Common,
    },
    /// Build a family's range space over a point set.
    GenSystem {
        #[arg(long)]
        family: String,
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Keep a maximal subfamily with every degree at most t.
    EnforceDegree {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value = "random-keep")]
        policy: DegreePolicy,
        #[command(flatten)]
        common: Common,
    },
    /// Build a low-crossing matching.
    Match {
        #[arg(long)]
        system: PathBuf,
        /// Sample this many candidate pairs per step instead of scanning all.
        #[arg(long)]
        sample_size: Option<usize>,
        #[arg(long, value_enum, default_value_t = Arith::Scaled)]
        mode: Arith,
        #[arg(long, default_value_t = 64)]
        headroom: u32,
        /// Also write the per-step trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Color points from a matching.
    Color {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        #[arg(long, value_enum, default_value_t = ColorMode::Deterministic)]
        mode: ColorMode,
        #[arg(long, default_value_t = 100)]
        max_attempts: u32,
        #[arg(long, default_value_t = 1.5)]
        slack: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Discrepancy of a coloring.
    Disc {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        coloring: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Recheck stored artifacts.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        matching: Option<PathBuf>,
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a parameter sweep from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Verify(String),
    Config(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<lowcross::Error> for Failure {
    fn from(e: lowcross::Error) -> Self {
        Failure::Other(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(report)) => {
            eprint!("{report}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializes");
    s.push('\n');
    s
}

fn run(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::GenPoints {
            n,
            dim,
            family,
            dist,
            common,
        } => {
            let dim = match (dim, family) {
                (Some(d), _) => d,
                (None, Some(f)) => family_dimension(&f)?,
                (None, None) => 2,
            };
            let pts = generate_points(n, dim, dist, common.seed)?;
            match common.format {
                Format::Json => match &common.out {
                    Some(path) => save_points(&pts, path)?,
                    None => print!("{}", pts.to_json()),
                },
                Format::Csv => {
                    let mut out = String::new();
                    for i in 0..pts.len() {
                        let row: Vec<String> = pts.real(i).iter().map(|v| v.to_string()).collect();
                        let _ = writeln!(out, "{}", row.join(","));
                    }
                    emit(&common, &out)?;
                }
            }
        }
        Command::GenSystem { family, points, common } => {
            let pts = load_points(&points)?;
            let sys = generate_system(&family, &pts).with_context(|| format!("generating `{family}` ranges"))?;
            write_system(&sys, &common)?;
            eprintln!("n = {}, m = {}, max degree = {}", sys.n(), sys.m(), sys.degree_profile().max_degree);
        }
        Command::EnforceDegree {
            system,
            t,
            policy,
            common,
        } => {
            let sys = import_system(&system)?;
            let out = enforce_degree(&sys, t, policy, common.seed)?;
            write_system(&out, &common)?;
            eprintln!("kept {} of {} ranges, max degree {}", out.m(), sys.m(), out.degree_profile().max_degree);
        }
        Command::Match {
            system,
            sample_size,
            mode,
            headroom,
            trace,
            common,
        } => {
            let sys = import_system(&system)?;
            let policy = match sample_size {
                Some(size) => CandidatePolicy::Sampled {
                    seed: common.seed,
                    size,
                },
                None => CandidatePolicy::AllPairs,
            };
            let opts = MwuOptions {
                mode: match mode {
                    Arith::Exact => WeightMode::Exact,
                    Arith::Scaled => WeightMode::Scaled,
                },
                headroom,
                ..MwuOptions::default().with_policy(policy)
            };
            let (matching, _, report) = build_matching_mwu(&sys, opts)?;
            if let Some(path) = &trace {
                fs::write(path, matching.trace_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
            match common.format {
                Format::Json => match &common.out {
                    Some(path) => save_matching(&matching, Some(report.max_crossing), path)?,
                    None => print!("{}", matching.to_json(Some(report.max_crossing))),
                },
                Format::Csv => {
                    let mut out = String::from("x,y\n");
                    for &(x, y) in matching.pairs() {
                        let _ = writeln!(out, "{x},{y}");
                    }
                    emit(&common, &out)?;
                }
            }
            eprintln!("crossing number {} (range {:?})", report.max_crossing, report.argmax_range);
        }
        Command::Color {
            system,
            matching,
            mode,
            max_attempts,
            slack,
            common,
        } => {
            let sys = import_system(&system)?;
            let m = load_matching(&matching)?;
            let (coloring, disc) = match mode {
                ColorMode::Deterministic => {
                    let c = color_deterministic(&m);
                    let d = discrepancy(&sys, &c)?.max_abs;
                    (c, d)
                }
                ColorMode::Random => {
                    let r = color_random(&sys, &m, common.seed, max_attempts, slack)?;
                    eprintln!(
                        "attempts {}, threshold {} {}",
                        r.attempts,
                        r.threshold,
                        if r.threshold_met { "met" } else { "missed" }
                    );
                    (r.coloring, r.report.max_abs)
                }
            };
            match common.format {
                Format::Json => match &common.out {
                    Some(path) => save_coloring(&coloring, Some(disc), path)?,
                    None => print!("{}", coloring.to_json(Some(disc))),
                },
                Format::Csv => {
                    let mut out = String::from("point,sign\n");
                    for (i, s) in coloring.signs().iter().enumerate() {
                        let _ = writeln!(out, "{i},{s}");
                    }
                    emit(&common, &out)?;
                }
            }
            eprintln!("discrepancy {disc}");
        }
        Command::Disc {
            system,
            coloring,
            common,
        } => {
            let sys = import_system(&system)?;
            let (c, _) = load_coloring(&coloring)?;
            let rep = discrepancy(&sys, &c)?;
            let text = match common.format {
                Format::Json => to_json(serde_json::json!({
                    "max_abs": rep.max_abs,
                    "argmax_range": rep.argmax_range,
                    "per_range_sum": rep.per_range_sum,
                })),
                Format::Csv => {
                    let mut out = String::from("range,sum\n");
                    for (s, v) in rep.per_range_sum.iter().enumerate() {
                        let _ = writeln!(out, "{s},{v}");
                    }
                    out
                }
            };
            emit(&common, &text)?;
        }
        Command::Verify {
            system,
            matching,
            coloring,
            common,
        } => {
            let report = verify_artifacts(&system, matching.as_deref(), coloring.as_deref())?;
            let text = match common.format {
                Format::Json => to_json(serde_json::to_value(&report).expect("serializes")),
                Format::Csv => {
                    let mut out = String::from("check,passed,detail\n");
                    for c in &report.checks {
                        let _ = writeln!(out, "{},{},\"{}\"", c.name, c.passed, c.detail.replace('"', "'"));
                    }
                    out
                }
            };
            emit(&common, &text)?;
            if !report.all_passed() {
                return Err(Failure::Verify(report.render()));
            }
        }
        Command::Sweep { config, common } => {
            let mut cfg = SweepConfig::load(&config).map_err(|e| Failure::Config(e.into()))?;
            if let Some(out) = &common.out {
                cfg.output_path = out.clone();
            }
            let out = run_sweep_to_files(&cfg)?;
            if common.format == Format::Json && common.out.is_none() {
                print!("{}", out.summary_json());
            }
            report_sweep(&cfg.output_path, &out);
        }
    }
    Ok(())
}

fn write_system(sys: &lowcross::SetSystem, common: &Common) -> Result<()> {
    match common.format {
        Format::Json => match &common.out {
            Some(path) => save_system(sys, path)?,
            None => print!("{}", sys.to_json()),
        },
        Format::Csv => {
            let mut out = String::from("range,point\n");
            for (s, r) in sys.ranges().iter().enumerate() {
                for p in r.iter() {
                    let _ = writeln!(out, "{s},{p}");
                }
            }
            emit(common, &out)?;
        }
    }
    Ok(())
}

fn report_sweep(csv: &Path, out: &lowcross::bench::SweepOutput) {
    let s = &out.summary;
    eprintln!("{} records written to {}", out.records.len(), csv.display());
    eprintln!("summary written to {}", summary_path(csv).display());
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "n/a".into());
    eprintln!(
        "slope at n = {}: {} (t >= log2(n)^2 only: {})",
        s.largest_n,
        fmt(s.slope),
        fmt(s.slope_large_t)
    );
    eprintln!(
        "max N / predicted: {:.3}, cells above ceiling {}: {}",
        s.max_ratio,
        s.crossing_ceiling,
        s.ceiling_violations.len()
    );
    eprintln!("disc_rand <= sqrt(t) in {} of {} large-t cells", s.beck_fiala.satisfied, s.beck_fiala.cells);
    for f in &s.failures {
        eprintln!(
            "cell n={} t={} seed={} failed: {}",
            f.cell.n,
            f.cell.t,
            f.cell.seed,
            f.error
        );
    }
}
