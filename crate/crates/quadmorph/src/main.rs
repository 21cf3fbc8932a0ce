use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use quadmorph::bench::{self, Algo, BenchConfig};
use quadmorph::io::{read_config, read_json, write_classes, ConfigJson, ParseError, PlanJson, ReportJson};
use quadmorph::{classify, exit, render};
use quadmorph_core::birrt::{birrt_plan, BirrtParams};
use quadmorph_core::isomap::BitParams;
use quadmorph_core::plan::{plan, validate_plan, PlanParams};
use quadmorph_core::polyomino::{enumerate_polyominoes, Flavor};
use quadmorph_core::validate::Mode;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "quadmorph", version, about = "Reconfiguration planner for deformable lattice modules", after_help = exit::HELP)]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Paper)]
    mode: ModeArg,
    /// Machine-readable output where the command also has a text form.
    #[arg(long, global = true)]
    json: bool,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Paper,
    Strict,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Paper => Mode::Paper,
            ModeArg::Strict => Mode::Strict,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Planner,
    Birrt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlavorArg {
    Free,
    OneSided,
    Fixed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Svg,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Plan a reconfiguration between two configuration files.
    Plan {
        start: PathBuf,
        goal: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoArg::Planner)]
        algo: AlgoArg,
        #[arg(long, default_value_t = BitParams::default().max_intermediates)]
        max_intermediates: usize,
        #[arg(long, default_value_t = BitParams::default().max_samples)]
        max_samples: usize,
        /// Drop connect/disconnect pairs that cancel out.
        #[arg(long)]
        prune: bool,
        /// Iteration cap for the sampling baseline.
        #[arg(long, default_value_t = 1000)]
        max_iterations: usize,
    },
    /// Replay a plan file and report the first failing step.
    Validate { plan: PathBuf, start: PathBuf, goal: PathBuf },
    /// Run the seeded planner-versus-baseline benchmark and emit CSV rows.
    Bench {
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgoArg::Planner, AlgoArg::Birrt])]
        algos: Vec<AlgoArg>,
        #[arg(long, default_value_t = 1000)]
        max_iterations: usize,
    },
    /// Group all free shapes of N modules by reachable loop size.
    Classify { n: usize },
    /// List every polyomino with N cells.
    Enum {
        n: usize,
        #[arg(long, value_enum, default_value_t = FlavorArg::Free)]
        flavor: FlavorArg,
    },
    /// Draw a configuration or plan file.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
    },
}

/// Carries a non-zero exit code for outcomes that are not errors in themselves.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Exit(&'static str, i32);

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("cannot write to stdout"),
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn load_config(p: &Path) -> Result<quadmorph_core::Configuration> {
    Ok(read_config(p)?)
}

fn run(cli: Cli) -> Result<()> {
    let mode: Mode = cli.mode.into();
    match cli.command {
        Command::Plan { start, goal, algo, max_intermediates, max_samples, prune, max_iterations } => {
            let (s, g) = (load_config(&start)?, load_config(&goal)?);
            let t = Instant::now();
            let out = match algo {
                AlgoArg::Planner => {
                    let bit = BitParams { seed: cli.seed, max_intermediates, max_samples, ..BitParams::default() };
                    let p = plan(&s, &g, &PlanParams { bit, mode, prune })?;
                    PlanJson::from_plan(&p)
                }
                AlgoArg::Birrt => {
                    let r = birrt_plan(&s, &g, &BirrtParams { seed: cli.seed, max_iterations })?;
                    PlanJson::from_birrt(&s, &g, &r)
                }
            };
            eprintln!("{} steps, {} hops, {:.1} ms", out.steps, out.hops.len(), t.elapsed().as_secs_f64() * 1e3);
            emit(&cli.out, &pretty(&out))
        }
        Command::Validate { plan, start, goal } => {
            let p: PlanJson = read_json(&plan)?;
            let (s, g) = (load_config(&start)?, load_config(&goal)?);
            let report = validate_plan(&s, &g, &p.hops()?, &p.assignment(), mode);
            emit(&cli.out, &pretty(&ReportJson::from(&report)))?;
            if report.ok {
                Ok(())
            } else {
                Err(Exit("plan failed validation", exit::VALIDATION_FAILED).into())
            }
        }
        Command::Bench { n, pairs, reps, algos, max_iterations } => {
            let algos = algos
                .into_iter()
                .map(|a| match a {
                    AlgoArg::Planner => Algo::Planner,
                    AlgoArg::Birrt => Algo::Birrt,
                })
                .collect();
            let mut plan = PlanParams { mode, ..PlanParams::default() };
            plan.bit.seed = cli.seed;
            let cfg = BenchConfig { n, pairs, reps, seed: cli.seed, algos, plan, birrt_iterations: max_iterations };
            let r = bench::run(&cfg);
            for a in &r.aggregates {
                eprintln!(
                    "{:8} success {:.3}  avg min steps {}  mean ms {:.2}",
                    a.algo.name(),
                    a.success_ratio,
                    a.avg_min_steps.map_or("-".into(), |s| format!("{s:.2}")),
                    a.mean_ms
                );
            }
            if cli.json {
                emit(&cli.out, &pretty(&json!({ "rows": r.rows(), "aggregates": r.aggregates })))
            } else {
                let mut buf = Vec::new();
                bench::write_csv(&r.rows(), &mut buf)?;
                emit(&cli.out, &String::from_utf8(buf)?)
            }
        }
        Command::Classify { n } => {
            let c = classify::isotypy_classes(n)?;
            for m in &c.mismatches {
                eprintln!("note: {m:?}");
            }
            if cli.json {
                let classes: Vec<_> =
                    c.s_values.iter().map(|&s| json!({ "S": s, "shapes": c.class(s).iter().map(|p| p.code()).collect::<Vec<_>>() })).collect();
                emit(&cli.out, &pretty(&json!({ "n": n, "classes": classes })))
            } else {
                let mut buf = Vec::new();
                write_classes(&c, &mut buf)?;
                emit(&cli.out, &String::from_utf8(buf)?)
            }
        }
        Command::Enum { n, flavor } => {
            let flavor = match flavor {
                FlavorArg::Free => Flavor::Free,
                FlavorArg::OneSided => Flavor::OneSided,
                FlavorArg::Fixed => Flavor::Fixed,
            };
            let shapes = enumerate_polyominoes(n, flavor);
            if cli.json {
                let configs: Vec<ConfigJson> = shapes.iter().map(|p| ConfigJson::from(&p.to_config())).collect();
                emit(&cli.out, &pretty(&configs))
            } else {
                let mut text = String::new();
                for p in &shapes {
                    text.push_str(&p.code());
                    text.push('\n');
                }
                eprintln!("{} shapes", shapes.len());
                emit(&cli.out, &text)
            }
        }
        Command::Render { file, format } => {
            let value: serde_json::Value = read_json(&file)?;
            let text = if value.get("hops").is_some() {
                let p: PlanJson = serde_json::from_value(value).map_err(ParseError::from)?;
                let start = quadmorph_core::Configuration::try_from(&p.start)?;
                let hops = p.hops()?;
                match format {
                    Format::Svg => render::plan_svg(&start, &hops),
                    Format::Dot => render::plan_dot(&start, &hops),
                }
            } else {
                let j: ConfigJson = serde_json::from_value(value).map_err(ParseError::from)?;
                let c = quadmorph_core::Configuration::try_from(&j)?;
                match format {
                    Format::Svg => render::config_svg(&c),
                    Format::Dot => render::config_dot(&c),
                }
            };
            emit(&cli.out, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = match e.downcast_ref::<Exit>() {
                Some(x) => x.1,
                None => exit::code(&e),
            };
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}
