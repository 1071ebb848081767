//! The `univalence` command line.
//!
//! Every run resolves its flags into a [`RunConfig`], which is embedded in the
//! JSON report. Passing a report (or just its `config` block) back through
//! `--config` repeats the run.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::{parse_complex, HFunction, MeromorphicFn};
use crate::criteria::{Criterion, CriterionParams};
use crate::error::{Error, Result};
use crate::loewner::{audit_pommerenke, default_t_samples, default_z_samples, ChainSpec};
use crate::oracle::injectivity_scan;
use crate::report::{Point, SCHEMA_VERSION};
use crate::scan::{issue_verdict, scan, write_grid_csv, Outcome, SamplingPlan, DEFAULT_TOL};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "univalence", version, about = "Numerical univalence criteria on the exterior unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Option<CommandArgs>,

    /// Repeat the run recorded in a report (or a bare config block)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the JSON report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Write every evaluated sample as CSV (check only)
    #[arg(long = "grid-csv", global = true, value_name = "PATH")]
    grid_csv: Option<PathBuf>,

    /// Worker threads for data-parallel evaluation
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Estimate the supremum of one criterion and issue a verdict
    Check(RunArgs),
    /// Repeat `check` over several alpha values and/or both variants
    Sweep(RunArgs),
    /// Audit the Loewner chain built from f, g, h, alpha
    Chain(RunArgs),
    /// Search the grid for injectivity failures of f
    Oracle(RunArgs),
    /// List the built-in function forms
    Catalog,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value = "identity")]
    f: String,
    #[arg(long, default_value = "identity")]
    g: String,
    #[arg(long, default_value = "hconst")]
    h: String,
    /// `re` or `re,im`; repeat for sweeps
    #[arg(long)]
    alpha: Vec<String>,
    #[arg(long, value_enum, default_value_t = Criterion::Theorem1)]
    criterion: Criterion,
    /// Use the first power of f''/f' - g''/g' instead of its square
    #[arg(long)]
    unsquared: bool,
    /// Sweep both the squared and the unsquared variant
    #[arg(long = "both-variants")]
    both_variants: bool,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    radial: Option<usize>,
    #[arg(long)]
    angular: Option<usize>,
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Comma-separated times for `chain`
    #[arg(long = "t-samples", value_name = "LIST")]
    t_samples: Option<String>,
    #[arg(long = "collision-tol")]
    collision_tol: Option<f64>,
    #[arg(long = "separation-floor")]
    separation_floor: Option<f64>,
    /// Reserved; every run is deterministic
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Sweep,
    Chain,
    Oracle,
    Catalog,
}

/// Everything that determines a run's result. Output paths and the worker
/// count are deliberately absent: they do not change the numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub f: String,
    pub g: String,
    pub h: String,
    pub alpha: Vec<Point>,
    pub criterion: Criterion,
    pub squared_variant: bool,
    pub both_variants: bool,
    pub plan: SamplingPlan,
    pub tol: f64,
    pub t_samples: Vec<f64>,
    pub collision_tol: Option<f64>,
    pub separation_floor: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    fn from_args(command: Command, a: RunArgs) -> Result<Self> {
        let alpha = if a.alpha.is_empty() {
            vec![Point { re: 0.5, im: 0.0 }]
        } else {
            a.alpha
                .iter()
                .map(|s| parse_complex(s).map(Point::from))
                .collect::<Result<_>>()?
        };
        if alpha.len() > 1 && command != Command::Sweep {
            return Err(Error::Usage("only `sweep` accepts several --alpha values".into()));
        }
        let d = SamplingPlan::default();
        let plan = SamplingPlan {
            r_min: a.rmin.unwrap_or(d.r_min),
            r_max: a.rmax.unwrap_or(d.r_max),
            radial_count: a.radial.unwrap_or(d.radial_count),
            angular_count: a.angular.unwrap_or(d.angular_count),
            refine_depth: a.refine.unwrap_or(d.refine_depth),
            refine_factor: d.refine_factor,
        };
        let t_samples = match &a.t_samples {
            None => default_t_samples(),
            Some(list) => list
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Usage(format!("bad time `{x}` in --t-samples")))
                })
                .collect::<Result<_>>()?,
        };
        // becker and nehari ignore g and h; record the neutral choices
        let (g, h) = match a.criterion {
            Criterion::Becker | Criterion::Nehari if command != Command::Chain && command != Command::Oracle => {
                ("identity".to_string(), "hconst".to_string())
            }
            _ => (a.g, a.h),
        };
        Ok(Self {
            command,
            f: a.f,
            g,
            h,
            alpha,
            criterion: a.criterion,
            squared_variant: !a.unsquared,
            both_variants: a.both_variants,
            plan,
            tol: a.tol,
            t_samples,
            collision_tol: a.collision_tol,
            separation_floor: a.separation_floor,
            seed: a.seed,
        })
    }

    fn functions(&self) -> Result<(MeromorphicFn, MeromorphicFn, HFunction)> {
        Ok((self.f.parse()?, self.g.parse()?, self.h.parse()?))
    }

    fn params(&self, alpha: Complex64, squared: bool) -> Result<CriterionParams> {
        let (f, g, h) = self.functions()?;
        let mut p = CriterionParams::new(f, g, h, alpha, self.criterion);
        p.squared_variant = squared;
        Ok(p)
    }

    fn single_alpha(&self) -> Result<Complex64> {
        match self.alpha.as_slice() {
            [a] => Ok((*a).into()),
            _ => Err(Error::Usage("exactly one alpha is required".into())),
        }
    }
}

struct Outputs {
    json: Option<PathBuf>,
    grid_csv: Option<PathBuf>,
}

struct Finished {
    result: Value,
    exit: i32,
    summary: String,
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Usage(format!("cannot write {}: {e}", path.display()))
}

fn verdict_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::Inconclusive => "inconclusive",
    }
}

fn run_check(cfg: &RunConfig, out: &Outputs) -> Result<Finished> {
    let p = cfg.params(cfg.single_alpha()?, cfg.squared_variant)?;
    let trace = scan(&p, &cfg.plan)?;
    if let Some(path) = &out.grid_csv {
        let file = fs::File::create(path).map_err(|e| io_error(path, e))?;
        write_grid_csv(&trace.samples, std::io::BufWriter::new(file)).map_err(|e| io_error(path, e))?;
    }
    let rep = &trace.report;
    let v = issue_verdict(rep, cfg.tol);
    Ok(Finished {
        result: json!({
            "criterion": cfg.criterion,
            "sup": rep.sup_estimate,
            "argmax": Point::from(rep.argmax),
            "argmax_at_tail": rep.argmax_at_tail,
            "tail": rep.tail_estimate,
            "converged": rep.refinement_converged,
            "samples": rep.samples_evaluated,
            "verdict": verdict_name(v.outcome),
            "margin": v.margin,
            "tol": v.tol,
            "scope": "sampled",
        }),
        exit: v.outcome.exit_code(),
        summary: format!(
            "{}: sup = {} at {} -> {} (on {} samples)",
            cfg.criterion,
            rep.sup_estimate,
            rep.argmax,
            verdict_name(v.outcome),
            rep.samples_evaluated
        ),
    })
}

fn run_sweep(cfg: &RunConfig) -> Result<Finished> {
    let variants: Vec<bool> = if cfg.both_variants {
        vec![true, false]
    } else {
        vec![cfg.squared_variant]
    };
    let mut rows = Vec::new();
    let (mut any_fail, mut any_inconclusive) = (false, false);
    let mut summary = Vec::new();
    for a in &cfg.alpha {
        for &sq in &variants {
            let p = cfg.params((*a).into(), sq)?;
            let rep = scan(&p, &cfg.plan)?.report;
            let v = issue_verdict(&rep, cfg.tol);
            any_fail |= v.outcome == Outcome::Fail;
            any_inconclusive |= v.outcome == Outcome::Inconclusive;
            summary.push(format!(
                "alpha = {}{}: sup = {} -> {}",
                Complex64::from(*a),
                if sq { "" } else { " (unsquared)" },
                rep.sup_estimate,
                verdict_name(v.outcome)
            ));
            rows.push(json!({
                "alpha": a,
                "squared_variant": sq,
                "sup": rep.sup_estimate,
                "argmax": Point::from(rep.argmax),
                "tail": rep.tail_estimate,
                "converged": rep.refinement_converged,
                "verdict": verdict_name(v.outcome),
                "margin": v.margin,
            }));
        }
    }
    let exit = if any_fail {
        EXIT_FAIL
    } else if any_inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    };
    Ok(Finished {
        result: json!({ "criterion": cfg.criterion, "rows": rows, "scope": "sampled" }),
        exit,
        summary: summary.join("\n"),
    })
}

fn run_chain(cfg: &RunConfig) -> Result<Finished> {
    let (f, g, h) = cfg.functions()?;
    let mut spec = ChainSpec::new(f, g, h, cfg.single_alpha()?);
    spec.squared_variant = cfg.squared_variant;
    let rep = audit_pommerenke(&spec, &default_z_samples(), &cfg.t_samples);
    let summary = format!(
        "max |w| = {}, min Re p = {}, {} evaluation errors -> {}",
        rep.max_abs_w,
        rep.min_re_p,
        rep.evaluation_errors.len(),
        if rep.pass { "pass" } else { "fail" }
    );
    Ok(Finished {
        exit: if rep.pass { EXIT_PASS } else { EXIT_FAIL },
        result: serde_json::to_value(&rep).map_err(|e| Error::EvaluationFailure(e.to_string()))?,
        summary,
    })
}

fn run_oracle(cfg: &RunConfig) -> Result<Finished> {
    let f: MeromorphicFn = cfg.f.parse()?;
    let rep = injectivity_scan(&f, &cfg.plan, cfg.collision_tol, cfg.separation_floor)?;
    let summary = format!("{} collisions on {} grid points", rep.collisions.len(), rep.grid_size);
    Ok(Finished {
        exit: if rep.injective_on_grid() { EXIT_PASS } else { EXIT_FAIL },
        result: serde_json::to_value(&rep).map_err(|e| Error::EvaluationFailure(e.to_string()))?,
        summary,
    })
}

const CATALOG: &[(&str, &str)] = &[
    ("identity", "zeta"),
    ("joukowski:<c>", "zeta + c/zeta"),
    ("laurent:<b>;<b0>;<b1>,<b2>,...", "b zeta + b0 + b1/zeta + b2/zeta^2 + ..."),
    ("moebius:<a>,<b>,<c>,<d>:<inner>", "(a F + b)/(c F + d), F the inner function"),
    ("hconst", "h = 1"),
    ("hinvsq:<c>", "h = 1 + c/zeta^2"),
    ("heven:<h2>,<h4>,...", "h = 1 + h2/zeta^2 + h4/zeta^4 + ..."),
];

fn run_catalog() -> Finished {
    let entries: Vec<Value> = CATALOG
        .iter()
        .map(|(form, meaning)| json!({ "form": form, "meaning": meaning }))
        .collect();
    let width = CATALOG.iter().map(|(f, _)| f.len()).max().unwrap_or(0);
    let mut text: Vec<String> = CATALOG
        .iter()
        .map(|(form, meaning)| format!("{form:<width$}  {meaning}"))
        .collect();
    text.push("complex parameters: re | re,im | 0.5-0.2j (the j form inside lists)".into());
    text.push(format!(
        "criteria: {}",
        Criterion::ALL.iter().map(|c| c.name()).collect::<Vec<_>>().join(", ")
    ));
    Finished {
        result: json!({ "functions": entries }),
        exit: EXIT_PASS,
        summary: text.join("\n"),
    }
}

fn load_config(path: &std::path::Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Usage(format!("{} is not JSON: {e}", path.display())))?;
    let block = value.get("config").cloned().unwrap_or(value);
    serde_json::from_value(block).map_err(|e| Error::Usage(format!("bad config in {}: {e}", path.display())))
}

fn execute(cfg: &RunConfig, out: &Outputs) -> Result<(Finished, f64)> {
    cfg.plan.validate()?;
    let start = Instant::now();
    let done = match cfg.command {
        Command::Check => run_check(cfg, out)?,
        Command::Sweep => run_sweep(cfg)?,
        Command::Chain => run_chain(cfg)?,
        Command::Oracle => run_oracle(cfg)?,
        Command::Catalog => run_catalog(),
    };
    Ok((done, start.elapsed().as_secs_f64() * 1e3))
}

fn emit(cfg: &RunConfig, done: Finished, timing_ms: f64, out: &Outputs, stdout: &mut dyn Write) -> Result<i32> {
    let report = json!({
        "schema": SCHEMA_VERSION,
        "config": cfg,
        "result": done.result,
        "timing_ms": timing_ms,
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::EvaluationFailure(e.to_string()))?;
    let write_err = |e: std::io::Error| Error::Usage(format!("cannot write output: {e}"));
    match &out.json {
        Some(path) => {
            fs::write(path, text + "\n").map_err(|e| io_error(path, e))?;
            writeln!(stdout, "{}", done.summary).map_err(write_err)?;
        }
        None if cfg.command == Command::Catalog => writeln!(stdout, "{}", done.summary).map_err(write_err)?,
        None => writeln!(stdout, "{text}").map_err(write_err)?,
    }
    Ok(done.exit)
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn run_with_io<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_ERROR,
            };
        }
    };
    let outputs = Outputs {
        json: cli.json,
        grid_csv: cli.grid_csv,
    };
    let config = match (cli.config, cli.command) {
        (Some(path), None) => load_config(&path),
        (Some(_), Some(_)) => Err(Error::Usage("--config replaces the subcommand; give one or the other".into())),
        (None, None) => Err(Error::Usage("a subcommand is required (try --help)".into())),
        (None, Some(CommandArgs::Catalog)) => RunConfig::from_args(Command::Catalog, RunArgs::parse_default()),
        (None, Some(CommandArgs::Check(a))) => RunConfig::from_args(Command::Check, a),
        (None, Some(CommandArgs::Sweep(a))) => RunConfig::from_args(Command::Sweep, a),
        (None, Some(CommandArgs::Chain(a))) => RunConfig::from_args(Command::Chain, a),
        (None, Some(CommandArgs::Oracle(a))) => RunConfig::from_args(Command::Oracle, a),
    };
    let result = config.and_then(|cfg| {
        let (done, ms) = match cli.workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Usage(format!("cannot start {n} workers: {e}")))
                .and_then(|pool| pool.install(|| execute(&cfg, &outputs)))?,
            None => execute(&cfg, &outputs)?,
        };
        emit(&cfg, done, ms, &outputs, stdout)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

impl RunArgs {
    fn parse_default() -> Self {
        #[derive(Parser)]
        struct Only {
            #[command(flatten)]
            args: RunArgs,
        }
        Only::parse_from(["univalence"]).args
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_io(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
