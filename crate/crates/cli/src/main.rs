//! `ssys`: permanence analysis of planar S-systems from the command line.

mod input;
mod output;
mod plot;
mod sweep;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use ssys_core::dynamics::log_grid;
use ssys_core::replicator::{embed, SimplexState};
use ssys_core::scenarios::ScenarioArgs;
use ssys_core::{
    classify, classify_s_system, integrate_simplex, integrate_uv, permanence_probe, poincare_return_map,
    robust_permanence, Classification, CycleReport, IntegratorConfig, ProbeReport, RobustCase, SectionRay, TimeScale,
    Verdict,
};

use input::{Document, IntegratorOverrides, Model, Reduced};
use output::{fmt_short, record_line};

/// Bad input or usage; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Integration stopped before the horizon; exit code 4.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

const EXIT_PARSE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(name = "ssys", version, about = "Permanence analysis of planar S-systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify permanence and report the governing case.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate one trajectory in (u, v) or on the simplex.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Initial state: `u,v` for the plane or `x1,x2,x3,x4` for the simplex.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,1")]
        initial: Vec<f64>,
        #[arg(long, value_enum)]
        time_scale: Option<Scale>,
        /// Emit samples at this spacing from the dense output.
        #[arg(long)]
        sample_interval: Option<f64>,
        /// Write an SVG phase portrait.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Probe for a bounded global attractor from a ring of initial states.
    Probe {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20.0)]
        radius: f64,
        #[arg(long, default_value_t = 16)]
        points: usize,
        #[arg(long, value_enum, default_value = "orbital")]
        time_scale: Scale,
    },
    /// Locate limit cycles as fixed points of the first-return map.
    Cycles {
        #[command(flatten)]
        common: Common,
        /// Direction of the section ray, in radians.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        angle: f64,
        #[arg(long, default_value_t = 1e-3)]
        r_min: f64,
        #[arg(long, default_value_t = 1e3)]
        r_max: f64,
        #[arg(long, default_value_t = 60)]
        samples: usize,
    },
    /// Classify every point of a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `NAME=START:STOP:N`; repeat for a multi-dimensional grid.
        #[arg(long = "param", required = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Input document (TOML); `-` reads standard input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Named scenario: selkov, lotka, three-cycle or a gallery entry.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Physical,
    Orbital,
}

impl From<Scale> for TimeScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Physical => TimeScale::Physical,
            Scale::Orbital => TimeScale::Orbital,
        }
    }
}

impl Common {
    fn scenario_args(&self) -> Option<ScenarioArgs> {
        let args = ScenarioArgs {
            k: self.k,
            gamma: self.gamma,
            alpha: self.alpha,
            beta: self.beta,
            eps: self.eps,
            mu: self.mu,
        };
        (args != ScenarioArgs::default()).then_some(args)
    }

    fn overrides(&self) -> IntegratorOverrides {
        IntegratorOverrides {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            horizon: self.horizon,
            ..Default::default()
        }
    }

    fn load(&self) -> Result<Document> {
        let mut doc = match (&self.input, &self.scenario) {
            (Some(_), Some(_)) => bail!(UsageError("use either --input or --scenario, not both".into())),
            (Some(path), None) => input::read_document(path)?,
            (None, Some(name)) => Document {
                model: Model::Scenario(name.clone(), ScenarioArgs::default()),
                integrator: IntegratorOverrides::default(),
            },
            (None, None) => bail!(UsageError("an input is required: --input <file|-> or --scenario <name>".into())),
        };
        if let Some(flags) = self.scenario_args() {
            let Model::Scenario(_, args) = &mut doc.model else {
                bail!(UsageError("--k, --gamma, --alpha, --beta, --eps and --mu apply to scenarios only".into()));
            };
            let merge = |doc: Option<f64>, flag: Option<f64>| flag.or(doc);
            *args = ScenarioArgs {
                k: merge(args.k, flags.k),
                gamma: merge(args.gamma, flags.gamma),
                alpha: merge(args.alpha, flags.alpha),
                beta: merge(args.beta, flags.beta),
                eps: merge(args.eps, flags.eps),
                mu: merge(args.mu, flags.mu),
            };
        }
        doc.integrator = doc.integrator.merge(self.overrides());
        Ok(doc)
    }

    fn emit(&self, text: &str) -> Result<()> {
        let mut out = output::sink(self.out.as_deref())?;
        out.write_all(text.as_bytes())?;
        out.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct ClassifyRecord<'a> {
    source: String,
    #[serde(flatten)]
    classification: &'a Classification,
    robust: Option<RobustCase>,
}

#[derive(Serialize)]
struct ProbeRecord<'a> {
    source: String,
    #[serde(flatten)]
    report: &'a ProbeReport,
}

#[derive(Serialize)]
struct CycleRecord<'a> {
    source: String,
    #[serde(flatten)]
    report: &'a CycleReport,
}

#[derive(Serialize)]
struct SummaryRecord<'a> {
    summary: &'a sweep::Summary,
}

fn classify_document(doc: &Document) -> Result<(Classification, Option<RobustCase>)> {
    match doc.model.reduce()? {
        Reduced::Params(p) => Ok((classify(&p)?, robust_permanence(&p)?)),
        Reduced::NoEquilibrium => match &doc.model {
            Model::SSystem(spec, _) => Ok((classify_s_system(spec)?, None)),
            _ => unreachable!("only S-systems can lack an equilibrium"),
        },
    }
}

fn cmd_classify(common: &Common) -> Result<u8> {
    let doc = common.load()?;
    let (cl, robust) = classify_document(&doc)?;
    let text = match common.format {
        Format::Text => output::classification_text(&cl, robust),
        Format::Records => {
            let rec = ClassifyRecord {
                source: doc.model.describe(),
                classification: &cl,
                robust,
            };
            record_line(&rec)? + "\n"
        }
    };
    common.emit(&text)?;
    Ok(if cl.verdict == Verdict::Degenerate { EXIT_DEGENERATE } else { 0 })
}

fn cmd_simulate(
    common: &Common,
    initial: &[f64],
    time_scale: Option<Scale>,
    sample_interval: Option<f64>,
    plot_path: Option<&PathBuf>,
) -> Result<u8> {
    let doc = common.load()?;
    let p = doc.model.params()?;
    let overrides = doc.integrator.merge(IntegratorOverrides {
        time_scale: time_scale.map(TimeScale::from),
        sample_interval,
        ..Default::default()
    });
    let cfg = overrides.apply(IntegratorConfig::default());
    let traj = match *initial {
        [u, v] => integrate_uv(&p, [u, v], &cfg)?,
        [x1, x2, x3, x4] => {
            if cfg.time_scale == TimeScale::Orbital {
                bail!(UsageError("orbital time applies to (u, v) trajectories only".into()));
            }
            let x0 = SimplexState::new([x1, x2, x3, x4])?;
            integrate_simplex(&embed(&p), &x0, &cfg)?
        }
        _ => bail!(UsageError(format!(
            "--initial needs 2 values (u,v) or 4 values (x1..x4), got {}",
            initial.len()
        ))),
    };
    let mut out = output::sink(common.out.as_deref())?;
    output::write_csv(&mut *out, &traj)?;
    out.flush()?;
    if let Some(path) = plot_path {
        if traj.dim != 2 {
            bail!(UsageError("--plot needs a (u, v) trajectory".into()));
        }
        let orbit: Vec<[f64; 2]> = traj.states.iter().map(|s| [s[0], s[1]]).collect();
        let title = format!("{} from ({}, {})", doc.model.describe(), fmt_short(initial[0]), fmt_short(initial[1]));
        std::fs::write(path, plot::phase_portrait(&title, &[orbit]))?;
    }
    let t_end = traj.times.last().copied().unwrap_or(0.0);
    let events: Vec<String> = traj.events.iter().map(|e| format!("{:?} at t = {}", e.kind, fmt_short(e.t))).collect();
    eprintln!(
        "{} samples, t_end = {}, completed: {}, unbounded: {}{}",
        traj.times.len(),
        fmt_short(t_end),
        traj.completed,
        traj.unbounded(),
        if events.is_empty() { String::new() } else { format!(", events: {}", events.join("; ")) }
    );
    if !traj.completed {
        bail!(NumericalFailure(format!(
            "integration stopped at t = {} before the horizon {}",
            fmt_short(t_end),
            fmt_short(cfg.horizon)
        )));
    }
    Ok(0)
}

fn cmd_probe(common: &Common, radius: f64, points: usize, scale: Scale) -> Result<u8> {
    let doc = common.load()?;
    let p = doc.model.params()?;
    let overrides = doc.integrator.merge(IntegratorOverrides {
        time_scale: Some(scale.into()),
        ..Default::default()
    });
    let cfg = overrides.apply(IntegratorConfig::orbital(3000.0));
    let rep = permanence_probe(&p, &cfg, radius, points)?;
    let text = match common.format {
        Format::Records => {
            record_line(&ProbeRecord {
                source: doc.model.describe(),
                report: &rep,
            })? + "\n"
        }
        Format::Text => {
            let mut s = format!(
                "verdict: {:?}\nring radius {}, escape radius {}, horizon {} ({:?} time)\n",
                rep.verdict,
                fmt_short(rep.ring_radius),
                fmt_short(rep.escape_radius),
                fmt_short(rep.horizon),
                rep.time_scale
            );
            s += "start_u        start_v        behaviour   final_norm     tail_max\n";
            for o in &rep.orbits {
                s += &format!(
                    "{:<14} {:<14} {:<11} {:<14} {}\n",
                    fmt_short(o.start[0]),
                    fmt_short(o.start[1]),
                    format!("{:?}", o.behaviour),
                    fmt_short(o.final_norm),
                    fmt_short(o.tail_max)
                );
            }
            s
        }
    };
    common.emit(&text)?;
    Ok(0)
}

fn cmd_cycles(common: &Common, angle: f64, r_min: f64, r_max: f64, samples: usize) -> Result<u8> {
    let doc = common.load()?;
    let p = doc.model.params()?;
    if !(r_min > 0.0 && r_max > r_min && samples >= 2) {
        bail!(UsageError("need 0 < r-min < r-max and at least 2 samples".into()));
    }
    let cfg = doc.integrator.apply(IntegratorConfig::orbital(1e4));
    let rep = poincare_return_map(&p, &SectionRay { angle }, &log_grid(r_min, r_max, samples), &cfg)?;
    let text = match common.format {
        Format::Records => {
            record_line(&CycleRecord {
                source: doc.model.describe(),
                report: &rep,
            })? + "\n"
        }
        Format::Text => {
            let returning = rep.samples.iter().filter(|(_, r)| r.is_some()).count();
            let mut s = format!(
                "limit cycles: {}\nsection angle {}, {} of {} samples returned\n",
                rep.count,
                fmt_short(angle),
                returning,
                rep.samples.len()
            );
            for f in &rep.fixed_points {
                s += &format!("r = {:.10e}  slope = {:.8}  {:?}\n", f.r, f.slope, f.stability);
            }
            s
        }
    };
    common.emit(&text)?;
    Ok(0)
}

fn cmd_sweep(common: &Common, params: &[String]) -> Result<u8> {
    let doc = common.load()?;
    let ranges = params.iter().map(|s| sweep::Range::parse(s)).collect::<Result<Vec<_>>>()?;
    let (rows, summary) = sweep::run(&doc.model, &ranges)?;
    let mut out = output::sink(common.out.as_deref())?;
    match common.format {
        Format::Records => {
            for row in &rows {
                writeln!(out, "{}", record_line(row)?)?;
            }
            writeln!(out, "{}", record_line(&SummaryRecord { summary: &summary })?)?;
        }
        Format::Text => {
            let names: Vec<&str> = ranges.iter().map(|r| r.name.as_str()).collect();
            writeln!(out, "{}\tverdict\tcase", names.join("\t"))?;
            for row in &rows {
                let values: Vec<String> = row
                    .point
                    .values()
                    .map(|v| v.as_f64().map(fmt_short).unwrap_or_default())
                    .collect();
                let case = row.classification.case.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
                writeln!(out, "{}\t{}\t{}", values.join("\t"), row.classification.verdict, case)?;
            }
            writeln!(
                out,
                "# {} points: {} permanent, {} not permanent, {} undetermined, {} degenerate",
                summary.points, summary.permanent, summary.not_permanent, summary.undetermined, summary.degenerate
            )?;
        }
    }
    out.flush()?;
    Ok(0)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("SSYS_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("SSYS_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    match &cli.command {
        Command::Classify { common } => cmd_classify(common),
        Command::Simulate {
            common,
            initial,
            time_scale,
            sample_interval,
            plot,
        } => cmd_simulate(common, initial, *time_scale, *sample_interval, plot.as_ref()),
        Command::Probe {
            common,
            radius,
            points,
            time_scale,
        } => cmd_probe(common, *radius, *points, *time_scale),
        Command::Cycles {
            common,
            angle,
            r_min,
            r_max,
            samples,
        } => cmd_cycles(common, *angle, *r_min, *r_max, *samples),
        Command::Sweep { common, params } => cmd_sweep(common, params),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use ssys_core::Error as E;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_PARSE;
        }
        if cause.is::<NumericalFailure>() {
            return EXIT_NUMERICAL;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Degenerate(_) | E::CollinearPoints => EXIT_DEGENERATE,
                E::Integration { .. } => EXIT_NUMERICAL,
                _ => EXIT_PARSE,
            };
        }
    }
    1
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
