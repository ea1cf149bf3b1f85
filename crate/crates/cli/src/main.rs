use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use retroframe::io::{self, fmt_g17, fmt_short, VectorRepr};
use retroframe::retro::{self, OmegaSubset};
use retroframe::scenarios::{self, ScenarioConfig, ScenarioReport};
use retroframe::{dual, Error, Frame, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "retroframe",
    version,
    about = "Frames on finite measure spaces: bounds, duals, biorthogonality"
)]
struct Cli {
    /// Tolerance for frame, dual and biorthogonality tests.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of nested spans for distance profiles.
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal frame bounds.
    Bounds { frame: PathBuf },
    /// Bessel/frame/tight/Parseval/exact flags.
    Classify {
        frame: PathBuf,
        /// Also test whether the frame survives removing these labels.
        #[arg(long, value_delimiter = ',')]
        remove: Vec<String>,
    },
    #[command(subcommand)]
    Dual(DualCommand),
    /// Biorthogonality of G against F outside Omega0.
    Biorth(BiorthArgs),
    /// Distance of each vector to the span of the others.
    Exactness { frame: PathBuf },
    /// Distances of a vector to the nested spans of G.
    DistanceProfile {
        g: PathBuf,
        /// Comma-separated reals or re:im pairs.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    #[command(subcommand)]
    Retro(RetroCommand),
    #[command(subcommand)]
    Scenario(ScenarioCommand),
    /// Midpoint-rule measure space on [a, b).
    Quadrature {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum DualCommand {
    /// Canonical dual, written as a frame file.
    Canonical { frame: PathBuf },
    /// Canonical dual followed by seeded perturbed duals.
    Alternates {
        frame: PathBuf,
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, default_value_t = 1.0)]
        magnitude: f64,
    },
    /// Reconstruction residual of the pair (F, G).
    Verify { f: PathBuf, g: PathBuf },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct BiorthArgs {
    #[command(subcommand)]
    command: Option<BiorthCommand>,
    #[arg(required = true)]
    f: Option<PathBuf>,
    #[arg(required = true)]
    g: Option<PathBuf>,
    /// Comma-separated labels excluded from the constraints.
    #[arg(long, value_delimiter = ',')]
    omega0: Vec<String>,
}

#[derive(Subcommand)]
enum BiorthCommand {
    /// Minimal-norm biorthogonal family, written as a frame file.
    Construct {
        f: PathBuf,
        #[arg(long, value_delimiter = ',')]
        omega0: Vec<String>,
    },
}

#[derive(Subcommand)]
enum RetroCommand {
    /// DUAL_CONFIRMED, NO_DUAL_WITNESS or INCONCLUSIVE.
    Verdict {
        f: PathBuf,
        #[arg(long)]
        candidate: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        omega0: Vec<String>,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    Run {
        name: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    List,
}

enum Failure {
    /// Bad arguments, unreadable or malformed input.
    Input(String),
    /// The requested object does not exist (infeasible biorthogonal system).
    Unmet(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible { .. } => Failure::Unmet(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

enum Report {
    Value(Value),
    /// A frame file, printed verbatim in JSON mode so it re-parses bit-exactly.
    Frame(Frame),
    Scenario(ScenarioReport),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|r| emit(&r, cli.output).map(|()| r)) {
        Ok(Report::Scenario(r)) if !r.all_pass => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Unmet(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> Outcome<Frame> {
    io::read_frame(path).map_err(|e| match e {
        Error::Io(err) => Failure::Input(format!("{}: {err}", path.display())),
        other => other.into(),
    })
}

fn omega(labels: &[String]) -> OmegaSubset {
    OmegaSubset::from_labels(labels.iter().filter(|l| !l.is_empty()).cloned())
}

fn value<T: Serialize>(x: &T) -> Outcome<Value> {
    serde_json::to_value(x).map_err(|e| Failure::Input(e.to_string()))
}

fn frame_value(f: &Frame) -> Outcome<Value> {
    let text = io::frame_to_json(f)?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(e.to_string()))
}

fn run(cli: &Cli) -> Outcome<Report> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::Input(format!("--tol must be positive, got {tol}")));
    }
    let report = match &cli.command {
        Command::Bounds { frame } => {
            let b = load(frame)?.optimal_bounds();
            Report::Value(json!({ "lower": b.lower, "upper": b.upper }))
        }
        Command::Classify { frame, remove } => {
            let f = load(frame)?;
            let mut v = value(&f.classify(tol))?;
            if !remove.is_empty() {
                let idx = f.indices_of(remove)?;
                v["removed"] = json!(remove);
                v["remains_frame"] = json!(f.remains_frame_without(&idx, tol));
            }
            Report::Value(v)
        }
        Command::Dual(DualCommand::Canonical { frame }) => Report::Frame(dual::canonical_dual(&load(frame)?, tol)?),
        Command::Dual(DualCommand::Alternates {
            frame,
            count,
            magnitude,
        }) => {
            let alts = dual::alternate_duals(&load(frame)?, *count, cli.seed, *magnitude, tol)?;
            let duals = alts.duals.iter().map(frame_value).collect::<Outcome<Vec<_>>>()?;
            Report::Value(json!({
                "unique": alts.unique,
                "kernel_dim": alts.kernel_dim,
                "seed": cli.seed,
                "duals": duals,
            }))
        }
        Command::Dual(DualCommand::Verify { f, g }) => {
            Report::Value(value(&dual::verify_hilbert_dual(&load(f)?, &load(g)?, tol)?)?)
        }
        Command::Biorth(args) => match &args.command {
            Some(BiorthCommand::Construct { f, omega0 }) => {
                Report::Frame(retro::min_norm_biorthogonal(&load(f)?, &omega(omega0), tol)?)
            }
            None => {
                let (f, g) = (args.f.as_deref().unwrap(), args.g.as_deref().unwrap());
                Report::Value(value(&retro::check_biorthogonality(
                    &load(f)?,
                    &load(g)?,
                    &omega(&args.omega0),
                    tol,
                )?)?)
            }
        },
        Command::Exactness { frame } => {
            let f = load(frame)?;
            let distances = retro::exactness_profile(&f);
            let exact = retro::is_exact_by_distance(&distances, tol);
            Report::Value(json!({ "labels": f.space().labels(), "distances": distances, "is_exact": exact }))
        }
        Command::DistanceProfile { g, vector } => {
            let g = load(g)?;
            let (x, _) = io::parse_vector_arg(vector)?;
            let dp = retro::distance_profile(&g, &x, cli.depth)?;
            let last = dp.distances.last().copied().unwrap_or_else(|| x.norm());
            Report::Value(json!({
                "depth": dp.distances.len(),
                "distances": dp.distances,
                "in_span": last <= tol,
            }))
        }
        Command::Retro(RetroCommand::Verdict { f, candidate, omega0 }) => {
            let f = load(f)?;
            let candidate = candidate.as_deref().map(load).transpose()?;
            let v = retro::retro_dual_verdict(&f, &omega(omega0), candidate.as_ref(), tol)?;
            let field = v.candidate.field();
            Report::Value(json!({
                "verdict": v.verdict,
                "max_biorth_residual": v.biorth.max_residual,
                "a0": v.candidate_bounds.lower,
                "b0": v.candidate_bounds.upper,
                "rank_deficit": v.rank_deficit,
                "witness": v.witness.as_ref().map(|y| VectorRepr::encode(y, field)),
                "truncation_dim": v.truncation_dim,
                "evidence": v.evidence.as_ref().map(|e| &e.distances),
                "note": v.note,
            }))
        }
        Command::Scenario(ScenarioCommand::Run { name, n }) => {
            let cfg = ScenarioConfig { tol, seed: cli.seed };
            Report::Scenario(scenarios::run_scenario_with(name, *n, &cfg)?)
        }
        Command::Scenario(ScenarioCommand::List) => Report::Value(value(&scenarios::list_scenarios())?),
        Command::Quadrature { a, b, m } => {
            let q = retroframe::uniform_quadrature(*a, *b, *m)?;
            let text = io::quadrature_to_json(&q)?;
            Report::Value(serde_json::from_str(&text).map_err(|e| Failure::Input(e.to_string()))?)
        }
    };
    Ok(report)
}

fn emit(report: &Report, output: Output) -> Outcome<()> {
    let text = match (report, output) {
        (Report::Frame(f), Output::Json) => io::frame_to_json(f)?,
        (Report::Frame(f), _) => render(&frame_value(f)?, output)?,
        (Report::Value(v), _) => render(v, output)?,
        (Report::Scenario(r), Output::Csv) => scenario_csv(r)?,
        (Report::Scenario(r), _) => render(&value(r)?, output)?,
    };
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", text.trim_end()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Input(e.to_string())),
        _ => Ok(()),
    }
}

fn render(v: &Value, output: Output) -> Outcome<String> {
    match output {
        Output::Json => Ok(io::to_json(v)?),
        Output::Pretty => {
            let mut out = String::new();
            pretty(v, 0, &mut out);
            Ok(out)
        }
        Output::Csv => {
            let mut rows = Vec::new();
            flatten(v, String::new(), &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut write = |rec: &[&str]| w.write_record(rec).map_err(|e| Failure::Input(e.to_string()));
            write(&["key", "value"])?;
            for (k, val) in &rows {
                write(&[k, val])?;
            }
            csv_text(w)
        }
    }
}

fn csv_text(w: csv::Writer<Vec<u8>>) -> Outcome<String> {
    let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
}

fn scenario_csv(r: &ScenarioReport) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Input(e.to_string());
    w.write_record([
        "scenario",
        "n",
        "assertion",
        "check",
        "measured",
        "expected",
        "tol",
        "pass",
    ])
    .map_err(err)?;
    for a in &r.assertions {
        let check = value(&a.check)?;
        let num = |x: f64| if x.is_finite() { fmt_g17(x) } else { String::new() };
        w.write_record([
            r.name.clone(),
            r.n.to_string(),
            a.name.clone(),
            check.as_str().unwrap_or_default().to_string(),
            num(a.measured),
            num(a.expected),
            num(a.tol),
            a.pass.to_string(),
        ])
        .map_err(err)?;
    }
    csv_text(w)
}

fn scalar(v: &Value, full: bool) -> String {
    match v {
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (_, Some(i)) => i.to_string(),
            _ => {
                let x = n.as_f64().unwrap_or(f64::NAN);
                if full {
                    fmt_g17(x)
                } else {
                    fmt_short(x)
                }
            }
        },
        Value::String(s) => s.clone(),
        Value::Null if full => String::new(),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| {
            !i.is_object()
                && !i
                    .as_array()
                    .is_some_and(|a| a.iter().any(|x| x.is_object() || x.is_array()))
        }),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => scalar(other, false),
    }
}

fn pretty(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if is_flat(val) {
                    out.push_str(&format!("{pad}{k}: {}\n", inline(val)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    pretty(val, indent + 2, out);
                }
            }
        }
        Value::Array(items) if !is_flat(v) => {
            for (i, item) in items.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                pretty(item, indent + 2, out);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other))),
    }
}

fn flatten(v: &Value, prefix: String, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(val, key, rows);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten(val, format!("{prefix}[{i}]"), rows);
            }
        }
        other => rows.push((prefix, scalar(other, true))),
    }
}
