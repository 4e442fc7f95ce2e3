//! `hcq`: Hausdorff content computations and inequality suites from the
//! command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use hcontent::choquet::{Backend, Content};
use hcontent::content::{
    ball_content_exact_small, ball_content_upper, comparability_bracket, dyadic_content, ContentParams,
};
use hcontent::io::{self, Encoding};
use hcontent::operators::{
    classical_maximal, classical_riesz, maximal_centered, maximal_sharp, maximal_uncentered,
    riesz_potential, Candidates, OperatorResult, RadiusLadder,
};
use hcontent::render::{heatmap_svg, Scale};
use hcontent::verify::{self, InstanceKind, InstanceSpec, SuiteConfig, SuiteReport};
use hcontent::{Error, GridFunction};

#[derive(Parser)]
#[command(name = "hcq", version, about = "Hausdorff contents, Choquet integrals and maximal/Riesz operators on dyadic grids")]
struct Cli {
    /// JSON file with parameters for the subcommand; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance.
    Gen(GenArgs),
    /// Hausdorff content of a set.
    Content(ContentArgs),
    /// Choquet integral of a function.
    Integrate(IntegrateArgs),
    /// Maximal functions.
    Maximal(MaximalArgs),
    /// Riesz potentials.
    Riesz(RieszArgs),
    /// Run inequality suites.
    Verify(VerifyArgs),
    /// Empirical constants of a suite over a parameter grid.
    Sweep(SweepArgs),
    /// SVG heatmap of a grid function.
    Render(RenderArgs),
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct GenArgs {
    /// Instance family, e.g. random-simple, cantor-dust:1.5, power-kernel:0.5.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L", alias = "level")]
    #[serde(rename = "L")]
    level: Option<u32>,
    #[arg(long)]
    coarse_level: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the support as a set instead of the function.
    #[arg(long, action = ArgAction::SetTrue)]
    set: bool,
    /// Dense encoding for sets (default run-length).
    #[arg(long, action = ArgAction::SetTrue)]
    dense: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct ContentArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    /// dyadic, ball-greedy or ball-exact.
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct IntegrateArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    /// dyadic or ball.
    #[arg(long)]
    backend: Option<String>,
    /// Integrate f^p; also reports the quasi-norm when p >= 1.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct MaximalArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// centered, uncentered, sharp or classical.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    backend: Option<String>,
    /// standard, refined, refined:K, or comma-separated radii.
    #[arg(long)]
    ladder: Option<String>,
    /// Lattice stride in half cells for uncentered candidates.
    #[arg(long)]
    stride: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// linear or log.
    #[arg(long)]
    scale: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct RieszArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    backend: Option<String>,
    /// Kernel distance floor (default half a cell width).
    #[arg(long)]
    floor: Option<f64>,
    /// Lebesgue Riemann sum instead of the Choquet integral.
    #[arg(long, action = ArgAction::SetTrue)]
    classical: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    scale: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Default, Clone)]
#[serde(default)]
struct SuiteFlags {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L", alias = "level")]
    #[serde(rename = "L")]
    level: Option<u32>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta2: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    backend: Option<String>,
    /// Comma-separated instance families.
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<String>>,
    #[arg(long)]
    coarse_level: Option<u32>,
    #[arg(long)]
    stride: Option<u32>,
    #[arg(long)]
    floor: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct VerifyArgs {
    /// Suite ids, repeatable; `all` runs every suite.
    #[arg(long = "suite")]
    suites: Option<Vec<String>>,
    /// List suite ids and exit.
    #[arg(long, action = ArgAction::SetTrue)]
    list: bool,
    #[command(flatten)]
    #[serde(flatten)]
    flags: SuiteFlags,
    /// Directory for `<suite>.json` reports and `summary.csv`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Embed the current Unix time in reports.
    #[arg(long, action = ArgAction::SetTrue)]
    timestamp: bool,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct SweepArgs {
    #[arg(long)]
    suite: Option<String>,
    /// Parameter to vary: p, q, delta, delta2, kappa, alpha, floor or L.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    flags: SuiteFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct RenderArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    scale: Option<String>,
    /// Pixels per cell.
    #[arg(long)]
    cell_px: Option<u32>,
}

enum CliError {
    /// Bad flags, configs, schemas or parameters.
    Usage(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Overlays the flags that were given onto the config file's object.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> CliResult<T> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags).unwrap()).unwrap());
    };
    let mut base = match io::read_json(path)? {
        Value::Object(m) => m,
        _ => return usage(format!("{}: config must be a JSON object", path.display())),
    };
    let Value::Object(over) = serde_json::to_value(flags).unwrap() else { unreachable!() };
    if let Some(k) = base.keys().find(|k| !over.contains_key(*k)) {
        return usage(format!("{}: unknown key `{k}`", path.display()));
    }
    // unset options and switches left off do not override the file
    for (k, v) in over {
        if !v.is_null() && v != Value::Bool(false) {
            base.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(base))
        .or_else(|e| usage(format!("{}: {e}", path.display())))
}

fn effective<T: Serialize>(args: &T) -> Value {
    let mut v = serde_json::to_value(args).unwrap();
    if let Value::Object(m) = &mut v {
        m.retain(|_, x| !x.is_null() && *x != Value::Bool(false));
    }
    v
}

fn required<T: Clone>(v: &Option<T>, name: &str) -> CliResult<T> {
    v.clone().ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

// A closed pipe (`hcq ... | head`) ends output quietly instead of panicking.
fn say(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(s.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(3);
    }
}

fn emit(out: Option<&Path>, doc: &Value) -> CliResult<()> {
    match out {
        Some(p) => Ok(io::write_json(p, doc)?),
        None => {
            say(&format!("{}\n", serde_json::to_string_pretty(doc).unwrap()));
            Ok(())
        }
    }
}

fn load_input(path: &Path) -> CliResult<GridFunction> {
    Ok(io::load_function_or_set(&io::read_json(path)?)?)
}

fn backend(s: &Option<String>) -> CliResult<Backend> {
    Ok(s.as_deref().unwrap_or("dyadic").parse()?)
}

fn scale(s: &Option<String>) -> CliResult<Scale> {
    Ok(s.as_deref().unwrap_or("linear").parse()?)
}

fn artifact(kind: &str, config: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(io::SCHEMA_VERSION));
    m.insert("kind".into(), json!(kind));
    m.insert("tool_version".into(), json!(io::TOOL_VERSION));
    m.insert("config".into(), config);
    m
}

fn gen(a: GenArgs) -> CliResult<()> {
    let kind: InstanceKind = required(&a.kind, "kind")?.parse()?;
    let n = a.n.unwrap_or(2);
    let level = a.level.unwrap_or(4);
    let mut spec = InstanceSpec::new(kind, n, level, a.seed.unwrap_or(0));
    spec.coarse_level = a.coarse_level;
    let f = verify::generate(&spec)?;
    let mut doc = if a.set {
        let enc = if a.dense { Encoding::Dense } else { Encoding::Rle };
        io::set_to_json(&f.support(), enc)
    } else {
        io::function_to_json(&f)
    };
    doc["tool_version"] = json!(io::TOOL_VERSION);
    doc["config"] = effective(&a);
    doc["spec"] = serde_json::to_value(&spec).unwrap();
    emit(a.out.as_deref(), &doc)
}

fn content_cmd(a: ContentArgs) -> CliResult<()> {
    let input = required(&a.input, "input")?;
    let delta = required(&a.delta, "delta")?;
    let doc_in = io::read_json(&input)?;
    let set = io::set_from_json(&doc_in).or_else(|_| io::load_function_or_set(&doc_in).map(|f| f.support()))?;
    let params = ContentParams::new(delta);
    let res = match a.backend.as_deref().unwrap_or("dyadic") {
        "dyadic" | "dyadic-exact" => dyadic_content(&set, delta)?,
        "ball-greedy" | "ball-greedy-upper" | "ball" => ball_content_upper(&set, &params)?,
        "ball-exact" | "ball-exact-small" => ball_content_exact_small(&set, &params)?,
        other => return usage(format!("unknown content backend `{other}` (dyadic, ball-greedy, ball-exact)")),
    };
    let (c_low, c_high) = comparability_bracket(set.grid().n(), delta)?;
    let mut m = artifact("content_result", effective(&a));
    m.insert("input_digest".into(), json!(io::set_digest(&set)));
    m.insert("result".into(), io::content_result_to_json(&res));
    m.insert("bracket".into(), json!({"c_low": c_low, "c_high": c_high}));
    emit(a.out.as_deref(), &Value::Object(m))
}

fn integrate(a: IntegrateArgs) -> CliResult<()> {
    let f = load_input(&required(&a.input, "input")?)?;
    let delta = required(&a.delta, "delta")?;
    let c = Content::new(f.grid(), delta, backend(&a.backend)?)?;
    let p = a.p.unwrap_or(1.0);
    let value = c.integral_power(&f, p)?;
    let mut m = artifact("integral_result", effective(&a));
    m.insert("input_digest".into(), json!(io::function_digest(&f)));
    m.insert("integral".into(), verify::report::num(value));
    if p >= 1.0 {
        m.insert("quasi_norm".into(), verify::report::num(value.powf(1.0 / p)));
    }
    emit(a.out.as_deref(), &Value::Object(m))
}

fn ladder(spec: &Option<String>, f: &GridFunction) -> CliResult<RadiusLadder> {
    let g = f.grid();
    let s = spec.as_deref().unwrap_or("standard");
    let base = RadiusLadder::standard(g);
    if s == "standard" {
        return Ok(base);
    }
    if let Some(rest) = s.strip_prefix("refined") {
        let k: u32 = match rest.strip_prefix(':') {
            Some(k) => k.parse().or_else(|_| usage(format!("bad refinement count in `{s}`")))?,
            None if rest.is_empty() => 1,
            None => return usage(format!("bad ladder `{s}`")),
        };
        return Ok((0..k).fold(base, |l, _| l.refine()));
    }
    let radii: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().or_else(|_| usage(format!("bad radius `{x}` in ladder"))))
        .collect::<CliResult<_>>()?;
    Ok(RadiusLadder::from_radii(g, &radii)?)
}

fn write_operator(res: &OperatorResult, config: Value, out: Option<&Path>, svg: Option<&Path>, sc: &Option<String>) -> CliResult<()> {
    let sc = scale(sc)?;
    let mut doc = res.to_json();
    doc["kind"] = json!("operator_result");
    doc["config"] = config;
    if let Some(p) = svg {
        io::write_atomic(p, heatmap_svg(&res.output, sc, 8)?.as_bytes())?;
    }
    emit(out, &doc)
}

fn maximal(a: MaximalArgs) -> CliResult<()> {
    let f = load_input(&required(&a.input, "input")?)?;
    let n = f.grid().n() as f64;
    let delta = a.delta.unwrap_or(n);
    let kappa = a.kappa.unwrap_or(0.0);
    let lad = ladder(&a.ladder, &f)?;
    let cand = Candidates { stride: a.stride.unwrap_or(2) };
    if cand.stride == 0 {
        return usage("--stride must be positive");
    }
    let variant = a.variant.as_deref().unwrap_or("centered");
    let res = match variant {
        "classical" => classical_maximal(&f, kappa, &lad)?,
        _ => {
            let c = Content::new(f.grid(), delta, backend(&a.backend)?)?;
            match variant {
                "centered" => maximal_centered(&f, &c, kappa, &lad)?,
                "uncentered" => maximal_uncentered(&f, &c, kappa, &lad, cand)?,
                "sharp" => maximal_sharp(&f, &c, &lad, cand)?,
                other => return usage(format!("unknown variant `{other}` (centered, uncentered, sharp, classical)")),
            }
        }
    };
    write_operator(&res, effective(&a), a.out.as_deref(), a.svg.as_deref(), &a.scale)
}

fn riesz(a: RieszArgs) -> CliResult<()> {
    let f = load_input(&required(&a.input, "input")?)?;
    let alpha = required(&a.alpha, "alpha")?;
    let res = if a.classical {
        classical_riesz(&f, alpha, a.floor)?
    } else {
        let delta = a.delta.unwrap_or(f.grid().n() as f64);
        let c = Content::new(f.grid(), delta, backend(&a.backend)?)?;
        riesz_potential(&f, &c, alpha, a.floor)?
    };
    write_operator(&res, effective(&a), a.out.as_deref(), a.svg.as_deref(), &a.scale)
}

fn suite_config(s: &SuiteFlags) -> CliResult<SuiteConfig> {
    Ok(SuiteConfig {
        n: s.n,
        level: s.level,
        delta: s.delta,
        delta2: s.delta2,
        kappa: s.kappa,
        alpha: s.alpha,
        p: s.p,
        q: s.q,
        samples: s.samples,
        seed: s.seed,
        backend: s.backend.as_deref().map(str::parse).transpose()?,
        families: s.families.clone(),
        coarse_level: s.coarse_level,
        stride: s.stride,
        floor: s.floor,
    })
}

/// Runs the suites; `Ok(false)` when any suite fails.
fn verify_cmd(a: VerifyArgs) -> CliResult<bool> {
    if a.list {
        for id in verify::suite_ids() {
            say(&format!("{id}\t{}\n", verify::describe(id).unwrap_or("")));
        }
        return Ok(true);
    }
    let mut ids = required(&a.suites, "suite")?;
    if ids.iter().any(|s| s == "all") {
        ids = verify::suite_ids().into_iter().map(String::from).collect();
    }
    let cfg = suite_config(&a.flags)?;
    // validate every id before running anything
    for id in &ids {
        if verify::describe(id).is_none() {
            return Err(Error::UnknownSuite(id.clone()).into());
        }
    }
    let stamp = a.timestamp.then(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
    });
    let mut reports: Vec<SuiteReport> = Vec::new();
    for id in &ids {
        let rep = verify::run_suite(id, &cfg)?;
        let s = &rep.summary;
        eprintln!(
            "{:<24} {} count={} violations={} max_ratio={} cap={}",
            id, s.verdict, s.count, s.violations, s.max_ratio, s.cap
        );
        if let Some(dir) = &a.out_dir {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            io::write_json(&dir.join(format!("{id}.json")), &rep.to_json(stamp))?;
        }
        reports.push(rep);
    }
    let csv = verify::summary_csv(&reports);
    match &a.out_dir {
        Some(dir) => io::write_atomic(&dir.join("summary.csv"), csv.as_bytes())?,
        None => say(&csv),
    }
    Ok(reports.iter().all(SuiteReport::passed))
}

fn sweep(a: SweepArgs) -> CliResult<()> {
    let suite = required(&a.suite, "suite")?;
    let param = required(&a.param, "param")?;
    let values = required(&a.values, "values")?;
    let table = verify::estimate_constant(&suite, &suite_config(&a.flags)?, &param, &values)?;
    if let Some(p) = &a.csv {
        io::write_atomic(p, table.to_csv().as_bytes())?;
    }
    let mut doc = table.to_json();
    doc["config"] = effective(&a);
    emit(a.out.as_deref(), &doc)
}

fn render(a: RenderArgs) -> CliResult<()> {
    let f = load_input(&required(&a.input, "input")?)?;
    let svg = heatmap_svg(&f, scale(&a.scale)?, a.cell_px.unwrap_or(8))?;
    match &a.out {
        Some(p) => Ok(io::write_atomic(p, svg.as_bytes())?),
        None => {
            say(&svg);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Gen(a) => gen(merge(&a, cfg)?).map(|_| true),
        Command::Content(a) => content_cmd(merge(&a, cfg)?).map(|_| true),
        Command::Integrate(a) => integrate(merge(&a, cfg)?).map(|_| true),
        Command::Maximal(a) => maximal(merge(&a, cfg)?).map(|_| true),
        Command::Riesz(a) => riesz(merge(&a, cfg)?).map(|_| true),
        Command::Verify(a) => verify_cmd(merge(&a, cfg)?),
        Command::Sweep(a) => sweep(merge(&a, cfg)?).map(|_| true),
        Command::Render(a) => render(merge(&a, cfg)?).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
