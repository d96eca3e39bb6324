mod atlas;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isodet::equations::generators;
use isodet::orbits::{classify, congruence_residual, representative, solve_congruence, valid_params};
use isodet::verify::{
    check_closure_order, check_dimensions, check_equation_cut, exhaustive_census,
    point_count_dimension_estimate, reduce_config, summary_table, SampleOptions, Status,
    VerificationReport, DEFAULT_BUDGET,
};
use isodet::{BilinearForm, Error, Field, FormKind, Matrix, OrbitParams, SpaceConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "isodet", version, about = "Orbits of GL(E) x Sp(F) and GL(E) x SO(F) on E (x) F, with their equations and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of all orbits with dimensions, singularity data and equations
    Atlas {
        #[command(flatten)]
        common: Common,
    },
    /// Orbit class of a matrix read from --in
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Defining equations of an orbit closure
    Equations {
        #[command(flatten)]
        common: Common,
    },
    /// Random points of an orbit
    Sample {
        #[command(flatten)]
        common: Common,
        /// Number of points
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Run verification checks
    Verify {
        check: Check,
        #[command(flatten)]
        common: Common,
        /// Matrix visits allowed per exhaustive sweep
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        /// Sample points per orbit for sampled checks
        #[arg(long, default_value_t = 100)]
        samples: u64,
        /// Primes for the point-count estimate
        #[arg(long, value_delimiter = ',', default_value = "3,5")]
        primes: Vec<u64>,
    },
    /// Solve S = A K B^t + B K A^t for B; reads {"s": ..., "a": ...} from --in
    SolveCongruence {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Check {
    Census,
    Cut,
    Dims,
    Closure,
    Counts,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// dim E
    #[arg(short)]
    e: Option<usize>,
    /// dim F
    #[arg(short)]
    f: Option<usize>,
    /// sym | symmetric | alt | alternating
    #[arg(long, value_parser = parse_kind)]
    kind: Option<FormKind>,
    /// Q, p=<prime> or p=<prime>,ext=2[,w=<non-residue>]
    #[arg(long, default_value = "Q")]
    field: String,
    /// split | identity | file:<path>
    #[arg(long, default_value = "split")]
    gram: String,
    /// Orbit parameters r1,r2[,sign]
    #[arg(long)]
    params: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Input JSON file
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<FormKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "sym" | "symmetric" => Ok(FormKind::Symmetric),
        "alt" | "alternating" => Ok(FormKind::Alternating),
        _ => Err(format!("unknown kind {s:?}; use sym or alt")),
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
    Io(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn parse_field(text: &str) -> Outcome<Field> {
    let t = text.trim();
    if matches!(t, "Q" | "q" | "rationals") {
        return Ok(Field::rationals());
    }
    let usage = || Failure::Usage(format!("cannot parse field {text:?}; use Q, p=5 or p=5,ext=2"));
    let mut p = None;
    let mut ext = 1;
    let mut w = None;
    for part in t.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(usage)?;
        let value: u64 = value.trim().parse().map_err(|_| usage())?;
        match key.trim() {
            "p" => p = Some(value),
            "ext" => ext = value,
            "w" => w = Some(value),
            _ => return Err(usage()),
        }
    }
    let p = p.ok_or_else(usage)?;
    match ext {
        1 if w.is_none() => Ok(Field::prime(p)?),
        2 => Ok(Field::quadratic(p, w)?),
        _ => Err(usage()),
    }
}

/// Fully resolved run configuration, echoed with every output.
#[derive(Serialize)]
struct Resolved {
    command: String,
    e: Option<usize>,
    f: Option<usize>,
    kind: Option<FormKind>,
    field: String,
    gram: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<OrbitParams>,
    seed: u64,
    format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    primes: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<usize>,
}

struct Context {
    common: Common,
    field: Field,
    resolved: Resolved,
    output: String,
}

impl Context {
    fn new(command: &str, common: &Common) -> Outcome<Self> {
        let field = parse_field(&common.field)?;
        let params = match &common.params {
            Some(text) => Some(text.parse::<OrbitParams>().map_err(|e| Failure::Usage(e.to_string()))?),
            None => None,
        };
        let resolved = Resolved {
            command: command.to_string(),
            e: common.e,
            f: common.f,
            kind: common.kind,
            field: field.to_string(),
            gram: common.gram.clone(),
            params,
            seed: common.seed,
            format: common.format,
            input: common.input.as_ref().map(|p| p.display().to_string()),
            out: common.out.as_ref().map(|p| p.display().to_string()),
            budget: None,
            samples: None,
            primes: None,
            count: None,
        };
        Ok(Context {
            common: common.clone(),
            field,
            resolved,
            output: String::new(),
        })
    }

    fn kind(&self) -> Outcome<FormKind> {
        self.common.kind.ok_or_else(|| Failure::Usage("--kind is required".into()))
    }

    fn form(&self, f: usize) -> Outcome<BilinearForm> {
        let kind = self.kind()?;
        let gram = self.common.gram.as_str();
        Ok(match gram {
            "split" => BilinearForm::split(kind, self.field, f)?,
            "identity" => BilinearForm::identity(self.field, f)?,
            _ => match gram.strip_prefix("file:") {
                Some(path) => {
                    let value = read_json(Path::new(path))?;
                    let m = matrix_from_json(&value, self.field)?;
                    if m.rows() != f {
                        return Err(Failure::Domain(Error::DimensionMismatch {
                            expected: format!("{f}x{f} Gram matrix"),
                            found: format!("{}x{}", m.rows(), m.cols()),
                        }));
                    }
                    BilinearForm::new(kind, m)?
                }
                None => return Err(Failure::Usage(format!("unknown --gram {gram:?}; use split, identity or file:<path>"))),
            },
        })
    }

    fn config(&self) -> Outcome<SpaceConfig> {
        let e = self.common.e.ok_or_else(|| Failure::Usage("-e is required".into()))?;
        let f = self.common.f.ok_or_else(|| Failure::Usage("-f is required".into()))?;
        Ok(SpaceConfig::new(e, self.form(f)?)?)
    }

    fn params(&self) -> Outcome<OrbitParams> {
        self.resolved
            .params
            .ok_or_else(|| Failure::Usage("--params r1,r2[,sign] is required".into()))
    }

    fn input(&self) -> Outcome<Value> {
        let path = self
            .common
            .input
            .as_ref()
            .ok_or_else(|| Failure::Usage("--in <file> is required".into()))?;
        read_json(path)
    }

    fn json(&self) -> bool {
        self.common.format == Format::Json
    }

    fn config_value(&self) -> Value {
        serde_json::to_value(&self.resolved).expect("config serializes")
    }

    /// Echoes the config, then the payload (text, or a JSON object with a
    /// `config` field).
    fn emit(&mut self, text: impl FnOnce() -> String, payload: impl FnOnce() -> Value) {
        if self.json() {
            let mut value = payload();
            if let Value::Object(map) = &mut value {
                let mut with_config = serde_json::Map::new();
                with_config.insert("config".into(), self.config_value());
                with_config.extend(std::mem::take(map));
                value = Value::Object(with_config);
            }
            self.output.push_str(&serde_json::to_string(&value).expect("serializes"));
            self.output.push('\n');
        } else {
            self.output.push_str(&format!("# config: {}\n", self.config_value()));
            self.output.push_str(&text());
        }
    }

    fn flush(&self) -> Outcome<()> {
        match &self.common.out {
            Some(path) => fs::write(path, &self.output).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(self.output.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| Failure::Io(e.to_string()))
            }
        }
    }
}

fn read_json(path: &Path) -> Outcome<Value> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Domain(Error::Format(format!("{}: {e}", path.display()))))
}

/// Accepts the library's matrix JSON, `{"rows": [...]}` or a bare array of
/// rows; entries may be strings or integers.
fn matrix_from_json(value: &Value, field: Field) -> Outcome<Matrix> {
    if let Some(obj) = value.as_object() {
        if obj.contains_key("field") {
            let m: Matrix = serde_json::from_value(value.clone()).map_err(|e| Error::Format(e.to_string()))?;
            if m.field() != field {
                return Err(Failure::Domain(Error::FieldMismatch));
            }
            return Ok(m);
        }
        if let Some(rows) = obj.get("rows") {
            return matrix_from_json(rows, field);
        }
    }
    let bad = || Failure::Domain(Error::Format("expected a matrix as an array of rows".into()));
    let rows = value.as_array().ok_or_else(bad)?;
    let mut out = Vec::new();
    for row in rows {
        let mut r = Vec::new();
        for x in row.as_array().ok_or_else(bad)? {
            let text = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(bad()),
            };
            r.push(field.parse(&text)?);
        }
        out.push(r);
    }
    Ok(Matrix::from_rows(field, out)?)
}

fn matrix_text(m: &Matrix) -> String {
    let rows = m.to_rows();
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for r in cells {
        let line: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&format!("[{}]\n", line.join(" ")));
    }
    out
}

fn run_atlas(ctx: &mut Context) -> Outcome<()> {
    let atlas = match &ctx.common.input {
        Some(_) => {
            let value = ctx.input()?;
            let table = value.get("atlas").cloned().unwrap_or(value);
            serde_json::from_value(table).map_err(|e| Error::Format(format!("not an atlas: {e}")))?
        }
        None => atlas::build(&ctx.config()?)?,
    };
    ctx.emit(|| atlas::render_text(&atlas), || json!({ "atlas": atlas }));
    Ok(())
}

fn run_classify(ctx: &mut Context) -> Outcome<()> {
    let config = ctx.config()?;
    let phi = matrix_from_json(&ctx.input()?, ctx.field)?;
    let class = classify(&phi, &config)?;
    ctx.emit(|| format!("{class}\n"), || json!({ "class": class }));
    Ok(())
}

fn run_equations(ctx: &mut Context) -> Outcome<()> {
    let config = ctx.config()?;
    let params = ctx.params()?;
    let set = generators(&params, &config)?;
    ctx.emit(
        || {
            if set.is_empty() {
                "no equations: the orbit is dense\n".to_string()
            } else {
                set.to_text()
            }
        },
        || json!({ "params": params, "generators": set.to_json() }),
    );
    Ok(())
}

fn run_sample(ctx: &mut Context, count: usize) -> Outcome<()> {
    ctx.resolved.count = Some(count);
    let config = ctx.config()?;
    let params = ctx.params()?;
    let rep = representative(&params, &config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.common.seed);
    let mut points = Vec::new();
    let mut fallbacks = 0;
    for _ in 0..count {
        let a = Matrix::random_invertible(config.field(), config.e, &mut rng);
        let sample = config.form.random_isometry(&mut rng);
        if sample.fell_back {
            fallbacks += 1;
        }
        let x = &(&a * &rep) * &sample.matrix.transpose();
        debug_assert_eq!(classify(&x, &config).ok(), Some(params));
        points.push(x);
    }
    ctx.emit(
        || {
            let mut out = String::new();
            for (i, x) in points.iter().enumerate() {
                out.push_str(&format!("sample {} of {params}\n{}", i + 1, matrix_text(x)));
            }
            if fallbacks > 0 {
                out.push_str(&format!("# identity isometry used {fallbacks} times\n"));
            }
            out
        },
        || json!({ "params": params, "samples": points, "isometry_fallbacks": fallbacks }),
    );
    Ok(())
}

fn run_verify(ctx: &mut Context, check: Check, budget: u128, samples: u64, primes: Vec<u64>) -> Outcome<()> {
    ctx.resolved.budget = Some(budget);
    ctx.resolved.samples = Some(samples);
    ctx.resolved.primes = Some(primes.clone());
    let config = ctx.config()?;
    let opts = SampleOptions {
        per_orbit: samples,
        seed: ctx.common.seed,
    };
    let selected: Vec<OrbitParams> = match ctx.resolved.params {
        Some(p) => {
            p.validate(&config)?;
            vec![p]
        }
        None => valid_params(&config),
    };
    let mut reports: Vec<VerificationReport> = Vec::new();
    let mut notes = Vec::new();
    let all = check == Check::All;
    if check == Check::Census || all {
        match exhaustive_census(&config, budget) {
            Ok(r) => reports.push(r),
            Err(err @ (Error::InfiniteField | Error::BudgetExceeded { .. })) if all => {
                notes.push(format!("census skipped: {err}"));
            }
            Err(err) => return Err(err.into()),
        }
    }
    if check == Check::Cut || all {
        for p in &selected {
            reports.push(check_equation_cut(p, &config, budget, opts)?);
        }
    }
    if check == Check::Dims || all {
        // tangent spaces are computed over Q whenever the Gram matrix lifts
        let dims_config = if config.field().is_finite() {
            reduce_config(&config, Field::rationals()).unwrap_or_else(|_| config.clone())
        } else {
            config.clone()
        };
        reports.push(check_dimensions(&dims_config)?);
    }
    if check == Check::Closure || all {
        reports.push(check_closure_order(&config, opts)?);
    }
    if check == Check::Counts || all {
        let configs: Vec<SpaceConfig> = primes
            .iter()
            .map(|&p| Ok(reduce_config(&config, Field::prime(p)?)?))
            .collect::<Outcome<_>>()?;
        for p in &selected {
            match point_count_dimension_estimate(p, &configs, budget) {
                Ok(r) => reports.push(r),
                Err(err @ Error::BudgetExceeded { .. }) if all => notes.push(format!("counts skipped for {p}: {err}")),
                Err(err) => return Err(err.into()),
            }
        }
    }
    eprint!("{}", summary_table(&reports, true));
    if ctx.json() {
        ctx.output.push_str(&serde_json::to_string(&json!({ "config": ctx.config_value() })).expect("serializes"));
        ctx.output.push('\n');
        for r in &reports {
            ctx.output.push_str(&r.to_json_line());
            ctx.output.push('\n');
        }
        for n in &notes {
            ctx.output.push_str(&serde_json::to_string(&json!({ "note": n })).expect("serializes"));
            ctx.output.push('\n');
        }
    } else {
        ctx.output.push_str(&format!("# config: {}\n", ctx.config_value()));
        ctx.output.push_str(&summary_table(&reports, false));
        for r in &reports {
            match &r.status {
                Status::Fail { witness } => ctx.output.push_str(&format!("FAIL {}: {witness}\n", r.check)),
                Status::Warn { message } => ctx.output.push_str(&format!("WARN {}: {message}\n", r.check)),
                Status::Pass => {}
            }
        }
        for n in &notes {
            ctx.output.push_str(&format!("note: {n}\n"));
        }
    }
    ctx.flush()?;
    if reports.iter().any(|r| r.failed()) {
        return Err(Failure::Verification);
    }
    Ok(())
}

fn run_solve(ctx: &mut Context) -> Outcome<()> {
    let value = ctx.input()?;
    let part = |key: &str| {
        value
            .get(key)
            .or_else(|| value.get(key.to_uppercase()))
            .ok_or_else(|| Failure::Domain(Error::Format(format!("input needs a {key:?} matrix"))))
    };
    let s = matrix_from_json(part("s")?, ctx.field)?;
    let a = matrix_from_json(part("a")?, ctx.field)?;
    if ctx.common.f.is_some_and(|f| f != a.cols()) {
        return Err(Failure::Usage(format!("-f disagrees with the {} columns of A", a.cols())));
    }
    ctx.resolved.f = Some(a.cols());
    let form = ctx.form(a.cols())?;
    let b = solve_congruence(&s, &a, &form)?;
    let residual_zero = congruence_residual(&s, &a, &b, &form).is_zero();
    ctx.emit(
        || format!("B =\n{}residual zero: {residual_zero}\n", matrix_text(&b)),
        || json!({ "b": b, "residual_zero": residual_zero }),
    );
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    let mut ctx;
    match cli.command {
        Command::Atlas { common } => {
            ctx = Context::new("atlas", &common)?;
            run_atlas(&mut ctx)?;
        }
        Command::Classify { common } => {
            ctx = Context::new("classify", &common)?;
            run_classify(&mut ctx)?;
        }
        Command::Equations { common } => {
            ctx = Context::new("equations", &common)?;
            run_equations(&mut ctx)?;
        }
        Command::Sample { common, count } => {
            ctx = Context::new("sample", &common)?;
            run_sample(&mut ctx, count)?;
        }
        Command::Verify {
            check,
            common,
            budget,
            samples,
            primes,
        } => {
            let name = format!("verify {}", serde_json::to_value(check).expect("serializes").as_str().unwrap_or("?"));
            ctx = Context::new(&name, &common)?;
            return run_verify(&mut ctx, check, budget, samples, primes);
        }
        Command::SolveCongruence { common } => {
            ctx = Context::new("solve-congruence", &common)?;
            run_solve(&mut ctx)?;
        }
    }
    ctx.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_errors = match &cli.command {
        Command::Atlas { common }
        | Command::Classify { common }
        | Command::Equations { common }
        | Command::Sample { common, .. }
        | Command::Verify { common, .. }
        | Command::SolveCongruence { common } => common.format == Format::Json,
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(3),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(err)) => {
            if json_errors {
                eprintln!("{}", json!({ "error": { "kind": format!("{err:?}").split(['{', '(', ' ']).next().unwrap_or("Error"), "message": err.to_string() } }));
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
