//! `scatsym`: verify singular symplectic structures from JSON form files.
//!
//! Every command writes one JSON report (to `--out` or stdout) and exits
//! with 0 when all clauses pass, 1 on a verification failure, 2 when the
//! input cannot be parsed and 3 on an internal error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use scatsym::algebroids::{coframe, no_go_check, AlgebroidError, Flavor};
use scatsym::catalog::{self, CatalogError, Params};
use scatsym::certificate::{Certificate, Report};
use scatsym::cohomology::{bk_poisson, sc_derham, sc_poisson, BettiProfile, CohomologyError};
use scatsym::geometry::{GeometryError, SingularForm};
use scatsym::gluing::{certify, glue, Convexity, FillingCollar, GlueKind, GluingError};
use scatsym::settings::Settings;
use scatsym::structures::{decompose, strong_filling_check, verify_folded, verify_symplectic, FillingVerdict, StructureError};

#[derive(Parser)]
#[command(name = "scatsym", version, about = "Verify singular symplectic structures")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Points per coordinate for grid certificates.
    #[arg(long, global = true, default_value_t = 17)]
    grid: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_closed: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_nondeg: f64,
    /// Decimal or 0x-prefixed hexadecimal.
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0x5CA77E12")]
    seed: u64,
    /// Report path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a form file against a flavor.
    Verify {
        form: PathBuf,
        /// tangent, b, zero, sc, sc^K, b^K, zero^M-b^K, rigged-sc, rigged-b^K or folded.
        #[arg(long)]
        flavor: String,
        /// Contact form on the hypersurface chart, for rigged flavors.
        #[arg(long)]
        aux: Option<PathBuf>,
    },
    /// Glue two filling collars over one contact form and certify the result.
    Glue {
        #[arg(long)]
        kind: String,
        /// Preset (s1, t3, s3) or a form file on a hypersurface chart.
        #[arg(long, default_value = "s1")]
        alpha: String,
        #[arg(long)]
        c1: Option<String>,
        #[arg(long)]
        c2: Option<String>,
        #[arg(long, default_value_t = 3.0)]
        length: f64,
    },
    /// Evaluate a cohomology theorem on Betti data.
    Cohomology {
        /// sc-derham, sc-poisson or bk-poisson.
        #[arg(long)]
        theorem: String,
        /// Profile file, or one of sphere:D, torus:D, bk-torus:N.
        #[arg(long)]
        profile: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// List or run the example records.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Laurent slots (a, b1, b2) of a form in normal form, with the filling verdict.
    Decompose { form: PathBuf },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Run {
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        all_charts: bool,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

enum Failure {
    Parse(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Parse(_) => "parse",
            Failure::Internal(_) => "internal",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Internal(m) => m,
        }
    }
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Failure {
        match e {
            CatalogError::Unknown(_) | CatalogError::Parameter(_) => Failure::Parse(e.to_string()),
            other => internal(other),
        }
    }
}

impl From<CohomologyError> for Failure {
    fn from(e: CohomologyError) -> Failure {
        match e {
            CohomologyError::Profile(_) | CohomologyError::Degree(..) | CohomologyError::Precondition(_) => {
                Failure::Parse(e.to_string())
            }
            other => internal(other),
        }
    }
}

impl From<AlgebroidError> for Failure {
    fn from(e: AlgebroidError) -> Failure {
        match e {
            AlgebroidError::UnknownFlavor(_) | AlgebroidError::MissingAux(_) | AlgebroidError::InvalidAux(_) => {
                Failure::Parse(e.to_string())
            }
            other => internal(other),
        }
    }
}

impl From<GluingError> for Failure {
    fn from(e: GluingError) -> Failure {
        match e {
            GluingError::Precondition(_) | GluingError::Mismatch(_) => Failure::Parse(e.to_string()),
            other => internal(other),
        }
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Failure {
        internal(e)
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Failure {
        internal(e)
    }
}

/// Result of one command: the report body and whether every clause passed.
struct Outcome {
    passed: bool,
    body: Value,
}

impl Outcome {
    fn report(r: &Report) -> Result<Outcome, Failure> {
        Ok(Outcome { passed: r.passed(), body: serde_json::to_value(r).map_err(internal)? })
    }

    fn info(body: Value) -> Outcome {
        Outcome { passed: true, body }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn read_form(path: &Path) -> Result<SingularForm, Failure> {
    SingularForm::from_json(&read(path)?).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn verify(form: &Path, flavor: &str, aux: Option<&Path>, settings: &Settings) -> Result<Outcome, Failure> {
    let omega = read_form(form)?;
    if flavor == "folded" {
        return Outcome::report(&verify_folded(&omega, settings)?);
    }
    let flavor: Flavor = flavor.parse()?;
    let aux = aux.map(read_form).transpose()?;
    let frame = coframe(&flavor, omega.chart(), aux.as_ref())?;
    let mut report = verify_symplectic(&omega, &frame, settings)?;
    let no_go = match flavor {
        Flavor::Zero => Some((1, 0)),
        Flavor::ZeroMBK { m, k } => Some((m, k)),
        _ => None,
    };
    let dim = omega.chart().dim();
    if let Some((m, k)) = no_go.filter(|&(m, k)| m > 0 && k != 1 && dim > 2 && dim % 2 == 0) {
        let outcome = no_go_check(m, k, dim, settings.seed)?;
        let refutes = outcome.refutes();
        report.absorb("no_go_argument", outcome.report);
        if refutes {
            report.push(
                "no_go",
                Certificate::refuted(
                    vec![],
                    0.0,
                    format!("{flavor} admits no closed non-degenerate form in dimension {dim}"),
                ),
            );
        }
    }
    Outcome::report(&report)
}

fn read_alpha(alpha: &str) -> Result<SingularForm, Failure> {
    match alpha {
        "s1" | "t3" | "s3" => Ok(catalog::contact_by_name(alpha)?),
        path => read_form(Path::new(path)),
    }
}

fn convexity(given: Option<&str>, default: Convexity) -> Result<Convexity, Failure> {
    given.map_or(Ok(default), |s| Ok(s.parse()?))
}

fn glue_command(
    kind: &str,
    alpha: &str,
    c1: Option<&str>,
    c2: Option<&str>,
    length: f64,
    settings: &Settings,
) -> Result<Outcome, Failure> {
    let kind: GlueKind = kind.parse()?;
    let (d1, d2) = match kind {
        GlueKind::Sc => (Convexity::Convex, Convexity::Convex),
        GlueKind::Folded => (Convexity::Concave, Convexity::Concave),
        GlueKind::Classic => (Convexity::Convex, Convexity::Concave),
    };
    let alpha = read_alpha(alpha)?;
    let a = FillingCollar::new(alpha.clone(), convexity(c1, d1)?, length)?;
    let b = FillingCollar::new(alpha, convexity(c2, d2)?, length)?;
    let glued = glue(kind, &a, &b)?;
    Outcome::report(&certify(&glued, settings)?)
}

fn read_profile(spec: &str) -> Result<BettiProfile, Failure> {
    let shorthand = spec.split_once(':').and_then(|(name, d)| Some((name, d.parse::<usize>().ok()?)));
    let profile = match shorthand {
        Some(("sphere", d)) => BettiProfile::sphere(d)?,
        Some(("torus", d)) => BettiProfile::torus(d)?,
        Some(("bk-torus", n)) => BettiProfile::bk_torus(n)?,
        _ => BettiProfile::from_json(&read(Path::new(spec))?)?,
    };
    Ok(profile)
}

fn cohomology(theorem: &str, profile: &str, p: usize, k: Option<usize>) -> Result<Outcome, Failure> {
    let profile = read_profile(profile)?;
    let report = match theorem {
        "sc-derham" => sc_derham(&profile, p)?,
        "sc-poisson" => sc_poisson(&profile, p, profile.dim / 2)?,
        "bk-poisson" => {
            let k = k.ok_or_else(|| Failure::Parse("bk-poisson needs --k".into()))?;
            bk_poisson(&profile, p, k)?
        }
        other => return Err(Failure::Parse(format!("unknown theorem {other:?}"))),
    };
    let mut body = serde_json::to_value(&report).map_err(internal)?;
    body["total_rank"] = json!(report.finite_rank());
    Ok(Outcome::info(body))
}

fn form_value(f: &SingularForm) -> Value {
    json!({ "describe": f.describe(), "form": f.to_file() })
}

fn decompose_command(form: &Path, settings: &Settings) -> Result<Outcome, Failure> {
    let omega = read_form(form)?;
    let d = decompose(&omega)?;
    let other: Vec<Value> = d
        .other
        .iter()
        .map(|(k, part, f)| json!({ "exponent": k, "part": part, "form": form_value(f) }))
        .collect();
    let filling = match strong_filling_check(&omega, settings)? {
        FillingVerdict::Filling { liouville, report } => json!({
            "verdict": "filling",
            "liouville": form_value(&liouville),
            "report": report,
        }),
        FillingVerdict::NotFilling { slot, form } => json!({
            "verdict": "not_filling",
            "slot": slot,
            "form": form_value(&form),
        }),
    };
    Ok(Outcome::info(json!({
        "a": form_value(&d.a),
        "b1": form_value(&d.b1),
        "b2": form_value(&d.b2),
        "other": other,
        "filling": filling,
    })))
}

fn catalog_command(action: &CatalogAction, settings: &Settings) -> Result<Outcome, Failure> {
    match action {
        CatalogAction::List => Ok(Outcome::info(serde_json::to_value(catalog::list_examples()).map_err(internal)?)),
        CatalogAction::Run { name, n, m, k, alpha, all_charts } => {
            let params = Params { n: *n, m: *m, k: *k, alpha: alpha.clone(), all_charts: *all_charts };
            let record = catalog::build_example(name, &params)?;
            Outcome::report(&catalog::run_example(&record, settings)?)
        }
    }
}

fn run(cli: &Cli, settings: &Settings) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Verify { form, flavor, aux } => verify(form, flavor, aux.as_deref(), settings),
        Command::Glue { kind, alpha, c1, c2, length } => {
            glue_command(kind, alpha, c1.as_deref(), c2.as_deref(), *length, settings)
        }
        Command::Cohomology { theorem, profile, p, k } => cohomology(theorem, profile, *p, *k),
        Command::Catalog { action } => catalog_command(action, settings),
        Command::Decompose { form } => decompose_command(form, settings),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify { .. } => "verify",
        Command::Glue { .. } => "glue",
        Command::Cohomology { .. } => "cohomology",
        Command::Catalog { .. } => "catalog",
        Command::Decompose { .. } => "decompose",
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SCATSYM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // Fails only if a global pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let settings = Settings {
        grid: cli.common.grid,
        tol_closed: cli.common.tol_closed,
        tol_nondeg: cli.common.tol_nondeg,
        seed: cli.common.seed,
        ..Settings::default()
    };

    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&cli, &settings)))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(Failure::Internal(msg))
        });
    let (code, status, body) = match result {
        Ok(o) if o.passed => (0, "pass", json!({ "report": o.body })),
        Ok(o) => (1, "fail", json!({ "report": o.body })),
        Err(f) => (f.code(), "error", json!({ "error": { "kind": f.kind(), "message": f.message() } })),
    };
    let mut doc = json!({
        "command": command_name(&cli.command),
        "status": status,
        "settings": settings,
    });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    let written = match &cli.common.out {
        Some(path) => fs::write(path, &text).map_err(|e| eprintln!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if code != 0 {
        if let Some(msg) = doc.get("error").and_then(|e| e.get("message")).and_then(Value::as_str) {
            eprintln!("error: {msg}");
        }
    }
    match written {
        Ok(()) => ExitCode::from(code),
        Err(()) => ExitCode::from(3),
    }
}
