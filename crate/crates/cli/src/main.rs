//! Command-line front end: build fields from configuration files, verify
//! them, lay out nesting forests and render phase portraits.
//!
//! Exit codes: 0 success, 2 verification failed, 3 invalid input, 1 any
//! other failure (for example an unwritable output path).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cyclefield::config::{validate_configuration, ConfigError, ConfigFile, Configuration};
use cyclefield::construct::{build_field, BuildOptions, ConstructError, FieldFile, Mode, VectorField};
use cyclefield::portrait::{render_portrait, PortraitOptions};
use cyclefield::ratpoly::format_fraction;
use cyclefield::verify::{assemble_report, VerifyOptions};

const TOL_RANGE: (f64, f64) = (1e-14, 1e-4);

#[derive(Parser, Debug)]
#[command(name = "cyclefield", version, about = "Polynomial vector fields with prescribed circular limit cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report errors as a JSON object on stderr.
    #[arg(long, global = true)]
    json_diagnostics: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a field from a configuration and write it as JSON.
    Build(Common),
    /// Verify a field file (or build one from a configuration) and write the report.
    Verify(Common),
    /// Lay out a nesting forest as explicit circles.
    Layout(Common),
    /// Render a phase portrait of a field (or configuration) as SVG.
    Portrait(Common),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Construction mode when the input is a configuration.
    #[arg(long, default_value = "full", value_parser = parse_mode)]
    mode: Mode,
    #[arg(long, default_value_t = 1e-12)]
    tol_ode: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_report: f64,
    /// Leave helper circles out of the period sums.
    #[arg(long)]
    remark_optimization: bool,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Invalid { kind: String, message: String, detail: Value },
    VerificationFailed,
    Other(anyhow::Error),
}

impl Failure {
    fn invalid(kind: &str, message: impl ToString) -> Self {
        Failure::Invalid { kind: kind.into(), message: message.to_string(), detail: Value::Null }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Invalid { .. } => 3,
            Failure::VerificationFailed => 2,
            Failure::Other(_) => 1,
        }
    }
}

/// Variant name plus the circle indices it mentions, for machine-readable
/// diagnostics.
fn config_failure(e: &ConfigError) -> Failure {
    let kind = format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("ConfigError").to_string();
    let detail = match e {
        ConfigError::Overlap(i, j) | ConfigError::CenterOnCircle(i, j) | ConfigError::DuplicateCircle(i, j) => json!({ "circles": [i, j] }),
        ConfigError::NonpositiveRadius(i) | ConfigError::InvalidPrescription(i, _) | ConfigError::NotHyperbolic(i, _) => json!({ "circles": [i] }),
        ConfigError::AugmentationFailed { cycle, .. } => json!({ "circles": [cycle] }),
        _ => Value::Null,
    };
    Failure::Invalid { kind, message: e.to_string(), detail }
}

fn construct_failure(e: ConstructError) -> Failure {
    match e {
        ConstructError::Config(c) => config_failure(&c),
        ConstructError::InvalidPeriod(..) => Failure::invalid("InvalidPeriod", e),
        other => Failure::Other(anyhow::Error::new(other)),
    }
}

fn check_tolerance(name: &str, v: f64) -> Result<(), Failure> {
    if (TOL_RANGE.0..=TOL_RANGE.1).contains(&v) {
        Ok(())
    } else {
        Err(Failure::invalid("ToleranceOutOfRange", format!("{name} = {v:e} lies outside [{:e}, {:e}]", TOL_RANGE.0, TOL_RANGE.1)))
    }
}

fn read_input(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid("MissingInput", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid("Malformed", format!("{}: {e}", path.display())))
}

fn read_config(value: Value) -> Result<Configuration, Failure> {
    let file: ConfigFile = serde_json::from_value(value).map_err(|e| Failure::invalid("Malformed", e))?;
    let c = file.into_configuration().map_err(|e| config_failure(&e))?;
    validate_configuration(&c).map_err(|e| config_failure(&e))?;
    Ok(c)
}

/// A field file is recognized by its `P` key; anything else is read as a
/// configuration and built in the requested mode.
fn read_field(opts: &Common) -> Result<VectorField, Failure> {
    let value = read_input(&opts.input)?;
    if value.get("P").is_some() {
        let file: FieldFile = serde_json::from_value(value).map_err(|e| Failure::invalid("Malformed", e))?;
        return file.into_field().map_err(|e| config_failure(&e));
    }
    let c = read_config(value)?;
    build_field(&c, opts.mode, BuildOptions { remark_optimization: opts.remark_optimization }).map_err(construct_failure)
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(output: &Option<PathBuf>, contents: &str) -> Result<(), Failure> {
    match output {
        Some(p) => write_atomic(p, contents).map_err(Failure::Other),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn run_build(opts: &Common) -> Result<(), Failure> {
    let value = read_input(&opts.input)?;
    let c = read_config(value)?;
    let v = build_field(&c, opts.mode, BuildOptions { remark_optimization: opts.remark_optimization }).map_err(construct_failure)?;
    emit(&opts.output, &with_newline(FieldFile::from_field(&v).to_json()))?;
    if opts.output.is_some() {
        let aug = &v.config;
        eprintln!(
            "mode {} degree {} bound {} circles {} (helpers {}) epsilon {} singular points {} tau [{}]",
            v.mode,
            v.degree(),
            v.degree_bound,
            aug.circles().len(),
            aug.extra_circles.len(),
            aug.epsilon.as_ref().map_or("none".into(), format_fraction),
            aug.singular_points.len(),
            v.tau.iter().map(format_fraction).collect::<Vec<_>>().join(", ")
        );
    }
    Ok(())
}

fn run_verify(opts: &Common) -> Result<(), Failure> {
    check_tolerance("tol-ode", opts.tol_ode)?;
    check_tolerance("tol-report", opts.tol_report)?;
    let v = read_field(opts)?;
    let report = assemble_report(&v, &VerifyOptions { tol_ode: opts.tol_ode, tol_report: opts.tol_report });
    emit(&opts.output, &with_newline(report.to_json()))?;
    for c in report.failed_checks() {
        let at = c.circle.map_or(String::new(), |k| format!(" on circle {k}"));
        eprintln!("FAIL {}{at}: {}", c.name, c.detail);
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::VerificationFailed)
    }
}

fn run_layout(opts: &Common) -> Result<(), Failure> {
    let c = read_config(read_input(&opts.input)?)?;
    emit(&opts.output, &with_newline(ConfigFile::from_configuration(&c).to_json()))
}

fn run_portrait(opts: &Common) -> Result<(), Failure> {
    let v = read_field(opts)?;
    emit(&opts.output, &render_portrait(&v, &PortraitOptions::default()).svg)
}

fn report(f: &Failure, json_diagnostics: bool) {
    let (kind, message, detail) = match f {
        Failure::Invalid { kind, message, detail } => (kind.clone(), message.clone(), detail.clone()),
        Failure::VerificationFailed => return,
        Failure::Other(e) => ("Error".to_string(), format!("{e:#}"), Value::Null),
    };
    if json_diagnostics {
        let mut obj = json!({ "error": kind, "message": message, "exit_code": f.code() });
        if !detail.is_null() {
            obj["detail"] = detail;
        }
        eprintln!("{obj}");
    } else {
        eprintln!("error: {message}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Build(o) => run_build(o),
        Command::Verify(o) => run_verify(o),
        Command::Layout(o) => run_layout(o),
        Command::Portrait(o) => run_portrait(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(&f, cli.json_diagnostics);
            ExitCode::from(f.code())
        }
    }
}
