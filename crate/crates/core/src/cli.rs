//! Command-line front end: `table`, `orbit` and `verify`.
//!
//! Settings come from an optional config file (JSON, or `key = value`
//! lines) and are overridden by flags.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::asymptotics::{alpha, alpha_prime, e1_hat_closed};
use crate::error::{Error, Result};
use crate::geometry::EllipseParams;
use crate::harness::{
    fmt_f64, run_verification, BetaForm, ConventionChoice, ResidualReport, Tolerances, VerifyConfig,
};
use crate::lazutkin::lazutkin_weight;
use crate::orbits::{orbit_from_caustic, Convention};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const TABLE_CSV_HEADER: &str = "t,alpha,alpha_prime,beta,mu,e1_hat";
pub const ORBIT_CSV_HEADER: &str = "k,phi,x,theta,lambda_q,closure_residual";

/// Smallest period accepted on the command line.
pub const MIN_PERIOD: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(format!("unknown format '{s}' (expected json or csv)")),
        }
    }
}

impl FromStr for ConventionChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(ConventionChoice::A),
            "b" => Ok(ConventionChoice::B),
            "auto" => Ok(ConventionChoice::Auto),
            _ => Err(format!("unknown convention '{s}' (expected A, B or auto)")),
        }
    }
}

impl FromStr for BetaForm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "closed" => Ok(BetaForm::Closed),
            "caustic" => Ok(BetaForm::Caustic),
            _ => Err(format!(
                "unknown beta form '{s}' (expected closed or caustic)"
            )),
        }
    }
}

/// Everything a run can be configured with. Missing keys take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub eccentricity: f64,
    pub q_list: Vec<usize>,
    pub grid_points: usize,
    pub tolerances: Tolerances,
    pub convention: ConventionChoice,
    pub output_format: Option<OutputFormat>,
    pub output_path: Option<PathBuf>,
    pub beta_form: BetaForm,
    pub variational_max_q: usize,
    pub alpha_scale: f64,
}

impl Default for Config {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Config {
            eccentricity: v.e,
            q_list: v.q_list,
            grid_points: 256,
            tolerances: v.tolerances,
            convention: v.convention,
            output_format: None,
            output_path: None,
            beta_form: v.beta_form,
            variational_max_q: v.variational_max_q,
            alpha_scale: v.alpha_scale,
        }
    }
}

impl Config {
    /// Reads a JSON object, or `key = value` lines when the file does not
    /// start with `{`. Nested tolerance keys use `tolerances.<name>`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if text.trim_start().starts_with('{') {
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            Self::from_key_values(&text)
        }
    }

    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut obj = serde_json::Map::new();
        let mut tol = serde_json::Map::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let json = key_value_to_json(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
            match key.strip_prefix("tolerances.") {
                Some(name) => tol.insert(name.to_string(), json),
                None => obj.insert(key.to_string(), json),
            };
        }
        if !tol.is_empty() {
            obj.insert("tolerances".into(), serde_json::Value::Object(tol));
        }
        serde_json::from_value(serde_json::Value::Object(obj))
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.verify_config().validate()?;
        if self.grid_points == 0 {
            return Err(Error::Config("grid_points must be positive".into()));
        }
        Ok(())
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            e: self.eccentricity,
            q_list: self.q_list.clone(),
            tolerances: self.tolerances,
            convention: self.convention,
            beta_form: self.beta_form,
            variational_max_q: self.variational_max_q,
            alpha_scale: self.alpha_scale,
        }
    }
}

fn key_value_to_json(key: &str, value: &str) -> std::result::Result<serde_json::Value, String> {
    use serde_json::Value;
    let number = |v: &str| {
        v.parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map(Value::Number)
            .ok_or_else(|| format!("'{v}' is not a number"))
    };
    match key {
        "q_list" => value
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map(Value::from)
                    .map_err(|_| format!("'{s}' is not a period"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Value::Array),
        "grid_points" | "variational_max_q" => value
            .parse::<u64>()
            .map(Value::from)
            .map_err(|_| format!("'{value}' is not a count")),
        "convention" => Ok(Value::String(
            match value.parse::<ConventionChoice>()? {
                ConventionChoice::A => "A",
                ConventionChoice::B => "B",
                ConventionChoice::Auto => "auto",
            }
            .into(),
        )),
        "output_format" | "beta_form" => Ok(Value::String(value.to_ascii_lowercase())),
        "output_path" => Ok(Value::String(value.to_string())),
        _ => number(value),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lazutkin",
    version,
    about = "Lazutkin asymptotics of periodic orbits in elliptic billiards"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate α, α′, β, μ and Ê₁ on a uniform t-grid.
    Table(CommonArgs),
    /// Compute one maximal symmetric periodic orbit.
    Orbit(CommonArgs),
    /// Compare empirical orbit coefficients with the closed forms.
    Verify(CommonArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Eccentricity in (0, 1).
    #[arg(long)]
    pub e: Option<f64>,
    /// Period of the orbit.
    #[arg(long)]
    pub q: Option<usize>,
    /// Comma-separated ascending periods, each at least 5.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub q_list: Option<Vec<usize>>,
    /// Number of t-grid rows.
    #[arg(long)]
    pub grid: Option<usize>,
    /// A, B or auto.
    #[arg(long)]
    pub convention: Option<ConventionChoice>,
    /// json or csv.
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Config file (JSON or key = value); flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// closed or caustic.
    #[arg(long)]
    pub beta_form: Option<BetaForm>,
    #[arg(long, hide = true)]
    pub alpha_scale: Option<f64>,
}

impl CommonArgs {
    /// Loads the config file, if any, and applies the flags on top.
    pub fn resolve(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::from_file(path)?,
            None => Config::default(),
        };
        if let Some(e) = self.e {
            cfg.eccentricity = e;
        }
        if let Some(q) = &self.q_list {
            cfg.q_list = q.clone();
        }
        if let Some(g) = self.grid {
            cfg.grid_points = g;
        }
        if let Some(c) = self.convention {
            cfg.convention = c;
        }
        if let Some(f) = self.format {
            cfg.output_format = Some(f);
        }
        if let Some(o) = &self.out {
            cfg.output_path = Some(o.clone());
        }
        if let Some(b) = self.beta_form {
            cfg.beta_form = b;
        }
        if let Some(a) = self.alpha_scale {
            cfg.alpha_scale = a;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &Config, body: &str) -> Result<()> {
    match &cfg.output_path {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    t: f64,
    alpha: f64,
    alpha_prime: f64,
    beta: f64,
    mu: f64,
    e1_hat: f64,
}

pub fn cmd_table(args: &CommonArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let ellipse = EllipseParams::new(cfg.eccentricity)?;
    let n = cfg.grid_points;
    let rows: Vec<TableRow> = (0..n)
        .map(|j| {
            let t = j as f64 / n as f64;
            TableRow {
                t,
                alpha: alpha(t, &ellipse),
                alpha_prime: alpha_prime(t, &ellipse),
                beta: cfg.beta_form.eval(t, &ellipse),
                mu: lazutkin_weight(t, &ellipse),
                e1_hat: e1_hat_closed(t, &ellipse),
            }
        })
        .collect();
    if let Some(bad) = rows.iter().find(|r| {
        ![r.alpha, r.alpha_prime, r.beta, r.mu, r.e1_hat]
            .iter()
            .all(|v| v.is_finite())
    }) {
        return Err(Error::domain(
            "table",
            format!("non-finite value at t = {}", bad.t),
        ));
    }
    let body = match cfg.output_format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => serde_json::to_string_pretty(&rows)? + "\n",
        OutputFormat::Csv => {
            let mut s = String::from(TABLE_CSV_HEADER);
            s.push('\n');
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    fmt_f64(r.t),
                    fmt_f64(r.alpha),
                    fmt_f64(r.alpha_prime),
                    fmt_f64(r.beta),
                    fmt_f64(r.mu),
                    fmt_f64(r.e1_hat)
                );
            }
            s
        }
    };
    emit(&cfg, &body)
}

#[derive(Serialize)]
struct OrbitVertex {
    k: usize,
    phi: f64,
    x: f64,
    theta: f64,
}

#[derive(Serialize)]
struct OrbitOutput {
    e: f64,
    q: usize,
    convention: Convention,
    lambda_q: f64,
    closure_residual: f64,
    vertices: Vec<OrbitVertex>,
}

pub fn cmd_orbit(args: &CommonArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let q = args
        .q
        .ok_or_else(|| Error::Config("orbit needs --q".into()))?;
    if q < MIN_PERIOD {
        return Err(Error::Config(format!("period {q} is below {MIN_PERIOD}")));
    }
    let ellipse = EllipseParams::new(cfg.eccentricity)?;
    let convention = match cfg.convention {
        ConventionChoice::A => Convention::A,
        ConventionChoice::B | ConventionChoice::Auto => Convention::B,
    };
    let orbit = orbit_from_caustic(q, &ellipse, convention)?;
    let body = match cfg.output_format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => {
            let out = OrbitOutput {
                e: cfg.eccentricity,
                q,
                convention,
                lambda_q: orbit.lambda_q,
                closure_residual: orbit.closure_residual,
                vertices: (0..q)
                    .map(|k| OrbitVertex {
                        k,
                        phi: orbit.phi[k],
                        x: orbit.x[k],
                        theta: orbit.theta[k],
                    })
                    .collect(),
            };
            serde_json::to_string_pretty(&out)? + "\n"
        }
        OutputFormat::Csv => {
            let mut s = String::from(ORBIT_CSV_HEADER);
            s.push('\n');
            for k in 0..q {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    k,
                    fmt_f64(orbit.phi[k]),
                    fmt_f64(orbit.x[k]),
                    fmt_f64(orbit.theta[k]),
                    fmt_f64(orbit.lambda_q),
                    fmt_f64(orbit.closure_residual)
                );
            }
            s
        }
    };
    emit(&cfg, &body)
}

fn summary(report: &ResidualReport) -> String {
    let slope = |c: &crate::harness::CurveCheck| {
        c.fit
            .as_ref()
            .map_or_else(|| "n/a".to_string(), |f| format!("{:.3}", f.slope))
    };
    let sup = |c: &crate::harness::CurveCheck| {
        c.richardson
            .as_ref()
            .map_or_else(|| "n/a".to_string(), |r| format!("{:.3e}", r.sup_error))
    };
    let f = &report.flags;
    format!(
        "convention {}: alpha slope {} richardson {} | beta slope {} richardson {} | \
         flags alpha_slope={} alpha_richardson={} beta_slope={} beta_richardson={} oracle={}",
        report.convention,
        slope(&report.alpha),
        sup(&report.alpha),
        slope(&report.beta),
        sup(&report.beta),
        f.alpha_slope,
        f.alpha_richardson,
        f.beta_slope,
        f.beta_richardson,
        f.oracle_agreement
    )
}

/// Returns whether every pass flag was set.
pub fn cmd_verify(args: &CommonArgs) -> Result<bool> {
    let cfg = args.resolve()?;
    let report = run_verification(&cfg.verify_config())?;
    let body = match cfg.output_format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => report.to_json()? + "\n",
        OutputFormat::Csv => report.to_csv(),
    };
    emit(&cfg, &body)?;
    eprintln!("{}", summary(&report));
    Ok(report.all_pass)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

/// Parses `args` and runs the selected subcommand, returning the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Table(a) => cmd_table(a).map(|_| EXIT_OK),
        Command::Orbit(a) => cmd_orbit(a).map(|_| EXIT_OK),
        Command::Verify(a) => {
            cmd_verify(a).map(|pass| if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
