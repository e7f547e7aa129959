//! Command line front end.
//!
//! Parameters come from a TOML file (`--config`), a bundled scenario
//! (`--scenario`) and individual flags, later sources overriding earlier ones.
//! Exit codes: 0 success, 1 invariant or analysis failure, 2 configuration
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bifurcation::{classify_scenario, format_sequence, regime_sequence, sweep, SweepOptions, SweptParameter};
use crate::equilibria::{asymmetric_stability, find_equilibria, lambda_star, DEFAULT_GRID, MIN_GRID};
use crate::error::Error;
use crate::fixtures::{self, SpecName};
use crate::innovation::InnovationSpec;
use crate::model::{Model, QuarticForm};
use crate::params::ModelParams;
use crate::report::{self, DEFAULT_PRECISION};
use crate::thresholds::{threshold_report, DEFAULT_Z, PHI_MAX, PHI_MIN};
use crate::validate::{validate, ValidateOptions, DEFAULT_PERTURBATIONS, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "innogeo", version, about = "Equilibria, thresholds and bifurcation diagrams of a two-region geography model with innovation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria and their stability at a fixed parameter point.
    Equilibria {
        #[command(flatten)]
        common: Common,
        /// Grid size of the root scan on (1/2, 1].
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Closed-form critical values and conditions.
    Thresholds {
        #[command(flatten)]
        common: Common,
        /// Asymmetric share at which the z-dependent thresholds are evaluated.
        #[arg(long)]
        z: Option<f64>,
    },
    /// One-parameter bifurcation diagram.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Also write a matplotlib script that draws the CSV written to --out.
        #[arg(long)]
        plot_script: Option<PathBuf>,
    },
    /// Scenario classification of a phi sweep.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Immobile-worker mass that makes each z an interior equilibrium.
    LambdaStar {
        #[command(flatten)]
        common: Common,
        /// Shares in (1/2, 1]; defaults to 0.55, 0.60, ..., 0.95.
        #[arg(long, value_delimiter = ',')]
        z: Vec<f64>,
    },
    /// Cross-validation invariants on the point and seeded perturbations.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        perturbations: Option<usize>,
        /// Test hook: coefficient set for the analytic derivative.
        #[arg(long, value_enum, hide = true, default_value = "corrected")]
        quartic_form: QuarticArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum QuarticArg {
    Corrected,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecArg {
    Additive,
    CobbDouglas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamArg {
    Phi,
    B,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML file with any of the flag values below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Bundled scenario supplying lambda, gamma, sigma, b and spec.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, value_enum)]
    pub spec: Option<SpecArg>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits in the output.
    #[arg(long)]
    pub precision: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: Option<ParamArg>,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Number of grid values before refinement.
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid of the equilibrium search at each value.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Disable adaptive refinement near events.
    #[arg(long)]
    pub no_refine: bool,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<String>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub sigma: Option<f64>,
    pub b: Option<f64>,
    pub phi: Option<f64>,
    pub mu: Option<f64>,
    pub spec: Option<SpecArg>,
    pub format: Option<Format>,
    pub precision: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub z: Option<f64>,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: Option<ParamArg>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub n: Option<usize>,
}

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Config(String),
    /// Exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::InvalidSpec(_) | Error::Config(_) => CliError::Config(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parameter values after merging config file, scenario and flags.
struct Resolved {
    file: ConfigFile,
    lambda: Option<f64>,
    gamma: Option<f64>,
    sigma: Option<f64>,
    b: Option<f64>,
    phi: Option<f64>,
    mu: f64,
    spec: SpecArg,
    format: Format,
    precision: usize,
    out: Option<PathBuf>,
}

fn load_config(path: &Path) -> CliResult<ConfigFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("config: cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("config: {}: {}", path.display(), e.message())))
}

fn resolve(c: &Common) -> CliResult<Resolved> {
    let file = match &c.config {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    };
    let mut r = Resolved {
        lambda: file.lambda,
        gamma: file.gamma,
        sigma: file.sigma,
        b: file.b,
        phi: file.phi,
        mu: 1.0,
        spec: file.spec.unwrap_or(SpecArg::Additive),
        format: file.format.unwrap_or_default(),
        precision: file.precision.unwrap_or(DEFAULT_PRECISION),
        out: c.out.clone(),
        file: ConfigFile::default(),
    };
    if let Some(name) = c.scenario.as_deref().or(file.scenario.as_deref()) {
        let s = fixtures::scenario(name).map_err(|e| CliError::Config(format!("scenario: {e}")))?;
        r.lambda = Some(s.lambda);
        r.gamma = Some(s.gamma);
        r.sigma = Some(s.sigma);
        r.b = Some(s.b);
        r.spec = match s.spec {
            SpecName::Additive => SpecArg::Additive,
            SpecName::CobbDouglas => SpecArg::CobbDouglas,
        };
    }
    r.mu = c.mu.or(file.mu).unwrap_or(1.0);
    r.lambda = c.lambda.or(r.lambda);
    r.gamma = c.gamma.or(r.gamma);
    r.sigma = c.sigma.or(r.sigma);
    r.b = c.b.or(r.b);
    r.phi = c.phi.or(r.phi);
    r.spec = c.spec.unwrap_or(r.spec);
    r.format = c.format.unwrap_or(r.format);
    r.precision = c.precision.unwrap_or(r.precision);
    if !(1..=17).contains(&r.precision) {
        return Err(CliError::Config(format!("precision must lie in [1,17] (got {})", r.precision)));
    }
    r.file = file;
    Ok(r)
}

fn required(name: &str, v: Option<f64>) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Config(format!("{name} is required (pass --{name} or set it in --config)")))
}

impl Resolved {
    /// Builds the parameter point; `placeholder` stands in for a swept value.
    fn params(&self, placeholder: Option<(ParamArg, f64)>) -> CliResult<ModelParams> {
        let (mut b, mut phi) = (self.b, self.phi);
        match placeholder {
            Some((ParamArg::Phi, v)) => phi = Some(v),
            Some((ParamArg::B, v)) => b = Some(v),
            None => {}
        }
        let p = ModelParams::new(
            required("lambda", self.lambda)?,
            required("gamma", self.gamma)?,
            required("sigma", self.sigma)?,
            required("b", b)?,
            required("phi", phi)?,
        )?;
        Ok(p.with_mu(self.mu)?)
    }

    fn spec(&self) -> InnovationSpec {
        match self.spec {
            SpecArg::Additive => InnovationSpec::Additive,
            SpecArg::CobbDouglas => InnovationSpec::CobbDouglas,
        }
    }

    fn model(&self, placeholder: Option<(ParamArg, f64)>) -> CliResult<Model> {
        Ok(Model::new(self.spec(), self.params(placeholder)?)?)
    }

    fn emit(&self, text: &str) -> CliResult<()> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .map_err(|e| CliError::Failure(format!("cannot write output: {e}")))
            }
        }
    }

    fn json(&self, command: &str, params: &ModelParams, results: Value, extra: Value) -> CliResult<String> {
        let doc = report::json_document(command, params, &self.spec().kind(), results, self.precision, extra);
        let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Failure(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

fn grid_arg(name: &str, v: usize, min: usize) -> CliResult<usize> {
    if v < min {
        Err(CliError::Config(format!("{name} must be at least {min} (got {v})")))
    } else {
        Ok(v)
    }
}

struct SweepPlan {
    param: ParamArg,
    opts: SweepOptions,
}

fn sweep_plan(r: &Resolved, s: &SweepArgs) -> CliResult<SweepPlan> {
    let f = &r.file.sweep;
    let param = s.param.or(f.param).unwrap_or(ParamArg::Phi);
    let (lo, hi) = match param {
        ParamArg::Phi => (PHI_MIN, PHI_MAX),
        ParamArg::B => (0.01, 0.99),
    };
    let from = s.from.or(f.from).unwrap_or(lo);
    let to = s.to.or(f.to).unwrap_or(hi);
    for (name, v) in [("from", from), ("to", to)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(CliError::Config(format!("{name} must lie in (0,1) (got {v})")));
        }
    }
    if from >= to {
        return Err(CliError::Config(format!("to must exceed from (got from={from}, to={to})")));
    }
    let defaults = SweepOptions::default();
    let opts = SweepOptions {
        from,
        to,
        n_grid: grid_arg("n", s.n.or(f.n).unwrap_or(defaults.n_grid), 50)?,
        eq_grid: grid_arg("grid", s.grid.or(r.file.grid).unwrap_or(defaults.eq_grid), MIN_GRID)?,
        refine: !s.no_refine,
    };
    Ok(SweepPlan { param, opts })
}

fn swept(p: ParamArg) -> SweptParameter {
    match p {
        ParamArg::Phi => SweptParameter::Phi,
        ParamArg::B => SweptParameter::B,
    }
}

fn run_equilibria(c: &Common, grid: Option<usize>) -> CliResult<()> {
    let r = resolve(c)?;
    let grid = grid_arg("grid", grid.or(r.file.grid).unwrap_or(DEFAULT_GRID), MIN_GRID)?;
    let m = r.model(None)?;
    let set = find_equilibria(&m, grid)?;
    for w in &set.warnings {
        log::warn!("{w}");
    }
    let text = match r.format {
        Format::Csv => report::equilibria_csv(&set, r.precision)?,
        Format::Json => r.json(
            "equilibria",
            m.params(),
            json!({
                "equilibria": set.equilibria,
                "interior_count_upper_half": set.interior_count_upper_half,
                "warnings": set.warnings,
            }),
            json!({ "grid": grid }),
        )?,
    };
    r.emit(&text)
}

fn run_thresholds(c: &Common, z: Option<f64>) -> CliResult<()> {
    let r = resolve(c)?;
    let z = z.or(r.file.z).unwrap_or(DEFAULT_Z);
    let m = r.model(None)?;
    let rep = threshold_report(m.spec(), m.params(), z)?;
    for w in &rep.break_points.warnings {
        log::warn!("{w}");
    }
    let text = match r.format {
        Format::Csv => report::thresholds_csv(&rep, r.precision)?,
        Format::Json => r.json("thresholds", m.params(), report::thresholds_json_results(&rep), json!({ "z": z }))?,
    };
    r.emit(&text)
}

fn run_sweep(c: &Common, s: &SweepArgs, plot: Option<&Path>, classify_only: bool) -> CliResult<()> {
    let r = resolve(c)?;
    let plan = sweep_plan(&r, s)?;
    if classify_only && plan.param != ParamArg::Phi {
        return Err(CliError::Config("param must be phi for classify".into()));
    }
    let m = r.model(Some((plan.param, plan.opts.from)))?;
    let d = sweep(&m, swept(plan.param), &plan.opts)?;
    for w in &d.warnings {
        log::warn!("{w}");
    }
    let (class, unclassified) = if plan.param == ParamArg::Phi {
        match classify_scenario(&d) {
            Ok(cl) => (Some(cl), None),
            Err(Error::Unclassified { sequence }) => (None, Some(sequence)),
            Err(e) => return Err(e.into()),
        }
    } else {
        (None, None)
    };
    let command = if classify_only { "classify" } else { "sweep" };
    let extra = json!({ "sweep": plan.opts, "param": swept(plan.param) });
    let text = if classify_only {
        let seq = format_sequence(&regime_sequence(&d));
        match r.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let hyst = class
                    .as_ref()
                    .map(|cl| {
                        cl.hysteresis
                            .iter()
                            .map(|(a, b)| format!("{}:{}", report::fmt_num(*a, r.precision), report::fmt_num(*b, r.precision)))
                            .collect::<Vec<_>>()
                            .join(";")
                    })
                    .unwrap_or_default();
                let rows = [
                    ["id", class.as_ref().map_or("unclassified", |cl| cl.id.as_str())],
                    ["label", class.as_ref().map_or("", |cl| cl.label.as_str())],
                    ["sequence", seq.as_str()],
                    ["hysteresis", hyst.as_str()],
                ];
                let io = |e: csv::Error| CliError::Failure(e.to_string());
                w.write_record(["key", "value"]).map_err(io)?;
                for row in rows {
                    w.write_record(row).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::Failure(e.to_string()))?
            }
            Format::Json => r.json(
                command,
                m.params(),
                json!({ "classification": class, "sequence": seq, "unclassified_sequence": unclassified }),
                extra,
            )?,
        }
    } else {
        match r.format {
            Format::Csv => report::sweep_csv(&d, r.precision)?,
            Format::Json => r.json(command, m.params(), report::sweep_json_results(&d, class.as_ref(), unclassified.as_deref()), extra)?,
        }
    };
    match (&class, &unclassified) {
        (Some(cl), _) => log::info!("classification: {}", cl.label),
        (None, Some(seq)) => log::warn!("unclassified regime sequence: {seq}"),
        _ => {}
    }
    r.emit(&text)?;
    if let Some(path) = plot {
        let csv_name = match (&r.out, r.format) {
            (Some(p), Format::Csv) => p.display().to_string(),
            _ => "sweep.csv".to_string(),
        };
        fs::write(path, report::plot_script(&csv_name, swept(plan.param).as_str()))
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_lambda_star(c: &Common, zs: &[f64]) -> CliResult<()> {
    let r = resolve(c)?;
    // λ is the output here, so it may be omitted; any valid value will do.
    let p = ModelParams::new(
        r.lambda.unwrap_or(1.0),
        required("gamma", r.gamma)?,
        required("sigma", r.sigma)?,
        required("b", r.b)?,
        required("phi", r.phi)?,
    )?
    .with_mu(r.mu)?;
    if r.spec != SpecArg::Additive {
        return Err(CliError::Config("spec must be additive for lambda-star".into()));
    }
    let zs: Vec<f64> = if zs.is_empty() {
        (0..9).map(|i| 0.55 + 0.05 * i as f64).collect()
    } else {
        zs.to_vec()
    };
    let mut rows = Vec::new();
    for &z in &zs {
        let ls = lambda_star(&p, z).map_err(|e| match e {
            Error::Domain { .. } => CliError::Config(format!("z must lie in (1/2, 1] (got {z})")),
            e => e.into(),
        })?;
        let stability = if ls.admissible && z < 1.0 {
            Some(asymmetric_stability(&p, z)?)
        } else {
            None
        };
        rows.push((z, ls, stability));
    }
    let text = match r.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Failure(e.to_string());
            w.write_record(["z", "lambda_star", "admissible", "stability"]).map_err(io)?;
            for (z, ls, st) in &rows {
                w.write_record([
                    report::fmt_num(*z, r.precision),
                    report::fmt_num(ls.value, r.precision),
                    ls.admissible.to_string(),
                    st.map(|s| s.to_string()).unwrap_or_default(),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Failure(e.to_string()))?
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(z, ls, st)| json!({ "z": z, "lambda_star": ls.value, "admissible": ls.admissible, "stability": st }))
                .collect();
            r.json("lambda-star", &p, Value::Array(items), json!({}))?
        }
    };
    r.emit(&text)
}

fn run_validate(c: &Common, seed: Option<u64>, perturbations: Option<usize>, form: QuarticArg) -> CliResult<()> {
    let r = resolve(c)?;
    let m = r.model(None)?;
    let opts = ValidateOptions {
        spec: r.spec(),
        seed: seed.or(r.file.seed).unwrap_or(DEFAULT_SEED),
        perturbations: perturbations.unwrap_or(DEFAULT_PERTURBATIONS),
        quartic_form: match form {
            QuarticArg::Corrected => QuarticForm::Corrected,
            QuarticArg::AsPrinted => QuarticForm::AsPrinted,
        },
    };
    let summary = validate(m.params(), &opts)?;
    let text = match r.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Failure(e.to_string());
            w.write_record(["check", "status", "comparisons", "failures", "worst", "first_failure"]).map_err(io)?;
            for ch in &summary.checks {
                w.write_record([
                    ch.name.to_string(),
                    if ch.passed() { "pass" } else { "fail" }.to_string(),
                    ch.comparisons.to_string(),
                    ch.failures.to_string(),
                    report::fmt_num(ch.worst, r.precision),
                    ch.first_failure.clone().unwrap_or_default(),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Failure(e.to_string()))?
        }
        Format::Json => r.json("validate", m.params(), json!(summary), json!({ "seed": opts.seed }))?,
    };
    r.emit(&text)?;
    match summary.first_failure() {
        Some(ch) => Err(CliError::Failure(format!(
            "invariant failed: {} ({} of {} comparisons); first: {}",
            ch.name,
            ch.failures,
            ch.comparisons,
            ch.first_failure.as_deref().unwrap_or("")
        ))),
        None => Ok(()),
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> std::result::Result<(), CliError> {
    match &cli.command {
        Command::Equilibria { common, grid } => run_equilibria(common, *grid),
        Command::Thresholds { common, z } => run_thresholds(common, *z),
        Command::Sweep { common, sweep, plot_script } => run_sweep(common, sweep, plot_script.as_deref(), false),
        Command::Classify { common, sweep } => run_sweep(common, sweep, None, true),
        Command::LambdaStar { common, z } => run_lambda_star(common, z),
        Command::Validate {
            common,
            seed,
            perturbations,
            quartic_form,
        } => run_validate(common, *seed, *perturbations, *quartic_form),
    }
}

/// Parses `std::env::args`, runs, reports errors on stderr and returns the
/// process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
