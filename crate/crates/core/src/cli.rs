//! The `bicoeff` command-line front end.
//!
//! Options come from an optional JSON config file (`--config`) and from flags;
//! flags win. Exit codes: 0 success, 1 usage or input error, 2 oracle
//! exceedance under `--strict`, 3 I/O error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::Coefficient;
use crate::cesaro::{apply_cesaro, CesaroParams, FactorRule};
use crate::class::{ClassParams, ClassRegistry, ClassSpec};
use crate::construct::{build_member, verify_membership, SamplingOptions, Seed};
use crate::report::{self, BoundRow, CoefficientRow, Envelope, Table};
use crate::search::{sweep, SearchConfig, Verdict};
use crate::series::{NormalizedSeries, DEFAULT_ORDER};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } => 3,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

/// A single value or an inclusive `start:stop:step` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamRange {
    Value(f64),
    Range { start: f64, stop: f64, step: f64 },
}

const MAX_RANGE_POINTS: usize = 1_000_000;

impl ParamRange {
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number `{t}` in `{s}`"))
        };
        match parts.as_slice() {
            [v] => Ok(ParamRange::Value(num(v)?)),
            [a, b, c] => Ok(ParamRange::Range {
                start: num(a)?,
                stop: num(b)?,
                step: num(c)?,
            }),
            _ => Err(format!("expected `value` or `start:stop:step`, got `{s}`")),
        }
    }

    /// Grid values; `start > stop` gives an empty grid.
    pub fn values(&self) -> Result<Vec<f64>, String> {
        match *self {
            ParamRange::Value(v) if v.is_finite() => Ok(vec![v]),
            ParamRange::Value(v) => Err(format!("value {v} is not finite")),
            ParamRange::Range { start, stop, step } => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
                    return Err("range bounds must be finite".into());
                }
                if start > stop {
                    return Ok(Vec::new());
                }
                if step <= 0.0 {
                    return Err(format!("range step must be positive, got {step}"));
                }
                let slack = 1e-9 * step;
                let mut out = Vec::new();
                for i in 0.. {
                    let v = start + i as f64 * step;
                    if v > stop + slack {
                        break;
                    }
                    if out.len() >= MAX_RANGE_POINTS {
                        return Err(format!("range has more than {MAX_RANGE_POINTS} points"));
                    }
                    out.push(v.min(stop));
                }
                Ok(out)
            }
        }
    }
}

/// Everything a run depends on. Serialized into JSON output verbatim.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub classes: Vec<String>,
    /// Cesàro mean index.
    pub k: Option<ParamRange>,
    /// Cesàro mean order.
    pub mean_order: Option<ParamRange>,
    pub classical_cesaro: bool,
    pub b1: Option<ParamRange>,
    pub b2: Option<ParamRange>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub psi_higher: Vec<f64>,
    pub alpha: Option<ParamRange>,
    pub lambda: Option<ParamRange>,
    pub beta: Option<ParamRange>,
    /// Tail `a_2, a_3, ...` for `invert` and `cesaro`.
    pub coefficients: Option<Vec<Complex64>>,
    pub input: Option<PathBuf>,
    /// Seed prefix for `verify`: `(b1, b2)` for psi, `(p1, p2)` otherwise.
    pub prefix1: Option<Complex64>,
    pub prefix2: Option<Complex64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub order: Option<usize>,
    pub radius: Option<f64>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
    pub grid_density: Option<u32>,
    pub random_restarts: Option<u32>,
    pub refine_steps: Option<u32>,
    pub seed: Option<u64>,
    pub strict: bool,
}

#[derive(Debug, Parser)]
#[command(name = "bicoeff", version, about = "Cesaro-mean coefficient bounds for bi-univalent classes")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Verb {
    /// Tabulate the closed-form |a2|, |a3| bounds over a parameter grid.
    Bounds,
    /// Invert a normalized series z + a2 z^2 + ...
    Invert,
    /// Apply the Cesaro mean to a normalized series.
    Cesaro,
    /// Build a class member from a seed prefix and sample its defining expression.
    Verify,
    /// Run the extremal oracle against the closed-form bounds.
    Search,
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Bounds => "bounds",
            Verb::Invert => "invert",
            Verb::Cesaro => "cesaro",
            Verb::Verify => "verify",
            Verb::Search => "search",
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Truncation order of series.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Random seed of the search.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Exit with code 2 when the oracle exceeds a formula.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Use the classical Cesaro weights instead of the verbatim ones.
    #[arg(long, global = true)]
    pub classical_cesaro: bool,
    /// Class names (psi, strong, real-part); repeat or comma-separate.
    #[arg(long = "class", global = true, value_delimiter = ',')]
    pub classes: Vec<String>,
    /// Mean index k: value or start:stop:step.
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Mean order: value or start:stop:step.
    #[arg(long, global = true)]
    pub mean_order: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b2: Option<String>,
    /// B3, B4, ... of psi, comma-separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub psi_higher: Vec<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true)]
    pub beta: Option<String>,
    /// Coefficients a2, a3, ... as comma-separated complex numbers.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// JSON array of coefficients a2, a3, ... (numbers or [re, im] pairs).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub prefix1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub prefix2: Option<String>,
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub grid_density: Option<u32>,
    #[arg(long = "restarts", global = true)]
    pub random_restarts: Option<u32>,
    #[arg(long, global = true)]
    pub refine_steps: Option<u32>,
}

fn parse_range(s: &Option<String>) -> Result<Option<ParamRange>, CliError> {
    s.as_deref()
        .map(ParamRange::parse)
        .transpose()
        .map_err(CliError::Usage)
}

fn parse_complex_opt(s: &Option<String>) -> Result<Option<Complex64>, CliError> {
    s.as_deref()
        .map(report::parse_complex)
        .transpose()
        .map_err(CliError::Usage)
}

fn parse_coefficients(s: &str) -> Result<Vec<Complex64>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(report::parse_complex)
        .collect::<Result<_, _>>()
        .map_err(CliError::Usage)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InputCoefficient {
    Real(f64),
    Pair([f64; 2]),
}

fn read_coefficient_file(path: &Path) -> Result<Vec<Complex64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw: Vec<InputCoefficient> = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(raw
        .into_iter()
        .map(|c| match c {
            InputCoefficient::Real(x) => Complex64::new(x, 0.0),
            InputCoefficient::Pair([re, im]) => Complex64::new(re, im),
        })
        .collect())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    /// Overlays the flags on top of `self`.
    pub fn merge_flags(mut self, f: &Flags) -> Result<Self, CliError> {
        fn set<T>(slot: &mut Option<T>, v: Option<T>) {
            if v.is_some() {
                *slot = v;
            }
        }
        if !f.classes.is_empty() {
            self.classes = f.classes.clone();
        }
        set(&mut self.k, parse_range(&f.k)?);
        set(&mut self.mean_order, parse_range(&f.mean_order)?);
        self.classical_cesaro |= f.classical_cesaro;
        set(&mut self.b1, parse_range(&f.b1)?);
        set(&mut self.b2, parse_range(&f.b2)?);
        if !f.psi_higher.is_empty() {
            self.psi_higher = f.psi_higher.clone();
        }
        set(&mut self.alpha, parse_range(&f.alpha)?);
        set(&mut self.lambda, parse_range(&f.lambda)?);
        set(&mut self.beta, parse_range(&f.beta)?);
        if let Some(s) = &f.coeffs {
            self.coefficients = Some(parse_coefficients(s)?);
        }
        set(&mut self.input, f.input.clone());
        set(&mut self.prefix1, parse_complex_opt(&f.prefix1)?);
        set(&mut self.prefix2, parse_complex_opt(&f.prefix2)?);
        set(&mut self.format, f.format);
        set(&mut self.out, f.out.clone());
        set(&mut self.order, f.order);
        set(&mut self.radius, f.radius);
        set(&mut self.samples, f.samples);
        set(&mut self.tolerance, f.tolerance);
        set(&mut self.grid_density, f.grid_density);
        set(&mut self.random_restarts, f.random_restarts);
        set(&mut self.refine_steps, f.refine_steps);
        set(&mut self.seed, f.seed);
        self.strict |= f.strict;
        Ok(self)
    }

    fn rule(&self) -> FactorRule {
        if self.classical_cesaro {
            FactorRule::Classical
        } else {
            FactorRule::Verbatim
        }
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    fn search_config(&self) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            grid_density: self.grid_density.unwrap_or(d.grid_density),
            random_restarts: self.random_restarts.unwrap_or(d.random_restarts),
            refine_steps: self.refine_steps.unwrap_or(d.refine_steps),
            seed: self.seed.unwrap_or(d.seed),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
        }
    }

    fn sampling(&self) -> SamplingOptions {
        let d = SamplingOptions::default();
        SamplingOptions {
            radius: self.radius.unwrap_or(d.radius),
            samples: self.samples.unwrap_or(d.samples),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
        }
    }

    fn range(&self, name: &str) -> Option<&ParamRange> {
        match name {
            "b1" => self.b1.as_ref(),
            "b2" => self.b2.as_ref(),
            "alpha" => self.alpha.as_ref(),
            "lambda" => self.lambda.as_ref(),
            "beta" => self.beta.as_ref(),
            _ => None,
        }
    }

    fn cesaro_grid(&self) -> Result<Vec<CesaroParams>, CliError> {
        let ks = self
            .k
            .clone()
            .unwrap_or(ParamRange::Value(3.0))
            .values()
            .map_err(|e| usage(format!("--k: {e}")))?;
        let orders = self
            .mean_order
            .clone()
            .unwrap_or(ParamRange::Value(1.0))
            .values()
            .map_err(|e| usage(format!("--mean-order: {e}")))?;
        let mut out = Vec::new();
        for &k in &ks {
            if k.fract() != 0.0 || k < 1.0 || k > u32::MAX as f64 {
                return Err(usage(format!("--k: {k} is not a positive integer")));
            }
            for &a in &orders {
                out.push(CesaroParams::with_rule(k as u32, a, self.rule()).map_err(usage)?);
            }
        }
        Ok(out)
    }

    /// Every class spec of the grid, in the order class, k, mean order, then
    /// class parameters in registry order.
    pub fn class_specs(&self, registry: &ClassRegistry) -> Result<Vec<ClassSpec>, CliError> {
        if self.classes.is_empty() {
            return Err(usage(format!(
                "no class selected; use --class with one of: {}",
                registry.names().collect::<Vec<_>>().join(", ")
            )));
        }
        let cesaro = self.cesaro_grid()?;
        let mut specs = Vec::new();
        for name in &self.classes {
            let entry = registry.get(name).ok_or_else(|| {
                usage(format!(
                    "unknown class `{name}` (known: {})",
                    registry.names().collect::<Vec<_>>().join(", ")
                ))
            })?;
            let mut axes: Vec<(&str, Vec<f64>)> = Vec::new();
            for &p in entry.params {
                let r = self
                    .range(p)
                    .ok_or_else(|| usage(format!("class `{name}` needs --{p}")))?;
                axes.push((p, r.values().map_err(|e| usage(format!("--{p}: {e}")))?));
            }
            for cp in &cesaro {
                for point in cartesian(&axes) {
                    let mut params = ClassParams {
                        higher: self.psi_higher.clone(),
                        ..Default::default()
                    };
                    for (p, v) in point {
                        match p {
                            "b1" => params.b1 = Some(v),
                            "b2" => params.b2 = Some(v),
                            "alpha" => params.alpha = Some(v),
                            "lambda" => params.lambda = Some(v),
                            "beta" => params.beta = Some(v),
                            _ => {}
                        }
                    }
                    specs.push(registry.spec(name, &params, *cp).map_err(usage)?);
                }
            }
        }
        Ok(specs)
    }

    fn coefficient_tail(&self) -> Result<Vec<Complex64>, CliError> {
        if let Some(c) = &self.coefficients {
            return Ok(c.clone());
        }
        match &self.input {
            Some(path) => read_coefficient_file(path),
            None => Ok(Vec::new()),
        }
    }
}

fn cartesian<'a>(axes: &[(&'a str, Vec<f64>)]) -> Vec<Vec<(&'a str, f64)>> {
    axes.iter().fold(vec![Vec::new()], |acc, (name, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((*name, v));
                    p
                })
            })
            .collect()
    })
}

/// Rendered output plus whether any oracle beat its formula.
pub struct Outcome {
    pub text: String,
    pub exceeded: bool,
}

fn render<R: Serialize>(
    cfg: &RunConfig,
    rows: Vec<R>,
    table: impl FnOnce(&[R]) -> Table,
) -> Result<String, CliError> {
    Ok(match cfg.format() {
        Format::Csv => table(&rows).to_csv(),
        Format::Pretty => table(&rows).to_pretty(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Envelope::new(cfg, rows)).map_err(usage)?;
            s.push('\n');
            s
        }
    })
}

fn series_rows(s: &NormalizedSeries) -> Vec<CoefficientRow> {
    s.series()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &coefficient)| CoefficientRow { n, coefficient })
        .collect()
}

/// Runs one verb against a fully merged config.
pub fn execute(verb: Verb, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let registry = ClassRegistry::builtin();
    let mut exceeded = false;
    let text = match verb {
        Verb::Bounds => {
            let mut rows = Vec::new();
            for spec in cfg.class_specs(&registry)? {
                let class = spec.instantiate();
                for c in [Coefficient::A2, Coefficient::A3] {
                    rows.push(BoundRow::from_result(&spec, class.formula(c), class.bound(c)));
                }
            }
            render(cfg, rows, report::bounds_table)?
        }
        Verb::Invert => {
            let tail = cfg.coefficient_tail()?;
            let order = cfg.order.unwrap_or(tail.len() + 1).max(1);
            let f = NormalizedSeries::from_tail(&tail, order).map_err(usage)?;
            render(cfg, series_rows(&f.invert()), report::coefficient_table)?
        }
        Verb::Cesaro => {
            let tail = cfg.coefficient_tail()?;
            let cp = single(cfg.cesaro_grid()?, "--k/--mean-order")?;
            let order = cfg.order.unwrap_or((tail.len() + 1).max(cp.k() as usize)).max(1);
            let f = NormalizedSeries::from_tail(&tail, order).map_err(usage)?;
            let mean = apply_cesaro(&f, &cp).map_err(usage)?;
            render(cfg, series_rows(&mean), report::coefficient_table)?
        }
        Verb::Verify => {
            let spec = single(cfg.class_specs(&registry)?, "class parameters")?;
            let class = spec.instantiate();
            let zero = Complex64::new(0.0, 0.0);
            let seed = Seed::checked(
                class.seed_kind(),
                cfg.prefix1.unwrap_or(zero),
                cfg.prefix2.unwrap_or(zero),
            )
            .map_err(usage)?;
            let member = build_member(class.as_ref(), seed)
                .and_then(|m| m.with_order(cfg.order.unwrap_or(DEFAULT_ORDER)))
                .map_err(usage)?;
            let report = verify_membership(&member, &cfg.sampling()).map_err(usage)?;
            render(cfg, vec![report], report::verification_table)?
        }
        Verb::Search => {
            let specs = cfg.class_specs(&registry)?;
            let search = cfg.search_config();
            search.validate().map_err(usage)?;
            let reports = if specs.is_empty() {
                Vec::new()
            } else {
                sweep(&specs, &search).map_err(usage)?
            };
            exceeded = reports.iter().any(|r| r.verdict == Verdict::OracleExceeds);
            render(cfg, reports, report::consistency_table)?
        }
    };
    Ok(Outcome { text, exceeded })
}

fn single<T>(mut items: Vec<T>, what: &str) -> Result<T, CliError> {
    if items.len() != 1 {
        return Err(usage(format!(
            "{what} must describe exactly one point, got {}",
            items.len()
        )));
    }
    Ok(items.remove(0))
}

/// Writes `text` to `path` through a temporary file in the same directory, so
/// a failed run never leaves a partial file.
fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let base = match &cli.flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = base.merge_flags(&cli.flags)?;
    cfg.command = Some(cli.verb.name().to_string());
    let outcome = execute(cli.verb, &cfg)?;
    match &cfg.out {
        Some(path) => write_atomic(path, &outcome.text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
    }
    if cfg.strict && outcome.exceeded {
        eprintln!("bicoeff: oracle exceeds a closed-form bound (strict mode)");
    }
    Ok(outcome)
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let strict = cli.flags.strict;
    match run(cli) {
        Ok(outcome) if outcome.exceeded && strict => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bicoeff: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
