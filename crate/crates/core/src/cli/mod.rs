//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage and validation errors, 3 for
//! numerical failures (and for non-converged results under `--strict`).

mod config;
mod output;
mod svg;

pub use config::{parse_config, parse_overrides, Format, Overrides, RunConfig};
pub use output::{num, read_sweep_csv, sweep_table, to_json, CsvRow, Table};
pub use svg::render_svg;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::distinguishability::{non_markovianity, Exponent};
use crate::dynamics::{coherence_l1, kappa_with_derivative, reduced_state};
use crate::error::Error;
use crate::kernels::{kernel_closed_form, kernel_quadrature};
use crate::qsl::{qsl_report, Convention};
use crate::sweep::{
    figure_preset, run_sweep, Axis, AxisParam, Metric, Scale, SweepOptions, SweepResult, SweepSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }

    /// I/O problems are reported as usage errors: the path given was unusable.
    pub fn io(e: impl fmt::Display) -> Self {
        CliError::usage(format!("i/o error: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::numerical(e.to_string())
        } else {
            CliError::usage(e.to_string())
        }
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "dephasing-qsl",
    version,
    about = "Dephasing kernels, non-Markovianity and quantum speed limits of a qubit correlated with a bosonic bath"
)]
pub struct Cli {
    /// Flat `key = value` configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 if any result is flagged as not converged.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long = "omega-c", global = true, allow_negative_numbers = true)]
    pub omega_c: Option<f64>,
    #[arg(
        long = "omega0",
        alias = "omega-0",
        global = true,
        allow_negative_numbers = true
    )]
    pub omega_0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Driving time of the speed-limit bounds.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// Initial horizon of the non-Markovianity integral.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    /// Pair-distance exponent: 1 or 2.
    #[arg(long, global = true, value_parser = parse_exponent)]
    pub exponent: Option<Exponent>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// `as-printed` or `with-tau-factor`.
    #[arg(long, global = true, value_parser = parse_convention)]
    pub convention: Option<Convention>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dephasing kernels r, s, Φ and their derivatives, with quadrature residuals.
    Kernels {
        /// Times, comma separated or repeated.
        #[arg(
            long = "t",
            required = true,
            value_delimiter = ',',
            allow_negative_numbers = true
        )]
        t: Vec<f64>,
    },
    /// Decoherence factor κ and the reduced state.
    Kappa {
        #[arg(
            long = "t",
            required = true,
            value_delimiter = ',',
            allow_negative_numbers = true
        )]
        t: Vec<f64>,
    },
    /// Trace-distance non-Markovianity.
    Nonmarkov,
    /// Speed-limit bounds at driving time `--tau`.
    Qsl,
    /// Custom 1-D or 2-D parameter sweep.
    Sweep {
        /// non_markovianity, qsl_correlated, coherence_initial or trace_distance_pair.
        #[arg(long)]
        metric: String,
        /// `name:min:max:count[:linear|log]`, given once or twice.
        #[arg(long = "axis", required = true, allow_hyphen_values = true)]
        axes: Vec<String>,
    },
    /// Run a named preset and write `<id>.csv` and `<id>.svg` into a directory.
    Reproduce { figure: String, dir: PathBuf },
}

impl ModelArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            alpha: self.alpha,
            mu: self.mu,
            v: self.v,
            omega_c: self.omega_c,
            omega_0: self.omega_0,
            lambda: self.lambda,
            exponent: self.exponent,
            convention: self.convention,
            horizon: self.horizon,
            tau: self.tau,
            tol: self.tol,
            ..Overrides::default()
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            parse_overrides(&text)?
        }
        None => Overrides::default(),
    };
    let flags = Overrides {
        format: cli.format,
        out: cli.out.clone(),
        ..cli.model.overrides()
    };
    file.merge(flags).resolve()
}

/// Parses `name:min:max:count[:scale]`.
pub fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(CliError::usage(format!(
            "axis `{s}`: expected name:min:max:count[:linear|log]"
        )));
    }
    let param: AxisParam = parts[0].parse()?;
    let number = |i: usize| {
        parts[i]
            .parse::<f64>()
            .map_err(|_| CliError::usage(format!("axis `{s}`: `{}` is not a number", parts[i])))
    };
    let count = parts[3].parse::<usize>().map_err(|_| {
        CliError::usage(format!(
            "axis `{s}`: count `{}` is not an integer",
            parts[3]
        ))
    })?;
    let scale = match parts.get(4).copied().unwrap_or("linear") {
        "linear" | "lin" => Scale::Linear,
        "log" => Scale::Log,
        other => {
            return Err(CliError::usage(format!(
                "axis `{s}`: unknown scale `{other}`"
            )))
        }
    };
    Ok(Axis {
        param,
        min: number(1)?,
        max: number(2)?,
        count,
        scale,
    })
}

#[derive(Debug, Serialize)]
struct KernelRow {
    t: f64,
    r: f64,
    s: f64,
    phi: f64,
    r_dot: f64,
    s_dot: f64,
    phi_dot: f64,
    r_quadrature: f64,
    s_quadrature: f64,
    phi_quadrature: f64,
    residual_r: f64,
    residual_s: f64,
    residual_phi: f64,
}

#[derive(Debug, Serialize)]
struct KappaRow {
    t: f64,
    kappa_re: f64,
    kappa_im: f64,
    kappa_abs: f64,
    kappa_dot_re: f64,
    kappa_dot_im: f64,
    p_ee: f64,
    coh_re: f64,
    coh_im: f64,
    coherence_l1: f64,
}

fn emit(text: &str, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(CliError::io),
    }
}

fn cmd_kernels(cfg: &RunConfig, times: &[f64]) -> Result<String, CliError> {
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let c = kernel_closed_form(&cfg.params, t)?;
        let q = kernel_quadrature(&cfg.params, t)?;
        rows.push(KernelRow {
            t,
            r: c.r,
            s: c.s,
            phi: c.phi,
            r_dot: c.r_dot,
            s_dot: c.s_dot,
            phi_dot: c.phi_dot,
            r_quadrature: q.r,
            s_quadrature: q.s,
            phi_quadrature: q.phi,
            residual_r: c.r - q.r,
            residual_s: c.s - q.s,
            residual_phi: c.phi - q.phi,
        });
    }
    match cfg.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut t = Table::new([
                "t",
                "r",
                "s",
                "phi",
                "r_dot",
                "s_dot",
                "phi_dot",
                "r_quadrature",
                "s_quadrature",
                "phi_quadrature",
                "residual_r",
                "residual_s",
                "residual_phi",
            ]);
            for k in &rows {
                t.push(
                    [
                        k.t,
                        k.r,
                        k.s,
                        k.phi,
                        k.r_dot,
                        k.s_dot,
                        k.phi_dot,
                        k.r_quadrature,
                        k.s_quadrature,
                        k.phi_quadrature,
                        k.residual_r,
                        k.residual_s,
                        k.residual_phi,
                    ]
                    .map(num)
                    .to_vec(),
                );
            }
            t.to_csv()
        }
    }
}

fn cmd_kappa(cfg: &RunConfig, times: &[f64]) -> Result<String, CliError> {
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let (k, kd) = kappa_with_derivative(&cfg.params, t)?;
        let rho = reduced_state(&cfg.params, t)?;
        rows.push(KappaRow {
            t,
            kappa_re: k.re,
            kappa_im: k.im,
            kappa_abs: k.norm(),
            kappa_dot_re: kd.re,
            kappa_dot_im: kd.im,
            p_ee: rho.p_ee,
            coh_re: rho.coh.re,
            coh_im: rho.coh.im,
            coherence_l1: coherence_l1(&rho),
        });
    }
    match cfg.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut t = Table::new([
                "t",
                "kappa_re",
                "kappa_im",
                "kappa_abs",
                "kappa_dot_re",
                "kappa_dot_im",
                "p_ee",
                "coh_re",
                "coh_im",
                "coherence_l1",
            ]);
            for k in &rows {
                t.push(
                    [
                        k.t,
                        k.kappa_re,
                        k.kappa_im,
                        k.kappa_abs,
                        k.kappa_dot_re,
                        k.kappa_dot_im,
                        k.p_ee,
                        k.coh_re,
                        k.coh_im,
                        k.coherence_l1,
                    ]
                    .map(num)
                    .to_vec(),
                );
            }
            t.to_csv()
        }
    }
}

fn cmd_nonmarkov(
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let rep = non_markovianity(&cfg.params, cfg.horizon, cfg.exponent, cfg.tol)?;
    let text = match cfg.format {
        Format::Json => to_json(&rep)?,
        Format::Csv => {
            let mut t = Table::new([
                "n_value",
                "horizon",
                "exponent",
                "converged",
                "interval_start",
                "interval_end",
            ]);
            let head = || {
                vec![
                    num(rep.n_value),
                    num(rep.horizon),
                    rep.exponent.to_string(),
                    rep.converged.to_string(),
                ]
            };
            if rep.intervals.is_empty() {
                t.push([head(), vec![String::new(), String::new()]].concat());
            }
            for &(a, b) in &rep.intervals {
                t.push([head(), vec![num(a), num(b)]].concat());
            }
            t.to_csv()?
        }
    };
    emit(&text, cfg, stdout)?;
    if rep.converged {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(
            stderr,
            "error: non-Markovianity did not converge within horizon {:e} (tol {:e})",
            rep.horizon, cfg.tol
        );
        Ok(EXIT_NUMERICAL)
    }
}

fn cmd_qsl(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.tau <= 0.0 {
        return Err(CliError::usage(format!(
            "invalid parameter `tau` = {}: must be > 0",
            cfg.tau
        )));
    }
    let rep = qsl_report(&cfg.params, cfg.tau, cfg.convention)?;
    match cfg.format {
        Format::Json => to_json(&rep),
        Format::Csv => {
            let mut t = Table::new([
                "tau",
                "theta",
                "lambda_op",
                "lambda_tr",
                "lambda_hs",
                "tau_ml",
                "tau_mt",
                "tau_unified",
                "tau_correlated",
                "convention",
                "coherence_initial",
                "consistent",
            ]);
            let mut row: Vec<String> = [
                rep.tau,
                rep.theta,
                rep.lambda_op,
                rep.lambda_tr,
                rep.lambda_hs,
                rep.tau_ml,
                rep.tau_mt,
                rep.tau_unified,
            ]
            .map(num)
            .to_vec();
            row.push(rep.tau_correlated.map(num).unwrap_or_default());
            row.push(rep.convention.to_string());
            row.push(num(rep.coherence_initial));
            row.push(rep.consistent.map(|b| b.to_string()).unwrap_or_default());
            t.push(row);
            t.to_csv()
        }
    }
}

fn options(cfg: &RunConfig) -> SweepOptions {
    SweepOptions {
        exponent: cfg.exponent,
        convention: cfg.convention,
        horizon: cfg.horizon,
        tau: cfg.tau,
        tol: cfg.tol,
    }
}

fn sweep_text(result: &SweepResult, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => sweep_table(result).to_csv(),
        Format::Json => to_json(result),
    }
}

fn strict_check(result: &SweepResult, strict: bool, stderr: &mut dyn Write) -> i32 {
    let bad = result.rows.iter().filter(|r| !r.converged).count();
    if bad == 0 {
        return EXIT_OK;
    }
    let _ = writeln!(
        stderr,
        "warning: {bad} of {} rows not converged",
        result.rows.len()
    );
    if strict {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}

fn cmd_sweep(
    cfg: &RunConfig,
    metric: &str,
    axes: &[String],
    strict: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let metric: Metric = metric.parse()?;
    let axes = axes
        .iter()
        .map(|a| parse_axis(a))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SweepSpec {
        metric,
        axes,
        fixed: cfg.params,
        options: options(cfg),
    };
    let result = run_sweep(&spec)?;
    emit(&sweep_text(&result, cfg.format)?, cfg, stdout)?;
    Ok(strict_check(&result, strict, stderr))
}

/// One-line description of a sweep: size, value range and argmax.
pub fn summary(id: &str, result: &SweepResult) -> String {
    let mut s = format!(
        "{id}: {} rows, metric {}",
        result.rows.len(),
        result.spec.metric
    );
    if let Some((lo, hi)) = result.range() {
        s += &format!(", min {}, max {}", num(lo), num(hi));
    }
    if let Some(best) = result.argmax() {
        let at: Vec<String> = result
            .spec
            .axes
            .iter()
            .zip(&best.values)
            .map(|(a, &x)| format!("{}={}", a.param, num(x)))
            .collect();
        s += &format!(", argmax at {}", at.join(" "));
    }
    let bad = result.rows.iter().filter(|r| !r.converged).count();
    if bad > 0 {
        s += &format!(", {bad} not converged");
    }
    s
}

fn cmd_reproduce(
    cfg: &RunConfig,
    id: &str,
    dir: &Path,
    strict: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut spec = figure_preset(id)?;
    spec.options = options(cfg);
    let result = run_sweep(&spec)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    let csv_path = dir.join(format!("{id}.csv"));
    let svg_path = dir.join(format!("{id}.svg"));
    std::fs::write(&csv_path, sweep_table(&result).to_csv()?)
        .map_err(|e| CliError::io(format!("{}: {e}", csv_path.display())))?;
    std::fs::write(&svg_path, render_svg(&result, id))
        .map_err(|e| CliError::io(format!("{}: {e}", svg_path.display())))?;
    writeln!(stdout, "{}", summary(id, &result)).map_err(CliError::io)?;
    Ok(strict_check(&result, strict, stderr))
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = resolve(cli)?;
    let text = match &cli.command {
        Command::Kernels { t } => cmd_kernels(&cfg, t)?,
        Command::Kappa { t } => cmd_kappa(&cfg, t)?,
        Command::Qsl => cmd_qsl(&cfg)?,
        Command::Nonmarkov => return cmd_nonmarkov(&cfg, stdout, stderr),
        Command::Sweep { metric, axes } => {
            return cmd_sweep(&cfg, metric, axes, cli.strict, stdout, stderr)
        }
        Command::Reproduce { figure, dir } => {
            return cmd_reproduce(&cfg, figure, dir, cli.strict, stdout, stderr)
        }
    };
    emit(&text, &cfg, stdout)?;
    Ok(EXIT_OK)
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code
        }
    }
}
