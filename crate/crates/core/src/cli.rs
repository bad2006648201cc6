//! The `mlrh` command-line front end: configuration, the five commands and
//! table output.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adams::adams_at;
use crate::error::Error;
use crate::model::{classical_h, riccati_rhs, FourierArg, ModelParams};
use crate::pade::{build_pade, eval_pade};
use crate::pricer::{ForwardVarianceCurve, HMethod, Pricer, VarianceModel};
use crate::selftest;
use crate::series::{eval_series, h_infinity, large_time_coeffs, small_time_coeffs};
use crate::special_fn::reciprocal_gamma;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a command needs. Deserialized from the `--config` JSON file
/// (missing fields take the defaults) and then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "H")]
    pub hurst: f64,
    pub nu: f64,
    pub rho: f64,
    pub lam: f64,
    pub a_re: f64,
    pub a_im: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    /// `None` selects the command's default method list.
    pub methods: Option<Vec<String>>,
    pub orders: Vec<usize>,
    pub adams_steps: usize,
    pub spot: f64,
    pub strikes: Vec<f64>,
    pub maturities: Vec<f64>,
    pub xi_times: Vec<f64>,
    pub xi_values: Vec<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        let m = ModelParams::realistic();
        Self {
            hurst: m.hurst(),
            nu: m.nu(),
            rho: m.rho(),
            lam: m.lam(),
            a_re: 3.0,
            a_im: -0.5,
            t_min: 0.01,
            t_max: 10.0,
            t_points: 200,
            methods: None,
            orders: vec![2, 3, 4, 5],
            adams_steps: 1000,
            spot: 1.0,
            strikes: vec![0.8, 0.85, 0.9, 0.95, 1.0, 1.05, 1.1, 1.15, 1.2],
            maturities: vec![0.1, 0.25, 0.5, 1.0],
            xi_times: vec![0.0],
            xi_values: vec![0.04],
            out: None,
            format: Format::Csv,
        }
    }
}

/// A command failure: configuration problems exit with 2, everything else
/// with 1.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.hurst, self.nu, self.rho, self.lam).map_err(config_err)
    }

    /// `nu = 0` selects the deterministic-variance pricer.
    pub fn variance_model(&self) -> Result<VarianceModel, CliError> {
        if self.nu == 0.0 {
            ModelParams::new(self.hurst, 1.0, self.rho, self.lam).map_err(config_err)?;
            Ok(VarianceModel::Deterministic)
        } else {
            self.params().map(VarianceModel::Rough)
        }
    }

    pub fn fourier_arg(&self) -> Result<FourierArg, CliError> {
        FourierArg::from_parts(self.a_re, self.a_im).map_err(config_err)
    }

    /// `t_points` log-spaced times in `[t_min, t_max]`.
    pub fn t_grid(&self) -> Result<Vec<f64>, CliError> {
        if !(self.t_min > 0.0 && self.t_max >= self.t_min && self.t_max.is_finite()) {
            return Err(config_err(format!("need 0 < t_min <= t_max, got [{}, {}]", self.t_min, self.t_max)));
        }
        match self.t_points {
            0 => Err(config_err("t_points must be positive")),
            1 => Ok(vec![self.t_max]),
            n => {
                let (lo, hi) = (self.t_min.ln(), self.t_max.ln());
                let mut ts: Vec<f64> = (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect();
                ts[0] = self.t_min;
                ts[n - 1] = self.t_max;
                Ok(ts)
            }
        }
    }

    pub fn curve(&self) -> Result<ForwardVarianceCurve, CliError> {
        ForwardVarianceCurve::new(self.xi_times.clone(), self.xi_values.clone()).map_err(config_err)
    }

    fn orders(&self) -> Result<&[usize], CliError> {
        if self.orders.is_empty() {
            return Err(config_err("orders must be nonempty"));
        }
        Ok(&self.orders)
    }

    fn adams_steps(&self) -> Result<usize, CliError> {
        if self.adams_steps < 2 {
            return Err(config_err(format!("adams_steps must be at least 2, got {}", self.adams_steps)));
        }
        Ok(self.adams_steps)
    }

    /// Methods for `hcurve`; the default is `pade<n>` for every order plus
    /// `adams:<adams_steps>`.
    pub fn curve_methods(&self) -> Result<Vec<CurveMethod>, CliError> {
        let steps = self.adams_steps()?;
        match &self.methods {
            Some(list) if list.is_empty() => Err(config_err("methods must be nonempty")),
            Some(list) => list.iter().map(|s| CurveMethod::parse(s, steps).map_err(config_err)).collect(),
            None => {
                let mut v: Vec<CurveMethod> = self.orders()?.iter().map(|&n| CurveMethod::Pade(n)).collect();
                v.push(CurveMethod::Adams(steps));
                Ok(v)
            }
        }
    }

    /// Methods for `smile` and `price`; the default is `pade5`.
    pub fn pricing_methods(&self) -> Result<Vec<HMethod>, CliError> {
        let steps = self.adams_steps()?;
        match &self.methods {
            Some(list) if list.is_empty() => Err(config_err("methods must be nonempty")),
            Some(list) => list
                .iter()
                .map(|s| if s.trim() == "adams" { Ok(HMethod::Adams(steps)) } else { HMethod::from_str(s).map_err(config_err) })
                .collect(),
            None => Ok(vec![HMethod::Pade(5)]),
        }
    }

    fn pricing_grids(&self) -> Result<(), CliError> {
        if !(self.spot > 0.0 && self.spot.is_finite()) {
            return Err(config_err(format!("spot must be positive, got {}", self.spot)));
        }
        if self.strikes.is_empty() || self.maturities.is_empty() {
            return Err(config_err("strikes and maturities must be nonempty"));
        }
        if self.strikes.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(config_err("strikes must be positive"));
        }
        if self.maturities.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(config_err("maturities must be positive"));
        }
        Ok(())
    }
}

type CurveFn = Box<dyn Fn(f64) -> Result<Complex64, Error> + Sync>;

/// Ways of producing `h(t)` in `hcurve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMethod {
    Pade(usize),
    /// One Adams solve per output time with the given step count.
    Adams(usize),
    HInf,
    SeriesSmall(usize),
    SeriesLarge(usize),
    Classical,
}

impl CurveMethod {
    /// Parses `pade<n>`, `adams[:N]`, `hinf`, `series_small:<n>`,
    /// `series_large:<n>` or `classical`; bare `adams` uses `adams_steps`.
    pub fn parse(s: &str, adams_steps: usize) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("unknown method '{s}'"));
        let num = |x: &str| x.parse::<usize>().map_err(|_| bad());
        match s {
            "hinf" => Ok(CurveMethod::HInf),
            "classical" => Ok(CurveMethod::Classical),
            "adams" => Ok(CurveMethod::Adams(adams_steps)),
            _ => {
                if let Some(n) = s.strip_prefix("pade") {
                    Ok(CurveMethod::Pade(num(n)?))
                } else if let Some(n) = s.strip_prefix("adams:") {
                    Ok(CurveMethod::Adams(num(n)?))
                } else if let Some(n) = s.strip_prefix("series_small:") {
                    Ok(CurveMethod::SeriesSmall(num(n)?))
                } else if let Some(n) = s.strip_prefix("series_large:") {
                    Ok(CurveMethod::SeriesLarge(num(n)?))
                } else {
                    Err(bad())
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            CurveMethod::Pade(n) => format!("pade{n}"),
            CurveMethod::Adams(n) => format!("adams:{n}"),
            CurveMethod::HInf => "hinf".into(),
            CurveMethod::SeriesSmall(n) => format!("series_small:{n}"),
            CurveMethod::SeriesLarge(n) => format!("series_large:{n}"),
            CurveMethod::Classical => "classical".into(),
        }
    }

    /// `h` on the time grid, or the error that prevents it.
    pub fn evaluate(&self, m: &ModelParams, a: FourierArg, ts: &[f64]) -> Vec<Result<Complex64, Error>> {
        let prepared: Result<CurveFn, Error> = match *self {
            CurveMethod::Pade(n) => build_pade(m, a, n).map(|r| {
                Box::new(move |t| eval_pade(&r, t)) as CurveFn
            }),
            CurveMethod::Adams(steps) => {
                let m = *m;
                Ok(Box::new(move |t| adams_at(&m, a, t, steps)))
            }
            CurveMethod::HInf => {
                let m = *m;
                Ok(Box::new(move |t| h_infinity(&m, a, t)))
            }
            CurveMethod::SeriesSmall(n) => {
                small_time_coeffs(m, a, n).map(|s| Box::new(move |t| Ok(eval_series(&s, t))) as Box<_>)
            }
            CurveMethod::SeriesLarge(n) => {
                large_time_coeffs(m, a, n).map(|s| Box::new(move |t| Ok(eval_series(&s, t))) as Box<_>)
            }
            CurveMethod::Classical => {
                let m = *m;
                Ok(Box::new(move |t| classical_h(&m, a, t)))
            }
        };
        match prepared {
            Ok(f) => ts.par_iter().map(|&t| f(t)).collect(),
            Err(e) => vec![Err(e); ts.len()],
        }
    }
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Written with 17 significant digits; NaN is written as an empty field.
    Float(f64),
    Int(i64),
    Text(String),
}

/// Ordered rows under fixed column names.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

fn format_float(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// RFC 4180 CSV with a header row and `\n` line endings.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(x) => format_float(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            w.write_record(&fields).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV output is UTF-8")
    }

    /// Array of row objects keyed by column name, in column order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let value = match cell {
                    Cell::Float(x) if x.is_finite() => serde_json::Value::from(*x),
                    Cell::Float(_) => serde_json::Value::Null,
                    Cell::Int(k) => serde_json::Value::from(*k),
                    Cell::Text(s) => serde_json::Value::from(s.as_str()),
                };
                let _ = write!(out, "{}: {}", serde_json::Value::from(*name), value);
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn error_text(e: &Error) -> Cell {
    Cell::Text(e.to_string())
}

/// `t, method, re_h, im_h, re_dalpha_h, im_dalpha_h, error` for every
/// method and time; `D^alpha h` is `riccati_rhs(h)`.
pub fn cmd_hcurve(cfg: &RunConfig) -> Result<Table, CliError> {
    let m = cfg.params()?;
    let a = cfg.fourier_arg()?;
    let ts = cfg.t_grid()?;
    let methods = cfg.curve_methods()?;
    let mut table = Table::new(vec!["t", "method", "re_h", "im_h", "re_dalpha_h", "im_dalpha_h", "error"]);
    for method in methods {
        let label = method.label();
        for (&t, h) in ts.iter().zip(method.evaluate(&m, a, &ts)) {
            let mut row = vec![Cell::Float(t), Cell::Text(label.clone())];
            match h {
                Ok(h) => {
                    let d = riccati_rhs(&m, a, h);
                    row.extend([h.re, h.im, d.re, d.im].map(Cell::Float));
                    row.push(Cell::Text(String::new()));
                }
                Err(e) => {
                    row.extend([f64::NAN; 4].map(Cell::Float));
                    row.push(error_text(&e));
                }
            }
            table.rows.push(row);
        }
    }
    Ok(table)
}

/// Least-squares slope of `log10(err)` against `n` over positive finite
/// errors; `None` with fewer than two usable points.
pub fn log_error_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(_, e)| e.is_finite() && *e > 0.0).map(|&(n, e)| (n as f64, e.log10())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Maximum Pade errors per order against `classical` (H = 1/2) or
/// `adams:<adams_steps>` (otherwise) on the time grid.
pub fn cmd_converge(cfg: &RunConfig) -> Result<Table, CliError> {
    let m = cfg.params()?;
    let a = cfg.fourier_arg()?;
    let ts = cfg.t_grid()?;
    let orders = cfg.orders()?.to_vec();
    let bench_method = if m.is_classical() { CurveMethod::Classical } else { CurveMethod::Adams(cfg.adams_steps()?) };
    let bench: Vec<Complex64> = bench_method
        .evaluate(&m, a, &ts)
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Runtime(format!("benchmark {} failed: {e}", bench_method.label())))?;
    let mut results = Vec::new();
    for &n in &orders {
        let errs = CurveMethod::Pade(n).evaluate(&m, a, &ts);
        let mut worst = [0.0_f64; 3];
        let mut failure = None;
        for (h, b) in errs.into_iter().zip(&bench) {
            match h {
                Ok(h) => {
                    let d = h - b;
                    worst = [worst[0].max(d.re.abs()), worst[1].max(d.im.abs()), worst[2].max(d.norm())];
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        results.push((n, worst, failure));
    }
    let usable: Vec<(usize, f64)> =
        results.iter().filter(|r| r.2.is_none()).map(|r| (r.0, r.1[2])).collect();
    let slope = log_error_slope(&usable).unwrap_or(f64::NAN);
    let mut table = Table::new(vec![
        "n",
        "max_abs_err_re",
        "max_abs_err_im",
        "max_abs_err_h",
        "slope",
        "benchmark",
        "error",
    ]);
    for (n, worst, failure) in results {
        let mut row = vec![Cell::Int(n as i64)];
        match failure {
            None => row.extend(worst.map(Cell::Float)),
            Some(_) => row.extend([f64::NAN; 3].map(Cell::Float)),
        }
        row.push(Cell::Float(slope));
        row.push(Cell::Text(bench_method.label()));
        row.push(Cell::Text(failure.map(|e| e.to_string()).unwrap_or_default()));
        table.rows.push(row);
    }
    Ok(table)
}

const PRICE_COLUMNS: [&str; 6] = ["maturity", "strike", "price", "implied_vol", "method", "error"];

fn price_rows(
    cfg: &RunConfig,
    strikes: &[f64],
    maturities: &[f64],
    notes: &mut Vec<String>,
) -> Result<Table, CliError> {
    cfg.pricing_grids()?;
    let model = cfg.variance_model()?;
    let xi = cfg.curve()?;
    let methods = cfg.pricing_methods()?;
    let steps = cfg.adams_steps()?;
    let mut table = Table::new(PRICE_COLUMNS.to_vec());
    for method in methods {
        let pricer = Pricer::new(model, xi.clone(), method).map_err(config_err)?.with_fallback_steps(steps);
        let rows = pricer.smile(cfg.spot, strikes, maturities).map_err(config_err)?;
        if pricer.fallbacks() > 0 {
            notes.push(format!("{method}: {} Fourier nodes fell back to adams:{steps}", pricer.fallbacks()));
        }
        for r in rows {
            table.rows.push(vec![
                Cell::Float(r.maturity),
                Cell::Float(r.strike),
                Cell::Float(r.price),
                Cell::Float(r.implied_vol),
                Cell::Text(r.method),
                Cell::Text(r.error),
            ]);
        }
    }
    Ok(table)
}

/// Smile over every strike and maturity, per method. Messages about Pade
/// nodes that fell back to Adams are appended to `notes`.
pub fn cmd_smile(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<Table, CliError> {
    price_rows(cfg, &cfg.strikes, &cfg.maturities, notes)
}

/// One row per method at the first strike and maturity.
pub fn cmd_price(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<Table, CliError> {
    cfg.pricing_grids()?;
    price_rows(cfg, &cfg.strikes[..1], &cfg.maturities[..1], notes)
}

/// Gnuplot script that plots a table written to `data`.
pub fn gnuplot_stub(command: &str, data: &Path) -> String {
    let file = data.display();
    let body = match command {
        "hcurve" => format!(
            "set xlabel 't'\nset ylabel 'Re D^alpha h'\nset logscale x\n\
             plot for [m in system(\"tail -n +2 '{file}' | cut -d, -f2 | sort -u\")] \\\n  \
             '< grep \",'.m.',\" {file}' using 1:5 with lines title m\n"
        ),
        "converge" => {
            format!("set xlabel 'n'\nset ylabel 'max abs error'\nset logscale y\nplot '{file}' every ::1 using 1:4 with linespoints title 'max |error|'\n")
        }
        _ => format!(
            "set xlabel 'strike'\nset ylabel 'implied vol'\n\
             plot for [T in system(\"tail -n +2 '{file}' | cut -d, -f1 | sort -u\")] \\\n  \
             '< grep \"^'.T.',\" {file}' using 2:4 with linespoints title 'T='.T\n"
        ),
    };
    format!("set datafile separator ','\n{body}")
}

#[derive(Debug, Parser)]
#[command(name = "mlrh", version, about = "Rough Heston Riccati solutions, convergence studies and option prices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Curves h(t; a) and D^alpha h(t; a) for a list of methods.
    Hcurve,
    /// Maximum Pade errors against the benchmark, per order.
    Converge,
    /// Lewis prices and implied volatilities on a strike/maturity grid.
    Smile,
    /// A single Lewis price at the first strike and maturity.
    Price,
    /// Runs the invariant suite.
    Selftest {
        /// Replace the reciprocal Gamma function by a corrupted one.
        #[arg(long, hide = true)]
        corrupt_gamma: bool,
    },
}

#[derive(Debug, Args)]
struct Overrides {
    /// Hurst exponent in [0, 1/2].
    #[arg(long = "H", global = true)]
    hurst: Option<f64>,
    /// Volatility of volatility.
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// Spot-volatility correlation.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Mean-reversion speed.
    #[arg(long, global = true)]
    lam: Option<f64>,
    /// Real part of the Fourier argument a.
    #[arg(long = "a-re", global = true)]
    a_re: Option<f64>,
    /// Imaginary part of a, in [-1, 0].
    #[arg(long = "a-im", global = true, allow_negative_numbers = true)]
    a_im: Option<f64>,
    /// Smallest t of the log-spaced grid.
    #[arg(long = "t-min", global = true)]
    t_min: Option<f64>,
    /// Largest t of the grid.
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long = "t-points", global = true)]
    t_points: Option<usize>,
    /// Comma-separated, e.g. pade3,pade5,adams:1000,hinf,series_small:8
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Pade orders for converge.
    #[arg(long, global = true, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
    /// Step count for the Adams benchmark and fallback.
    #[arg(long = "adams-steps", global = true)]
    adams_steps: Option<usize>,
    /// Spot price.
    #[arg(long, global = true)]
    spot: Option<f64>,
    /// Comma-separated strikes.
    #[arg(long, global = true, value_delimiter = ',')]
    strikes: Option<Vec<f64>>,
    /// Comma-separated maturities in years.
    #[arg(long, global = true, value_delimiter = ',')]
    maturities: Option<Vec<f64>>,
    /// Breakpoints of the piecewise-constant forward variance.
    #[arg(long = "xi-times", global = true, value_delimiter = ',')]
    xi_times: Option<Vec<f64>>,
    /// Forward variance on each piece.
    #[arg(long = "xi-values", global = true, value_delimiter = ',')]
    xi_values: Option<Vec<f64>>,
    /// Output file; stdout when absent. A gnuplot script is written next to CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (default csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON file with RunConfig fields; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Overrides {
    fn apply(self, base: RunConfig) -> RunConfig {
        let mut c = base;
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(hurst, nu, rho, lam, a_re, a_im, t_min, t_max, t_points, orders, adams_steps, spot, strikes, maturities, xi_times, xi_values, format);
        if self.methods.is_some() {
            c.methods = self.methods;
        }
        if self.out.is_some() {
            c.out = self.out;
        }
        c
    }
}

/// Resolves the configuration for `args` (program name first) without
/// running anything: defaults, then the config file, then flags.
pub fn resolve_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(config_err)?;
    let base = match &cli.opts.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    Ok(cli.opts.apply(base))
}

/// Runs the CLI on `args`, writing results to `stdout` (or the `--out`
/// file) and diagnostics to `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Command::Selftest { corrupt_gamma } = cli.command {
        return run_selftest(corrupt_gamma, stdout, stderr);
    }
    let base = match &cli.opts.config {
        Some(path) => match RunConfig::from_json_file(path) {
            Ok(c) => c,
            Err(e) => return report(stderr, &e),
        },
        None => RunConfig::default(),
    };
    let cfg = cli.opts.apply(base);
    let mut notes = Vec::new();
    let (name, result) = match cli.command {
        Command::Hcurve => ("hcurve", cmd_hcurve(&cfg)),
        Command::Converge => ("converge", cmd_converge(&cfg)),
        Command::Smile => ("smile", cmd_smile(&cfg, &mut notes)),
        Command::Price => ("price", cmd_price(&cfg, &mut notes)),
        Command::Selftest { .. } => unreachable!("handled above"),
    };
    for n in &notes {
        let _ = writeln!(stderr, "note: {n}");
    }
    let table = match result {
        Ok(t) => t,
        Err(e) => return report(stderr, &e),
    };
    let text = table.render(cfg.format);
    match &cfg.out {
        None => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return 1;
            }
        }
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                return report(stderr, &CliError::Runtime(format!("{}: {e}", path.display())));
            }
            if cfg.format == Format::Csv {
                let script = path.with_extension("gp");
                if let Err(e) = fs::write(&script, gnuplot_stub(name, path)) {
                    return report(stderr, &CliError::Runtime(format!("{}: {e}", script.display())));
                }
            }
        }
    }
    0
}

fn report(stderr: &mut dyn Write, e: &CliError) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    match e {
        CliError::Config(_) => 2,
        CliError::Runtime(_) => 1,
    }
}

fn corrupted_reciprocal_gamma(x: f64) -> f64 {
    reciprocal_gamma(x) * (1.0 + 1e-6)
}

fn run_selftest(corrupt_gamma: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let results = if corrupt_gamma {
        selftest::run_with_gamma(&corrupted_reciprocal_gamma)
    } else {
        selftest::run()
    };
    let failed = results.iter().filter(|r| !r.passed).count();
    for r in &results {
        let _ = writeln!(stdout, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        let _ = writeln!(stderr, "{}: {:.3} ms", r.name, r.elapsed.as_secs_f64() * 1e3);
    }
    let _ = writeln!(stdout, "{}/{} invariants passed", results.len() - failed, results.len());
    let _ = writeln!(stderr, "total: {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
    i32::from(failed > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::NAN), "");
        assert_eq!(format_float(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn csv_quotes_when_needed() {
        let mut t = Table::new(vec!["a", "b"]);
        t.rows.push(vec![Cell::Int(1), Cell::Text("x, \"y\"".into())]);
        assert_eq!(t.to_csv(), "a,b\n1,\"x, \"\"y\"\"\"\n");
    }

    #[test]
    fn json_keeps_column_order() {
        let mut t = Table::new(vec!["z", "a"]);
        t.rows.push(vec![Cell::Float(f64::NAN), Cell::Float(0.5)]);
        assert_eq!(t.to_json(), "[\n  {\"z\": null, \"a\": 0.5}\n]\n");
        assert_eq!(Table::new(vec!["z"]).to_json(), "[]\n");
    }

    #[test]
    fn method_parsing() {
        assert_eq!(CurveMethod::parse("pade4", 10).unwrap(), CurveMethod::Pade(4));
        assert_eq!(CurveMethod::parse("adams", 10).unwrap(), CurveMethod::Adams(10));
        assert_eq!(CurveMethod::parse("series_large:3", 10).unwrap(), CurveMethod::SeriesLarge(3));
        assert!(CurveMethod::parse("pade", 10).is_err());
        assert!(CurveMethod::parse("spline", 10).is_err());
    }

    #[test]
    fn slope_of_exact_exponential() {
        let pts: Vec<(usize, f64)> = (2..=5).map(|n| (n, 10f64.powf(-(n as f64)))).collect();
        assert!((log_error_slope(&pts).unwrap() + 1.0).abs() < 1e-12);
        assert!(log_error_slope(&pts[..1]).is_none());
    }
}
