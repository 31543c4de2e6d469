//! Command-line front end for the bellshape toolkit.
//!
//! Subcommands map one-to-one onto the library modules: validate, transform,
//! factor, pff, amcm, zeros, fp-scan, post, whale. All numeric output is
//! written with 17 significant digits in a fixed row order, so identical
//! configurations produce byte-identical files regardless of `--threads`.
//!
//! Exit codes: 0 success (mathematical "violated"/"reject-as-verdict"
//! results are still success), 2 validation reject, 3 numerical
//! non-convergence, 64 bad configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use bellshape::amcm::{self, AmCmFunction, CmVerdict};
use bellshape::exact::{self, BellShapeVerdict, ExactDensity};
use bellshape::factor;
use bellshape::pff::{self, PolyaFrequency};
use bellshape::phi::{BellParams, ParamsError};
use bellshape::post;
use bellshape::transform::{self, TransformError};
use bellshape::whale::{self, WhaleSpec};
use bellshape::zeromeasure::{self, Hat, LimitMeasure};

const EXIT_REJECT: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_CONFIG: u8 = 64;

#[derive(Parser)]
#[command(name = "bellshape", version, about = "Numerical toolkit for bell-shaped functions")]
struct Cli {
    /// Numerical tolerance, in (0, 1e-2].
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Worker threads; results are independent of this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output path (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check canonical parameters (a, b, c, phi) for admissibility.
    Validate {
        /// Path to a BellParams JSON document.
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate the canonical Fourier transform.
    Transform {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated evaluation frequencies.
        #[arg(long, value_delimiter = ',', required = true)]
        xi: Vec<f64>,
    },
    /// Split canonical parameters into Polya frequency and AM-CM factors.
    Factor {
        #[arg(long)]
        input: PathBuf,
        /// Largest integer level of phi turned into step atoms.
        #[arg(long, default_value_t = 50)]
        k_max: u32,
    },
    /// Evaluate a Polya frequency function's transform or density samples.
    Pff {
        /// Path to a PolyaFrequency JSON document.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        xi: Vec<f64>,
        /// Sample the density instead: lo,hi,points.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        sample: Option<Vec<f64>>,
    },
    /// Evaluate an AM-CM function's transform, with an optional exact
    /// complete-monotonicity spot check.
    Amcm {
        /// Path to an AmCmFunction JSON document.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        xi: Vec<f64>,
        /// Positive spot-check points; rejects (exit 2) on a CM violation.
        #[arg(long, value_delimiter = ',')]
        spotcheck: Option<Vec<f64>>,
        #[arg(long, default_value_t = 8)]
        j_max: u32,
    },
    /// Certified zero enclosures of f^(n) for a model density.
    Zeros {
        #[arg(long)]
        family: String,
        /// Optional derivative shift p for f + p f'.
        #[arg(long)]
        shift: Option<f64>,
        /// Single derivative order (default mode).
        #[arg(long)]
        n: Option<u32>,
        /// Emit the scaled-zero table for all n = 1..=n_max instead.
        #[arg(long)]
        figure3: bool,
        /// Emit the weak-convergence report against the limit measure.
        #[arg(long)]
        limit: bool,
        #[arg(long, default_value_t = 40)]
        n_max: u32,
    },
    /// Bell-shape certification of f + p f' across a list of p.
    FpScan {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        p_list: Vec<f64>,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
    },
    /// Post inversion approximants to the Fourier transform.
    Post {
        #[arg(long)]
        family: String,
        #[arg(long)]
        shift: Option<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        xi: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u32>,
    },
    /// Build a whale-shaped convolution and certify its profile.
    Whale {
        /// Path to a WhaleSpec JSON document.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
    },
}

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn config(message: impl Into<String>) -> CliError {
        CliError { message: message.into(), code: EXIT_CONFIG }
    }

    fn nonconvergence(message: impl Into<String>) -> CliError {
        CliError { message: message.into(), code: EXIT_NONCONVERGENCE }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> CliError {
        match e {
            TransformError::NonConvergence { .. } => CliError::nonconvergence(e.to_string()),
            _ => CliError::config(e.to_string()),
        }
    }
}

/// 17-significant-digit float formatting shared by every emitter.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", diagnostic(&e.to_string(), EXIT_CONFIG));
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", diagnostic(&e.message, e.code));
            ExitCode::from(e.code)
        }
    }
}

fn diagnostic(message: &str, code: u8) -> String {
    serde_json::json!({ "error": message, "exit_code": code }).to_string()
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if !(cli.tol > 0.0 && cli.tol <= 1e-2) {
        return Err(CliError::config("tol must lie in (0, 1e-2]"));
    }
    if cli.threads == Some(0) {
        return Err(CliError::config("threads must be positive"));
    }
    let (output, code) = dispatch(&cli)?;
    match &cli.out {
        Some(path) => std::fs::write(path, output)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{output}"),
    }
    Ok(code)
}

fn load_json<T: DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("cannot parse {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn parse_family(name: &str, shift: Option<f64>) -> Result<ExactDensity, CliError> {
    let base = match name {
        "cauchy" => ExactDensity::cauchy(),
        "gaussian" => ExactDensity::Gaussian,
        "levy" => ExactDensity::LevyType,
        "expinverse" => ExactDensity::ExpInverse,
        s => match s.strip_prefix("product:") {
            Some(list) => {
                let ps = list
                    .split(',')
                    .map(|p| p.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::config(format!("bad product scales: {e}")))?;
                if ps.is_empty() {
                    return Err(CliError::config("product family needs at least one scale"));
                }
                ExactDensity::rational_product(&ps)
            }
            None => {
                return Err(CliError::config(format!(
                    "unknown family {name:?}; expected cauchy, gaussian, levy, expinverse or product:p1,p2,..."
                )))
            }
        },
    };
    Ok(match shift {
        Some(p) => base.shifted(p),
        None => base,
    })
}

fn check_exact_order(n_max: u32) -> Result<(), CliError> {
    if n_max > exact::DEFAULT_ORDER_CAP {
        return Err(CliError::config(format!(
            "n_max {n_max} exceeds the exact-engine cap {}",
            exact::DEFAULT_ORDER_CAP
        )));
    }
    Ok(())
}

/// The known limit of the scaled zero measure, per family.
fn limit_for(family: &str) -> Option<LimitMeasure> {
    use std::f64::consts::PI;
    match family {
        "cauchy" => Some(LimitMeasure::cauchy(50)),
        "levy" => {
            let atoms = (1..=50)
                .map(|k| {
                    let s = 4.0 / (k as f64 * k as f64 * PI * PI);
                    (s, s * s)
                })
                .rev()
                .collect();
            Some(LimitMeasure { gaussian_mass: 0.0, atoms })
        }
        "gaussian" => Some(LimitMeasure { gaussian_mass: 1.0, atoms: vec![] }),
        _ => None,
    }
}

fn dispatch(cli: &Cli) -> Result<(String, u8), CliError> {
    match &cli.cmd {
        Cmd::Validate { input } => {
            let params: BellParams = load_json(input)?;
            match params.validate() {
                Ok(()) => Ok((verdict_doc(cli.format, "accept", None), 0)),
                Err(e @ (ParamsError::NegativeA(_) | ParamsError::LevelCrossing { .. })) => {
                    Ok((verdict_doc(cli.format, "reject", Some(&e.to_string())), EXIT_REJECT))
                }
                Err(e) => Err(CliError::config(e.to_string())),
            }
        }

        Cmd::Transform { input, xi } => {
            let params: BellParams = load_json(input)?;
            params.validate().map_err(|e| CliError::config(e.to_string()))?;
            let mut rows = Vec::new();
            for &x in xi {
                let value = transform::transform(&params, x, cli.tol)?;
                let lt = transform::log_transform(&params, x, cli.tol)?;
                rows.push(TransformRow {
                    xi: x,
                    re: value.re,
                    im: value.im,
                    re_log: lt.re_log,
                    im_log: lt.im_log,
                });
            }
            Ok((emit_rows(cli.format, &rows), 0))
        }

        Cmd::Factor { input, k_max } => {
            let params: BellParams = load_json(input)?;
            params.validate().map_err(|e| CliError::config(e.to_string()))?;
            let pair = factor::factorise(&params, *k_max, cli.tol).map_err(|e| match e {
                factor::FactorError::ResidualTooLarge { .. } => {
                    CliError::nonconvergence(e.to_string())
                }
                _ => CliError::config(e.to_string()),
            })?;
            let doc = match cli.format {
                Format::Json => to_json(&pair),
                Format::Csv => {
                    let mut s = String::from("name,value\n");
                    let _ = writeln!(s, "pff_a,{}", fmt(pair.pff.a));
                    let _ = writeln!(s, "pff_b,{}", fmt(pair.pff.b));
                    for (i, a) in pair.pff.atoms.iter().enumerate() {
                        let _ = writeln!(s, "pff_atom_{i},{}", fmt(*a));
                    }
                    let _ = writeln!(s, "amcm_b,{}", fmt(pair.amcm_params.b));
                    let _ = writeln!(s, "amcm_c,{}", fmt(pair.amcm_params.c));
                    let _ = writeln!(s, "b_correction,{}", fmt(pair.b_correction));
                    let _ = writeln!(s, "residual,{}", fmt(pair.residual));
                    s
                }
            };
            Ok((doc, 0))
        }

        Cmd::Pff { input, xi, sample } => {
            let h: PolyaFrequency = load_json(input)?;
            if let Some(window) = sample {
                let (lo, hi, n) = (window[0], window[1], window[2] as usize);
                let (xs, vs) = pff::pff_sample(&h, lo, hi, n, cli.tol)
                    .map_err(|e| CliError::nonconvergence(e.to_string()))?;
                let rows: Vec<SampleRow> = xs
                    .iter()
                    .zip(&vs)
                    .map(|(&x, &density)| SampleRow { x, density })
                    .collect();
                return Ok((emit_rows(cli.format, &rows), 0));
            }
            let rows: Vec<ComplexRow> = xi
                .iter()
                .map(|&x| {
                    let v = pff::pff_transform(&h, x);
                    ComplexRow { xi: x, re: v.re, im: v.im }
                })
                .collect();
            Ok((emit_rows(cli.format, &rows), 0))
        }

        Cmd::Amcm { input, xi, spotcheck, j_max } => {
            let g: AmCmFunction = load_json(input)?;
            if let Some(points) = spotcheck {
                let verdict = amcm::cm_spotcheck(&g, points, *j_max)
                    .map_err(|e| CliError::config(e.to_string()))?;
                return Ok(match verdict {
                    CmVerdict::Pass => (verdict_doc(cli.format, "accept", None), 0),
                    CmVerdict::Fail { x, order } => (
                        verdict_doc(
                            cli.format,
                            "reject",
                            Some(&format!("monotonicity fails at x = {x}, order {order}")),
                        ),
                        EXIT_REJECT,
                    ),
                });
            }
            let mut rows = Vec::new();
            for &x in xi {
                let v = amcm::amcm_transform(&g, x, cli.tol)
                    .map_err(|e| CliError::config(e.to_string()))?;
                rows.push(ComplexRow { xi: x, re: v.re, im: v.im });
            }
            Ok((emit_rows(cli.format, &rows), 0))
        }

        Cmd::Zeros { family, shift, n, figure3, limit, n_max } => {
            check_exact_order(*n_max)?;
            let f = parse_family(family, *shift)?;
            if *limit {
                let target = limit_for(family).ok_or_else(|| {
                    CliError::config(format!("no limit measure known for family {family:?}"))
                })?;
                let orders = [10u32, 20, 40.min(*n_max)];
                let measures = orders
                    .iter()
                    .map(|&k| zeromeasure::zero_measure(&f, k))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::config(e.to_string()))?;
                let hats: Vec<Hat> = target
                    .atoms
                    .iter()
                    .filter(|(s, _)| *s > 0.0)
                    .take(3)
                    .map(|&(s, _)| Hat::around(s, 0.4 * s))
                    .collect();
                let report = zeromeasure::compare_to_limit(&measures, &target, &hats);
                return Ok((to_json(&report), 0));
            }
            if *figure3 {
                let rows = zeromeasure::figure3_data(&f, *n_max)
                    .map_err(|e| CliError::config(e.to_string()))?;
                let rows: Vec<Figure3Row> = rows
                    .iter()
                    .flat_map(|&(order, alpha)| Some(Figure3Row { n: order, alpha }))
                    .collect();
                return Ok((emit_rows(cli.format, &rows), 0));
            }
            let order = n.ok_or_else(|| {
                CliError::config("zeros needs --n, --figure3 or --limit")
            })?;
            check_exact_order(order)?;
            let table =
                exact::sign_changes(&f, order).map_err(|e| CliError::config(e.to_string()))?;
            let rows: Vec<ZeroRow> = table
                .zeros
                .iter()
                .enumerate()
                .map(|(k, enc)| ZeroRow {
                    n: order,
                    k: k + 1,
                    zero_lo: enc.lo.to_f64(),
                    zero_hi: enc.hi.to_f64(),
                })
                .collect();
            Ok((emit_rows(cli.format, &rows), 0))
        }

        Cmd::FpScan { family, p_list, n_max } => {
            check_exact_order(*n_max)?;
            let f = parse_family(family, None)?;
            let verdicts = exact::fp_scan(&f, p_list, *n_max)
                .map_err(|e| CliError::config(e.to_string()))?;
            let rows: Vec<FpScanRow> = verdicts
                .iter()
                .map(|(p, v)| match v {
                    BellShapeVerdict::Consistent { .. } => FpScanRow {
                        p: *p,
                        verdict: "consistent".into(),
                        violating_n: None,
                        count: None,
                    },
                    BellShapeVerdict::Violated { n, count } => FpScanRow {
                        p: *p,
                        verdict: "violated".into(),
                        violating_n: Some(*n),
                        count: Some(*count),
                    },
                })
                .collect();
            Ok((emit_rows(cli.format, &rows), 0))
        }

        Cmd::Post { family, shift, xi, n_list } => {
            let f = parse_family(family, *shift)?;
            let mut rows = Vec::new();
            for &n in n_list {
                for &x in xi {
                    let v = post::post_approximant(&f, x, n, cli.tol).map_err(|e| match e {
                        post::PostError::Exact(_) => CliError::nonconvergence(e.to_string()),
                        _ => CliError::config(e.to_string()),
                    })?;
                    let target = closed_form_transform(family, x);
                    rows.push(PostRow {
                        n,
                        xi: x,
                        re: v.re,
                        im: v.im,
                        target_re: target.map(|t| t.0),
                        target_im: target.map(|t| t.1),
                        rel_err: target.map(|(tr, ti)| {
                            ((v.re - tr).hypot(v.im - ti)) / tr.hypot(ti)
                        }),
                    });
                }
            }
            Ok((emit_rows(cli.format, &rows), 0))
        }

        Cmd::Whale { input, n_max } => {
            let spec: WhaleSpec = load_json(input)?;
            let m = spec.rates.len() as u32;
            let f = whale::whale_build(&spec).map_err(|e| CliError::config(e.to_string()))?;
            let cert = whale::whale_certify(&f, m, *n_max)
                .map_err(|e| CliError::config(e.to_string()))?;
            let doc = match cli.format {
                Format::Json => to_json(&cert),
                Format::Csv => {
                    let mut s = String::from("n,count,k,x\n");
                    for (n, (count, zeros)) in
                        cert.counts.iter().zip(&cert.zeros).enumerate()
                    {
                        if zeros.is_empty() {
                            let _ = writeln!(s, "{n},{count},,");
                        }
                        for (k, x) in zeros.iter().enumerate() {
                            let _ = writeln!(s, "{n},{count},{},{}", k + 1, fmt(*x));
                        }
                    }
                    s
                }
            };
            Ok((doc, 0))
        }
    }
}

/// Known closed-form transforms used as targets in the post table.
fn closed_form_transform(family: &str, xi: f64) -> Option<(f64, f64)> {
    use std::f64::consts::PI;
    match family {
        "cauchy" => Some((PI * (-xi.abs()).exp(), 0.0)),
        "gaussian" => Some((PI.sqrt() * (-xi * xi / 4.0).exp(), 0.0)),
        _ => None,
    }
}

fn verdict_doc(format: Format, verdict: &str, reason: Option<&str>) -> String {
    match format {
        Format::Json => {
            let doc = serde_json::json!({ "verdict": verdict, "reason": reason });
            format!("{doc}\n")
        }
        Format::Csv => match reason {
            Some(r) => format!("verdict,reason\n{verdict},{r}\n"),
            None => format!("verdict,reason\n{verdict},\n"),
        },
    }
}

/// A row type knows its CSV header and rendering; JSON output serialises the
/// row list directly.
trait Row: Serialize {
    const HEADER: &'static str;
    fn csv(&self) -> String;
}

fn emit_rows<R: Row>(format: Format, rows: &[R]) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from(R::HEADER);
            s.push('\n');
            for r in rows {
                s.push_str(&r.csv());
                s.push('\n');
            }
            s
        }
    }
}

fn opt(v: Option<String>) -> String {
    v.unwrap_or_default()
}

#[derive(Serialize)]
struct TransformRow {
    xi: f64,
    re: f64,
    im: f64,
    re_log: f64,
    im_log: f64,
}

impl Row for TransformRow {
    const HEADER: &'static str = "xi,re,im,re_log,im_log";
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt(self.xi),
            fmt(self.re),
            fmt(self.im),
            fmt(self.re_log),
            fmt(self.im_log)
        )
    }
}

#[derive(Serialize)]
struct ComplexRow {
    xi: f64,
    re: f64,
    im: f64,
}

impl Row for ComplexRow {
    const HEADER: &'static str = "xi,re,im";
    fn csv(&self) -> String {
        format!("{},{},{}", fmt(self.xi), fmt(self.re), fmt(self.im))
    }
}

#[derive(Serialize)]
struct SampleRow {
    x: f64,
    density: f64,
}

impl Row for SampleRow {
    const HEADER: &'static str = "x,density";
    fn csv(&self) -> String {
        format!("{},{}", fmt(self.x), fmt(self.density))
    }
}

#[derive(Serialize)]
struct ZeroRow {
    n: u32,
    k: usize,
    zero_lo: f64,
    zero_hi: f64,
}

impl Row for ZeroRow {
    const HEADER: &'static str = "n,k,zero_lo,zero_hi";
    fn csv(&self) -> String {
        format!("{},{},{},{}", self.n, self.k, fmt(self.zero_lo), fmt(self.zero_hi))
    }
}

#[derive(Serialize)]
struct Figure3Row {
    n: u32,
    alpha: f64,
}

impl Row for Figure3Row {
    const HEADER: &'static str = "n,alpha";
    fn csv(&self) -> String {
        format!("{},{}", self.n, fmt(self.alpha))
    }
}

#[derive(Serialize)]
struct FpScanRow {
    p: f64,
    verdict: String,
    violating_n: Option<u32>,
    count: Option<usize>,
}

impl Row for FpScanRow {
    const HEADER: &'static str = "p,verdict,violating_n,count";
    fn csv(&self) -> String {
        format!(
            "{},{},{},{}",
            fmt(self.p),
            self.verdict,
            opt(self.violating_n.map(|n| n.to_string())),
            opt(self.count.map(|c| c.to_string()))
        )
    }
}

#[derive(Serialize)]
struct PostRow {
    n: u32,
    xi: f64,
    re: f64,
    im: f64,
    target_re: Option<f64>,
    target_im: Option<f64>,
    rel_err: Option<f64>,
}

impl Row for PostRow {
    const HEADER: &'static str = "n,xi,re,im,target_re,target_im,rel_err";
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            fmt(self.xi),
            fmt(self.re),
            fmt(self.im),
            opt(self.target_re.map(fmt)),
            opt(self.target_im.map(fmt)),
            opt(self.rel_err.map(fmt))
        )
    }
}
