//! `iqcalc`: integrated distribution and quantile calculus from the shell.
//!
//! Every verb prints one JSON document (or a CSV vertex dump with `--csv`).
//! Exit codes: 0 success, 2 invalid input, 1 computation failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iqcalc::experiments::{canonical_experiment, deficiency, more_informative};
use iqcalc::limits::{dominating_variable, family_diagnostics};
use iqcalc::orders::{cantelli_extremal, cx, decx, icx, positive_tail_extremal};
use iqcalc::pwl::default_tol;
use iqcalc::skorokhod::{monte_carlo_verify, plan_embedding};
use iqcalc::{io, AtomicDistribution, BinaryExperiment, ConvexPwl, Error, Result};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "iqcalc",
    version,
    about = "Exact IDF/IQF calculus for finitely supported laws"
)]
struct Cli {
    /// Comparison tolerance (defaults to $IQCALC_TOL or 1e-9).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Transforms of a single law.
    #[command(subcommand)]
    Dist(DistCmd),
    /// Stochastic order tests between two laws.
    Order { kind: OrderKind, a: PathBuf, b: PathBuf },
    /// Sharp tail bounds with their extremal laws.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Tightness and uniform integrability of a family (a directory of laws).
    #[command(subcommand)]
    Limits(LimitsCmd),
    /// Binary experiments.
    #[command(subcommand)]
    Exp(ExpCmd),
    /// Chacon-Walsh embeddings.
    #[command(subcommand)]
    Embed(EmbedCmd),
}

#[derive(Subcommand)]
enum DistCmd {
    /// Vertices of a transform, or its values on a grid. A `.csv` law file
    /// is read as samples (value and optional weight per row).
    Transform {
        law: PathBuf,
        which: Transform,
        /// `lo:hi:n` (n evenly spaced points) or a comma-separated list.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Transform {
    Idf,
    Iqf,
    Iqf0,
    Iqf1,
    Lorenz,
    Cvar,
    Hl,
    Psi,
    Stoploss,
    Potential,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderKind {
    Icx,
    Decx,
    Cx,
}

#[derive(Subcommand)]
enum BoundCmd {
    /// P(X >= t) for mean-zero X with standard deviation sigma.
    Cantelli {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        t: f64,
    },
    /// P(X > a) from below for positive X with E[X] = 1, E[X^2] = b.
    Positive {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
}

#[derive(Subcommand)]
enum LimitsCmd {
    Diag {
        dir: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        u: f64,
        #[arg(long, default_value_t = 0.75)]
        v: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    Dominate {
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExpCmd {
    /// Risk function (type II error against type I error).
    Risk(ExpOne),
    /// Minimum Bayes risk curve.
    Bayes(ExpOne),
    Compare {
        a: PathBuf,
        b: PathBuf,
    },
    /// A finite sample space realizing the experiment.
    Canon {
        exp: PathBuf,
    },
}

#[derive(Args)]
struct ExpOne {
    exp: PathBuf,
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand)]
enum EmbedCmd {
    Plan {
        mu0: PathBuf,
        mu: PathBuf,
    },
    /// Simulates the exit chain and compares with the target.
    Verify {
        mu0: PathBuf,
        mu: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        workers: usize,
    },
}

#[derive(Serialize)]
struct BoundOut {
    bound: f64,
    law: AtomicDistribution,
}

#[derive(Serialize)]
struct Comparison {
    #[serde(rename = "more_informative_AB")]
    more_informative_ab: bool,
    #[serde(rename = "more_informative_BA")]
    more_informative_ba: bool,
    #[serde(rename = "delta2_AB")]
    delta2_ab: f64,
    #[serde(rename = "delta2_BA")]
    delta2_ba: f64,
    #[serde(rename = "Delta2")]
    big_delta2: f64,
}

/// A pointwise functional sampled on a grid of `x` or `u` values.
#[derive(Serialize)]
struct Sampled {
    variable: &'static str,
    grid: Vec<f64>,
    value: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iqcalc: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let tol = match cli.tol {
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(t) => return Err(Error::Argument(format!("--tol must be positive, got {t}"))),
        None => default_tol(),
    };
    let out = match &cli.verb {
        Verb::Dist(DistCmd::Transform {
            law,
            which,
            grid,
            csv,
        }) => transform(&read_law(law)?, *which, grid.as_deref(), *csv)?,
        Verb::Order { kind, a, b } => {
            let (a, b) = (read_law(a)?, read_law(b)?);
            let v = match kind {
                OrderKind::Icx => icx(&a, &b, tol),
                OrderKind::Decx => decx(&a, &b, tol),
                OrderKind::Cx => cx(&a, &b, tol),
            };
            to_json(&v)?
        }
        Verb::Bound(cmd) => {
            let (bound, law) = match *cmd {
                BoundCmd::Cantelli { sigma, t } => cantelli_extremal(sigma, t)?,
                BoundCmd::Positive { a, b } => positive_tail_extremal(a, b)?,
            };
            to_json(&BoundOut { bound, law })?
        }
        Verb::Limits(LimitsCmd::Diag { dir, u, v, delta }) => {
            to_json(&family_diagnostics(&read_family(dir)?, *u, *v, *delta)?)?
        }
        Verb::Limits(LimitsCmd::Dominate { dir }) => to_json(&dominating_variable(&read_family(dir)?)?)?,
        Verb::Exp(ExpCmd::Risk(e)) => {
            let r = read_experiment(&e.exp)?.risk_function();
            pwl_output(&r, e.csv, ["u", "risk"])?
        }
        Verb::Exp(ExpCmd::Bayes(e)) => {
            let b = read_experiment(&e.exp)?.bayes_risk_curve();
            if e.csv {
                csv_output(["pi", "bayes_risk"], b.vertices())?
            } else {
                to_json(&b)?
            }
        }
        Verb::Exp(ExpCmd::Compare { a, b }) => {
            let (a, b) = (read_experiment(a)?, read_experiment(b)?);
            let (ab, ba) = (deficiency(&a, &b), deficiency(&b, &a));
            to_json(&Comparison {
                more_informative_ab: more_informative(&a, &b, tol),
                more_informative_ba: more_informative(&b, &a, tol),
                delta2_ab: ab.delta2,
                delta2_ba: ba.delta2,
                big_delta2: ab.big_delta2,
            })?
        }
        Verb::Exp(ExpCmd::Canon { exp }) => to_json(&canonical_experiment(read_experiment(exp)?.mu())?)?,
        Verb::Embed(EmbedCmd::Plan { mu0, mu }) => {
            to_json(&plan_embedding(&read_law(mu0)?, &read_law(mu)?, tol)?)?
        }
        Verb::Embed(EmbedCmd::Verify {
            mu0,
            mu,
            n,
            seed,
            workers,
        }) => to_json(&monte_carlo_verify(
            &read_law(mu0)?,
            &read_law(mu)?,
            *n,
            *seed,
            *workers,
            tol,
        )?)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, out)?,
        None => std::io::stdout().lock().write_all(out.as_bytes())?,
    }
    Ok(())
}

/// Tags I/O and parse failures with the offending path.
fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => Error::Argument(format!("{}: {e}", path.display())),
        e => e,
    })
}

fn read_law(path: &Path) -> Result<AtomicDistribution> {
    if path.extension().is_some_and(|e| e == "csv") {
        let file = with_path(path, fs::File::open(path).map_err(Error::from))?;
        with_path(path, io::read_samples_csv(file))
    } else {
        with_path(path, io::read_json(path))
    }
}

fn read_family(dir: &Path) -> Result<Vec<AtomicDistribution>> {
    Ok(with_path(dir, io::read_family_dir(dir))?
        .into_iter()
        .map(|(_, d)| d)
        .collect())
}

/// An experiment file, or a bare law taken as the likelihood-ratio law.
fn read_experiment(path: &Path) -> Result<BinaryExperiment> {
    let v: serde_json::Value = with_path(path, io::read_json(path))?;
    let parsed = if v.get("atoms").is_some() {
        serde_json::from_value::<AtomicDistribution>(v)
            .map_err(Error::from)
            .and_then(BinaryExperiment::new)
    } else {
        serde_json::from_value(v).map_err(Error::from)
    };
    with_path(path, parsed)
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn csv_output(columns: [&str; 2], points: impl IntoIterator<Item = (f64, f64)>) -> Result<String> {
    let mut buf = Vec::new();
    io::write_vertices_csv(&mut buf, columns, points)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn pwl_output(f: &ConvexPwl, csv: bool, columns: [&str; 2]) -> Result<String> {
    if csv {
        csv_output(columns, f.vertices())
    } else {
        to_json(f)
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Argument(format!("invalid grid {spec:?}: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let grid = if let [lo, hi, n] = spec.split(':').collect::<Vec<_>>()[..] {
        let (lo, hi) = (num(lo)?, num(hi)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| bad("point count must be an integer"))?;
        if n < 2 || !(lo < hi) {
            return Err(bad("need lo < hi and at least 2 points"));
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(bad("values must be finite"));
    }
    Ok(grid)
}

fn transform(d: &AtomicDistribution, which: Transform, grid: Option<&str>, csv: bool) -> Result<String> {
    let curve = match which {
        Transform::Idf => Some((d.idf(), "x")),
        Transform::Iqf => Some((d.iqf(), "u")),
        Transform::Iqf0 => Some((d.iqf_shift0(), "u")),
        Transform::Iqf1 => Some((d.iqf_shift1(), "u")),
        _ => None,
    };
    let grid = grid.map(parse_grid).transpose()?;
    if let (Some((f, col)), None) = (&curve, &grid) {
        return pwl_output(f, csv, [col, "value"]);
    }

    // pointwise values; without a grid, at the knots where the functional
    // changes form
    let cum = d.cumulative();
    let levels = || std::iter::once(0.0).chain(cum.iter().copied());
    let (col, xs): (&'static str, Vec<f64>) = match (which, grid) {
        (Transform::Idf | Transform::Psi | Transform::Stoploss | Transform::Potential, g) => {
            ("x", g.unwrap_or_else(|| d.locations().to_vec()))
        }
        (_, Some(g)) => ("u", g),
        (Transform::Cvar, None) => ("u", cum.to_vec()),
        (Transform::Hl, None) => ("u", levels().take(cum.len()).collect()),
        (_, None) => ("u", levels().collect()),
    };
    let eval = |x: f64| -> Result<f64> {
        match which {
            Transform::Lorenz => d.lorenz(x),
            Transform::Cvar => d.cvar(x),
            Transform::Hl => d.hardy_littlewood(x),
            Transform::Psi => Ok(d.psi(x)),
            Transform::Stoploss => Ok(d.stop_loss(x)),
            Transform::Potential => Ok(d.potential(x)),
            _ => {
                let (f, _) = curve.as_ref().expect("PWL transform");
                if col == "u" && !(0.0..=1.0).contains(&x) {
                    return Err(Error::Argument(format!("level {x} is outside [0, 1]")));
                }
                Ok(f.evaluate(x))
            }
        }
    };
    let points = xs
        .iter()
        .map(|&x| Ok((x, eval(x)?)))
        .collect::<Result<Vec<_>>>()?;
    if csv {
        csv_output([col, "value"], points)
    } else {
        let value = points.iter().map(|p| p.1).collect();
        to_json(&Sampled {
            variable: col,
            grid: xs,
            value,
        })
    }
}
