//! `amo`: command-line front end for the almost Mathieu laboratory.

use std::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use amo_core::arithmetic::Frequency;
use amo_core::cocycle::{gordon_growth, AmoParams, ScaledProductf64};
use amo_core::localization::analyze_eigenpairs;
use amo_core::lyapunov::le_estimate;
use amo_core::phaselab::{run_sweep, SweepConfig};
use amo_core::reducibility::{solve_cohomological, suggested_order, FourierSeries};
use amo_core::spectrum::{bands_rational, truncate};

#[derive(Parser)]
#[command(name = "amo", about = "Almost Mathieu operator laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued-fraction expansion and beta diagnostics of a frequency
    Cf(CfArgs),
    /// Transfer-matrix products, periodic approximants, Gordon blocks
    Cocycle(CocycleArgs),
    /// Lyapunov exponents, optionally along a list of strip heights
    Le(LeArgs),
    /// Truncation eigenvalues or rational band spectra
    Spectrum(SpectrumArgs),
    /// Eigenfunction decay diagnostics over random phases
    Localize(LocalizeArgs),
    /// Solve the cohomological equation on a strip
    Cohom(CohomArgs),
    /// Phase-diagram sweep over a (lambda, beta) grid
    Sweep(SweepArgs),
}

/// How the frequency is specified: a named/decimal alpha or a synthesis
/// target beta (mutually exclusive).
#[derive(Args, Clone)]
struct FreqArgs {
    /// `golden`, `sqrt2m1`, or a decimal in (0, 1)
    #[arg(long, conflicts_with = "beta")]
    alpha: Option<String>,
    /// synthesize a frequency tracking this Liouville exponent
    #[arg(long)]
    beta: Option<f64>,
    /// continued-fraction depth (levels); for --beta the default grows
    /// the expansion until q >= 10^4
    #[arg(long)]
    depth: Option<usize>,
}

impl FreqArgs {
    fn resolve(&self) -> Result<Frequency, Box<dyn Error>> {
        if let Some(beta) = self.beta {
            return Ok(match self.depth {
                Some(d) => Frequency::synthesize(beta, d, 2)?,
                None => Frequency::synthesize_until(beta, 2, 10_000)?,
            });
        }
        let depth = self.depth.unwrap_or(20);
        match self.alpha.as_deref() {
            None | Some("golden") => Ok(Frequency::golden(depth)),
            Some("sqrt2m1") => Ok(Frequency::sqrt2_minus_1(depth)),
            Some(text) => {
                let (value, digits) = parse_decimal(text)?;
                let bits = (digits as u64) * 4 + 32;
                Ok(Frequency::expand(&value, bits, depth)?)
            }
        }
    }
}

fn parse_decimal(text: &str) -> Result<(BigRational, usize), Box<dyn Error>> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.parse::<u8>().is_err() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("cannot parse alpha {text:?}").into());
    }
    let digits: String = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits)?;
    let denom = num_traits::pow::pow(BigInt::from(10), frac_part.len());
    Ok((BigRational::new(numer, denom), frac_part.len().max(1)))
}

#[derive(Args)]
struct CfArgs {
    #[command(flatten)]
    freq: FreqArgs,
    #[arg(long)]
    json: bool,
}

fn cmd_cf(args: &CfArgs) -> Result<ExitCode, Box<dyn Error>> {
    let freq = args.freq.resolve()?;
    let beta = freq.beta_estimate(freq.depth().saturating_sub(1).max(1))?;
    for k in 1..=freq.depth() {
        let a = &freq.partial_quotients()[k - 1];
        let (p, q) = freq.convergent(k);
        let beta_level = beta.per_level.get(k - 1).copied();
        if args.json {
            println!(
                "{}",
                json!({
                    "level": k,
                    "a": a.to_string(),
                    "p": p.to_string(),
                    "q": q.to_string(),
                    "beta_level": beta_level,
                })
            );
        } else {
            let b = beta_level.map_or(String::new(), |v| format!("  beta_level={v:.6}"));
            println!("level {k}: a={a} p/q={p}/{q}{b}");
        }
    }
    if !args.json {
        println!(
            "beta (deepest-level proxy): {:.6}",
            freq.beta_estimate(1)?.limsup_proxy
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
struct CocycleArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    energy: f64,
    #[command(flatten)]
    freq: FreqArgs,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// number of cocycle steps (negative for backward products)
    #[arg(long, default_value_t = 100)]
    n: i64,
    /// use the periodic approximant at this convergent level
    #[arg(long)]
    periodic_level: Option<usize>,
    /// report Gordon block growth at --periodic-level
    #[arg(long)]
    gordon: bool,
    #[arg(long)]
    json: bool,
}

fn cmd_cocycle(args: &CocycleArgs) -> Result<ExitCode, Box<dyn Error>> {
    let freq = args.freq.resolve()?;
    let params = AmoParams::new(args.lambda, args.energy, freq, args.theta);
    let prod: ScaledProductf64 = params.product(args.n, args.periodic_level)?;
    let mut out = json!({
        "n": args.n,
        "log_norm": prod.log_norm(),
        "log_trace_abs": prod.log_trace_abs(),
        "unimodular_defect": prod.unimodular_defect(),
    });
    if args.gordon {
        let level = args
            .periodic_level
            .ok_or("--gordon requires --periodic-level")?;
        let g = gordon_growth(&params, level, [1.0, 0.0])?;
        out["gordon"] = json!({
            "q_n": g.q_n,
            "log_norm_qn": g.log_norm_qn,
            "log_norm_neg_qn": g.log_norm_neg_qn,
            "log_norm_2qn": g.log_norm_2qn,
            "log_trace_abs": g.log_trace_abs,
            "log_max_block": g.log_max_block(),
        });
    }
    if args.json {
        println!("{out}");
    } else {
        println!("ln ||A_n||        = {:.6}", out["log_norm"].as_f64().unwrap());
        println!(
            "ln |tr A_n|       = {:.6}",
            out["log_trace_abs"].as_f64().unwrap()
        );
        println!(
            "unimodular defect = {:.3e}",
            out["unimodular_defect"].as_f64().unwrap()
        );
        if let Some(g) = out.get("gordon") {
            println!(
                "gordon q_n={} ln||A_q v||={:.4} ln||A_-q v||={:.4} ln||A_2q v||={:.4} max={:.4}",
                g["q_n"],
                g["log_norm_qn"].as_f64().unwrap(),
                g["log_norm_neg_qn"].as_f64().unwrap(),
                g["log_norm_2qn"].as_f64().unwrap(),
                g["log_max_block"].as_f64().unwrap(),
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
struct LeArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long, conflicts_with = "energy_from_truncation")]
    energy: Option<f64>,
    /// draw quartile eigenvalues from a truncation of this size
    #[arg(long)]
    energy_from_truncation: Option<usize>,
    #[command(flatten)]
    freq: FreqArgs,
    #[arg(long, default_value_t = 10_000)]
    steps: u64,
    #[arg(long, default_value_t = 8)]
    phases: usize,
    /// comma-separated strip heights in nats
    #[arg(long, default_value = "0")]
    eps_list: String,
    #[arg(long)]
    csv: bool,
}

fn cmd_le(args: &LeArgs) -> Result<ExitCode, Box<dyn Error>> {
    let freq = args.freq.resolve()?;
    let eps_list = parse_grid(&args.eps_list)?;
    let energies: Vec<f64> = match (args.energy, args.energy_from_truncation) {
        (Some(e), _) => vec![e],
        (None, from) => {
            let n = from.unwrap_or(241);
            let t = truncate::<f64>(args.lambda, &freq, 0.381_966, n, (n / 2) as i64);
            [n / 4, n / 2, 3 * n / 4]
                .iter()
                .map(|&k| t.matrix.eigenvalue(k))
                .collect()
        }
    };
    if args.csv {
        println!("eps,energy,le,std_error");
    }
    for &eps in &eps_list {
        for &energy in &energies {
            let params = AmoParams::new(args.lambda, energy, freq.clone(), 0.0)
                .with_eps_im(eps / std::f64::consts::TAU);
            let est = le_estimate(&params, args.steps, args.phases);
            if args.csv {
                println!("{eps:.6},{energy:.6},{:.6},{:.6}", est.value, est.std_error);
            } else {
                println!(
                    "eps={eps:.3} E={energy:+.6}: L = {:.6} +- {:.6}",
                    est.value, est.std_error
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    freq: FreqArgs,
    /// rational frequency `p/q`: use exact band spectra instead of a
    /// truncation
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    pq: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// truncation size for the irrational path
    #[arg(long, default_value_t = 301)]
    n: usize,
    /// print band intervals
    #[arg(long)]
    bands: bool,
    /// print the total bandwidth (Lebesgue measure)
    #[arg(long)]
    measure: bool,
    #[arg(long)]
    csv: bool,
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<ExitCode, Box<dyn Error>> {
    if let Some(pq) = &args.pq {
        let (p, q) = pq
            .split_once('/')
            .ok_or("--pq expects the form p/q")
            .and_then(|(p, q)| {
                Ok((
                    p.parse::<u64>().map_err(|_| "bad p")?,
                    q.parse::<u64>().map_err(|_| "bad q")?,
                ))
            })?;
        let bands = bands_rational(args.lambda, p, q, 16, 1e-6)?;
        if args.bands || !args.measure {
            if args.csv {
                println!("E_lo,E_hi");
            }
            for (lo, hi) in bands.intervals() {
                if args.csv {
                    println!("{lo:.8},{hi:.8}");
                } else {
                    println!("band [{lo:+.8}, {hi:+.8}]");
                }
            }
        }
        if args.measure {
            println!("measure: {:.8}", bands.measure());
        }
        return Ok(ExitCode::SUCCESS);
    }
    let freq = args.freq.resolve()?;
    let t = truncate::<f64>(args.lambda, &freq, args.theta, args.n, (args.n / 2) as i64);
    let values = t.eigh(false)?.values;
    if args.csv {
        println!("E");
        for v in values {
            println!("{v:.8}");
        }
    } else {
        println!(
            "{} truncation eigenvalues in [{:+.6}, {:+.6}]",
            values.len(),
            values.first().unwrap(),
            values.last().unwrap()
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
struct LocalizeArgs {
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    freq: FreqArgs,
    /// truncation half-width: 2n+1 sites
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// decay budget: `auto` = max(ln lambda - beta - 0.1, 0.3)
    #[arg(long, default_value = "auto")]
    c: String,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, default_value_t = 4)]
    phases: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    csv: bool,
}

fn cmd_localize(args: &LocalizeArgs) -> Result<ExitCode, Box<dyn Error>> {
    let freq = args.freq.resolve()?;
    let beta = freq.beta_estimate(1)?.limsup_proxy;
    let c = match args.c.as_str() {
        "auto" => (args.lambda.ln() - beta - 0.1).max(0.3),
        text => text.parse::<f64>().map_err(|_| "bad --c value")?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    if args.csv {
        println!("phi,E,decay_rate,good");
    }
    for _ in 0..args.phases {
        let phi: f64 = rng.gen();
        let reports = analyze_eigenpairs(args.lambda, &freq, phi, args.n)?;
        let mut good_count = 0usize;
        for r in &reports {
            let good = r.good(args.n, c, args.eps);
            good_count += good as usize;
            if args.csv {
                println!("{phi:.6},{:.8},{:.6},{good}", r.energy, r.decay_rate);
            }
        }
        if !args.csv {
            println!(
                "phi={phi:.6}: {good_count}/{} ({c:.3}, {:.2})-good pairs",
                reports.len(),
                args.eps
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
struct CohomArgs {
    #[command(flatten)]
    freq: FreqArgs,
    #[arg(long)]
    h_in: f64,
    #[arg(long)]
    h_out: f64,
    /// Fourier cutoff; defaults to a value adapted to the frequency
    #[arg(long)]
    k: Option<usize>,
    /// right-hand side: `cos` or `expdecay:<rate>`
    #[arg(long, default_value = "cos")]
    eta: String,
    #[arg(long)]
    json: bool,
}

fn cmd_cohom(args: &CohomArgs) -> Result<ExitCode, Box<dyn Error>> {
    let freq = args.freq.resolve()?;
    let k_max = args.k.unwrap_or_else(|| suggested_order(&freq));
    let eta = match args.eta.as_str() {
        "cos" => FourierSeries::cosine(),
        text => {
            let rate = text
                .strip_prefix("expdecay:")
                .and_then(|r| r.parse::<f64>().ok())
                .ok_or("--eta expects `cos` or `expdecay:<rate>`")?;
            FourierSeries::from_fn(k_max, |k| {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((-rate * k.abs() as f64).exp(), 0.0)
                }
            })
        }
    };
    let sol = solve_cohomological(&eta, &freq, args.h_in, args.h_out)?;
    if args.json {
        println!(
            "{}",
            json!({
                "k_max": eta.k_max(),
                "h_in": args.h_in,
                "h_out": args.h_out,
                "residual": sol.residual,
                "norm_ratio": sol.norm_ratio,
                "psi_strip_norm": sol.psi.strip_norm(args.h_out),
            })
        );
    } else {
        println!("k_max      = {}", eta.k_max());
        println!("residual   = {:.3e}", sol.residual);
        println!("norm ratio = {:.6e}", sol.norm_ratio);
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with keys mirroring the sweep config
    #[arg(long)]
    config: Option<PathBuf>,
    /// comma-separated override, e.g. `0.5,1,2,4`
    #[arg(long)]
    lambda_grid: Option<String>,
    #[arg(long)]
    beta_grid: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Box<dyn Error>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string().into()))
        .collect()
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, Box<dyn Error>> {
    let mut cfg = match &args.config {
        Some(path) => toml::from_str(&std::fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };
    if let Some(g) = &args.lambda_grid {
        cfg.lambda_grid = parse_grid(g)?;
    }
    if let Some(g) = &args.beta_grid {
        cfg.beta_grid = parse_grid(g)?;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(p) = &args.out_csv {
        cfg.out_csv = p.clone();
    }
    if let Some(p) = &args.out_svg {
        cfg.out_svg = p.clone();
    }

    let report = run_sweep(&cfg)?;
    for cell in &report.cells {
        println!("{}", cell.csv_row());
    }
    eprintln!(
        "wrote {} and {} ({} cells)",
        cfg.out_csv.display(),
        cfg.out_svg.display(),
        report.cells.len()
    );
    if report.complete() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &report.failures {
            eprintln!(
                "failed cell lambda={} beta={}: {}",
                f.lambda, f.beta_target, f.error
            );
        }
        if let Some(m) = &report.manifest {
            eprintln!("manifest: {}", m.display());
        }
        Ok(ExitCode::from(2))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cf(a) => cmd_cf(a),
        Command::Cocycle(a) => cmd_cocycle(a),
        Command::Le(a) => cmd_le(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Localize(a) => cmd_localize(a),
        Command::Cohom(a) => cmd_cohom(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
