//! Phase-diagram sweep over a `(lambda, beta)` grid.
//!
//! Every grid cell gets the full diagnostic battery -- Lyapunov exponent at
//! spectral energies, subcritical strip test, localization good-fraction,
//! Gordon block growth -- and a classification `ac` / `sc` / `pp` /
//! `boundary` derived purely from those numbers. Results land in a CSV
//! (byte-deterministic for a fixed config) and an SVG scatter with the
//! transition curve `lambda = e^beta` overlaid.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::{ArithmeticError, Frequency};
use crate::cocycle::AmoParams;
use crate::localization::{good_fraction_median, sc_witness};
use crate::lyapunov::{le_estimate, strip_profile};
use crate::spectrum::truncate;

#[derive(Debug, Error)]
pub enum PhaselabError {
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
    #[error("incomplete diagnostics at (lambda={lambda}, beta={beta}): {detail}")]
    IncompleteDiagnostics {
        lambda: f64,
        beta: f64,
        detail: String,
    },
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Grid and budget of one sweep; mirrors the keys of `sweep.toml`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    /// Truncation half-width: localization runs on `2n + 1` sites.
    pub n: usize,
    pub phases: usize,
    pub eps: f64,
    pub le_steps: u64,
    pub seed: u64,
    pub out_csv: PathBuf,
    pub out_svg: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda_grid: log_spaced(0.25, 8.0, 12),
            beta_grid: lin_spaced(0.1, 1.5, 8),
            n: 200,
            phases: 4,
            eps: 0.2,
            le_steps: 200_000,
            seed: 7,
            out_csv: PathBuf::from("phase_diagram.csv"),
            out_svg: PathBuf::from("phase_diagram.svg"),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), PhaselabError> {
        let sorted_positive = |g: &[f64]| {
            !g.is_empty()
                && g.iter().all(|&x| x > 0.0 && x.is_finite())
                && g.windows(2).all(|w| w[0] < w[1])
        };
        if !sorted_positive(&self.lambda_grid) {
            return Err(PhaselabError::InvalidConfig(
                "lambda_grid must be nonempty, positive, strictly ascending".into(),
            ));
        }
        if !sorted_positive(&self.beta_grid) {
            return Err(PhaselabError::InvalidConfig(
                "beta_grid must be nonempty, positive, strictly ascending".into(),
            ));
        }
        if self.n < 100 {
            return Err(PhaselabError::InvalidConfig("n must be >= 100".into()));
        }
        if self.phases == 0 || self.le_steps == 0 {
            return Err(PhaselabError::InvalidConfig(
                "phases and le_steps must be positive".into(),
            ));
        }
        if !(self.eps > 0.0) {
            return Err(PhaselabError::InvalidConfig("eps must be positive".into()));
        }
        Ok(())
    }
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn lin_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && hi > lo);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Ac,
    Sc,
    Pp,
    Boundary,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Ac => "ac",
            Classification::Sc => "sc",
            Classification::Pp => "pp",
            Classification::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ac" => Ok(Classification::Ac),
            "sc" => Ok(Classification::Sc),
            "pp" => Ok(Classification::Pp),
            "boundary" => Ok(Classification::Boundary),
            other => Err(format!("unknown classification {other:?}")),
        }
    }
}

/// Decision thresholds of [`classify_cell`].
#[derive(Debug, Clone)]
pub struct Thresholds {
    pub t_pp: f64,
    pub t_sc: f64,
    pub le_tol: f64,
    /// Cells with `lambda / e^beta` inside this band are never classified.
    pub boundary_band: (f64, f64),
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            t_pp: 0.5,
            t_sc: 0.2,
            le_tol: 0.03,
            boundary_band: (0.8, 1.25),
        }
    }
}

/// One grid cell with its diagnostics and classification.
#[derive(Debug, Clone)]
pub struct PhaseCell {
    pub lambda: f64,
    /// Achieved beta of the synthesized frequency, not the grid target.
    pub beta: f64,
    /// Median Lyapunov exponent over interior spectral energies.
    pub le: f64,
    /// Strip test verdict; always false for `lambda >= 1`.
    pub subcritical: bool,
    pub good_fraction: f64,
    /// Gordon block statistic, present only in the singular-continuous
    /// regime `1 < lambda`, `ln lambda < beta`.
    pub gordon_min: Option<f64>,
    pub classification: Classification,
}

impl PhaseCell {
    pub fn csv_row(&self) -> String {
        let gordon = match self.gordon_min {
            Some(g) => format!("{g:.6}"),
            None => String::new(),
        };
        format!(
            "{:.6},{:.6},{:.6},{},{:.6},{},{}",
            self.lambda,
            self.beta,
            self.le,
            self.subcritical,
            self.good_fraction,
            gordon,
            self.classification
        )
    }
}

pub const CSV_HEADER: &str = "lambda,beta,le,subcritical,good_fraction,gordon_min,class";

/// Classify from stored diagnostics alone, so a CSV row re-derives its own
/// class.
///
/// `ac` needs `lambda < 1` confirmed by the strip test; `pp` / `sc` need
/// the Lyapunov exponent to sit at `ln lambda` and the good fraction to
/// clear `t_pp` (resp. stay under `t_sc`). Everything else -- including
/// the whole band `lambda / e^beta` in `boundary_band` -- is `boundary`.
pub fn classify_cell(
    lambda: f64,
    beta: f64,
    le: f64,
    subcritical: bool,
    good_fraction: f64,
    th: &Thresholds,
) -> Result<Classification, PhaselabError> {
    if !(lambda > 0.0 && beta > 0.0 && le.is_finite() && good_fraction.is_finite()) {
        return Err(PhaselabError::IncompleteDiagnostics {
            lambda,
            beta,
            detail: "non-finite diagnostics".into(),
        });
    }
    let ratio = lambda / beta.exp();
    if ratio >= th.boundary_band.0 && ratio <= th.boundary_band.1 {
        return Ok(Classification::Boundary);
    }
    if lambda < 1.0 {
        return Ok(if subcritical {
            Classification::Ac
        } else {
            Classification::Boundary
        });
    }
    if le >= lambda.ln() - th.le_tol {
        if good_fraction >= th.t_pp {
            Ok(Classification::Pp)
        } else if good_fraction <= th.t_sc {
            Ok(Classification::Sc)
        } else {
            Ok(Classification::Boundary)
        }
    } else {
        Ok(Classification::Boundary)
    }
}

/// Complexified strip height (nats) used for the supercritical Lyapunov
/// estimate: with acceleration one, `L(eps) = ln lambda + eps` on the
/// spectrum, and the complexified cocycle is insensitive to the rational
/// collapse of a synthesized frequency, so subtracting `eps` back recovers
/// `ln lambda` at short orbits.
const LE_EPS: f64 = 0.5;

/// Frequency for one sweep row.
///
/// When the row has singular-continuous candidate cells
/// (`1 < lambda < 0.8 e^beta`), the first partial quotient `q_1` is chosen
/// large enough that the phase drift of the depth-2 rational realization
/// stays well below the band width `e^{-q_1 ln lambda}` of the `q_1`-periodic
/// approximant across the truncation window; otherwise their Bloch states
/// would smear into localized-looking envelopes. Rows without sc candidates
/// use the plain level-by-level synthesis.
fn sweep_frequency(
    beta: f64,
    lambda_grid: &[f64],
    n: usize,
) -> Result<Frequency, ArithmeticError> {
    let sc_worst = lambda_grid
        .iter()
        .copied()
        .filter(|&l| l > 1.0 && l < 0.8 * beta.exp())
        .fold(f64::NAN, f64::max);
    if !sc_worst.is_finite() {
        return Frequency::synthesize_until(beta, 2, 10_000);
    }
    let gap = beta - sc_worst.ln();
    let window = (2 * n + 1) as f64;
    let cap = ((30.0 / beta).floor() as u64).max(8);
    let mut q1 = 8u64;
    while q1 < cap && (gap * q1 as f64).exp() * (q1 as f64) < 8.0 * window {
        q1 += 1;
    }
    Frequency::synthesize(beta, 2, q1)
}

/// Interior spectral energies of a small truncation: quartile eigenvalues.
fn probe_energies(lambda: f64, freq: &Frequency) -> Vec<f64> {
    let n = 241usize;
    let t = truncate::<f64>(lambda, freq, 0.381_966_011_250_105, n, (n / 2) as i64);
    [n / 4, n / 2, 3 * n / 4]
        .iter()
        .map(|&k| t.matrix.eigenvalue(k))
        .collect()
}

fn median_of(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Deepest convergent level usable for a Gordon witness at window `n`.
fn gordon_level(freq: &Frequency, n: usize) -> Option<usize> {
    (1..=freq.depth())
        .filter(|&k| {
            freq.q_u64(k)
                .map(|q| (3..=(n as u64 / 2).min(1000)).contains(&q))
                .unwrap_or(false)
        })
        .max()
}

fn evaluate_cell(
    lambda: f64,
    beta: f64,
    freq: &Frequency,
    cfg: &SweepConfig,
    cell_seed: u64,
    th: &Thresholds,
) -> Result<PhaseCell, PhaselabError> {
    let energies = probe_energies(lambda, freq);
    let le = median_of(
        energies
            .iter()
            .map(|&e| {
                let params = AmoParams::new(lambda, e, freq.clone(), 0.0);
                if lambda > 1.0 {
                    let p = params.with_eps_im(LE_EPS / std::f64::consts::TAU);
                    le_estimate(&p, cfg.le_steps, cfg.phases).value - LE_EPS
                } else {
                    le_estimate(&params, cfg.le_steps, cfg.phases).value
                }
            })
            .collect(),
    );

    let subcritical = if lambda < 1.0 {
        let params = AmoParams::new(lambda, energies[1], freq.clone(), 0.0);
        let half_width = -lambda.ln();
        strip_profile(
            &params,
            &[0.0, 0.5 * half_width],
            cfg.le_steps,
            cfg.phases,
            th.le_tol,
        )
        .subcritical
    } else {
        false
    };

    let good_fraction = if lambda > 1.0 {
        let c = (lambda.ln() - beta - 0.1).max(0.3);
        good_fraction_median(lambda, freq, cfg.n, c, cfg.eps, cfg.phases, cell_seed)
            .map_err(|e| PhaselabError::IncompleteDiagnostics {
                lambda,
                beta,
                detail: e.to_string(),
            })?
            .median_good_fraction
    } else {
        0.0
    };

    let gordon_min = if lambda > 1.0 && lambda.ln() < beta - 0.1 {
        match gordon_level(freq, cfg.n) {
            Some(level) => Some(
                sc_witness(lambda, freq, 0.318, cfg.n, level)
                    .map_err(|e| PhaselabError::IncompleteDiagnostics {
                        lambda,
                        beta,
                        detail: e.to_string(),
                    })?
                    .min_trichotomy,
            ),
            None => None,
        }
    } else {
        None
    };

    let classification = classify_cell(lambda, beta, le, subcritical, good_fraction, th)?;
    Ok(PhaseCell {
        lambda,
        beta,
        le,
        subcritical,
        good_fraction,
        gordon_min,
        classification,
    })
}

/// A cell that failed, with the grid coordinates and the error text.
#[derive(Debug, Clone)]
pub struct CellFailure {
    pub lambda: f64,
    pub beta_target: f64,
    pub error: String,
}

/// Outcome of [`run_sweep`]: completed cells sorted by `(beta, lambda)`,
/// plus any failures (in which case a manifest was written next to the CSV).
#[derive(Debug)]
pub struct SweepReport {
    pub cells: Vec<PhaseCell>,
    pub failures: Vec<CellFailure>,
    pub manifest: Option<PathBuf>,
}

impl SweepReport {
    pub fn complete(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport, PhaselabError> {
    cfg.validate()?;
    let th = Thresholds::default();

    let mut rows = Vec::with_capacity(cfg.beta_grid.len());
    for &beta_target in &cfg.beta_grid {
        let natural = Frequency::synthesize_until(beta_target, 2, 10_000)?;
        let natural_beta = natural.beta_estimate(1)?.limsup_proxy;
        let seeded = sweep_frequency(beta_target, &cfg.lambda_grid, cfg.n)?;
        let seeded_beta = seeded.beta_estimate(1)?.limsup_proxy;
        rows.push((beta_target, natural, natural_beta, seeded, seeded_beta));
    }

    // Subcritical cells keep the natural ladder: the seeded depth-2 frequency
    // is exactly rational, and its spectral gaps can swallow the probe
    // energies of a lambda < 1 truncation.
    let jobs: Vec<(usize, f64, f64, &Frequency, f64)> = rows
        .iter()
        .flat_map(|(target, natural, natural_beta, seeded, seeded_beta)| {
            cfg.lambda_grid.iter().map(move |&lambda| {
                if lambda < 1.0 {
                    (*target, *natural_beta, natural, lambda)
                } else {
                    (*target, *seeded_beta, seeded, lambda)
                }
            })
        })
        .enumerate()
        .map(|(idx, (target, achieved, freq, lambda))| (idx, target, achieved, freq, lambda))
        .collect();

    let results: Vec<Result<PhaseCell, CellFailure>> = jobs
        .par_iter()
        .map(|&(idx, target, achieved, freq, lambda)| {
            let cell_seed = cfg
                .seed
                .wrapping_add((idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            evaluate_cell(lambda, achieved, freq, cfg, cell_seed, &th).map_err(|e| CellFailure {
                lambda,
                beta_target: target,
                error: e.to_string(),
            })
        })
        .collect();

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(c) => cells.push(c),
            Err(f) => failures.push(f),
        }
    }
    cells.sort_by(|a, b| {
        (a.beta, a.lambda)
            .partial_cmp(&(b.beta, b.lambda))
            .unwrap()
    });

    write_csv(&cfg.out_csv, &cells)?;
    write_svg(&cfg.out_svg, &cells)?;

    let manifest = if failures.is_empty() {
        None
    } else {
        let path = cfg.out_csv.with_extension("manifest");
        let mut text = String::from("status: partial\ncompleted:\n");
        for c in &cells {
            text.push_str(&format!("  - lambda={:.6} beta={:.6}\n", c.lambda, c.beta));
        }
        text.push_str("failed:\n");
        for f in &failures {
            text.push_str(&format!(
                "  - lambda={:.6} beta_target={:.6}: {}\n",
                f.lambda, f.beta_target, f.error
            ));
        }
        std::fs::write(&path, text)?;
        Some(path)
    };

    Ok(SweepReport {
        cells,
        failures,
        manifest,
    })
}

fn write_csv(path: &Path, cells: &[PhaseCell]) -> std::io::Result<()> {
    let mut out = String::with_capacity(64 * (cells.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&c.csv_row());
        out.push('\n');
    }
    std::fs::write(path, out)
}

fn svg_color(c: Classification) -> &'static str {
    match c {
        Classification::Ac => "#4c78a8",
        Classification::Sc => "#f58518",
        Classification::Pp => "#e45756",
        Classification::Boundary => "#9c9c9c",
    }
}

/// Flat scatter: x = ln(lambda), y = beta, with the curve `lambda = e^beta`
/// drawn as a straight line in these coordinates.
fn write_svg(path: &Path, cells: &[PhaseCell]) -> std::io::Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const ML: f64 = 60.0;
    const MR: f64 = 140.0;
    const MT: f64 = 30.0;
    const MB: f64 = 50.0;

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in cells {
        x_lo = x_lo.min(c.lambda.ln());
        x_hi = x_hi.max(c.lambda.ln());
        y_lo = y_lo.min(c.beta);
        y_hi = y_hi.max(c.beta);
    }
    if cells.is_empty() || x_hi - x_lo < 1e-9 {
        x_lo = -1.5;
        x_hi = 2.2;
    }
    if cells.is_empty() || y_hi - y_lo < 1e-9 {
        y_lo = 0.0;
        y_hi = 1.6;
    }
    let pad_x = 0.05 * (x_hi - x_lo);
    let pad_y = 0.05 * (y_hi - y_lo);
    x_lo -= pad_x;
    x_hi += pad_x;
    y_lo -= pad_y;
    y_hi += pad_y;
    let px = |x: f64| ML + (x - x_lo) / (x_hi - x_lo) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y_lo) / (y_hi - y_lo) * (H - MT - MB);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" \
         stroke=\"#333\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));

    // transition curve lambda = e^beta, clipped to the plot window
    let b0 = y_lo.max(x_lo);
    let b1 = y_hi.min(x_hi);
    if b1 > b0 {
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333\" \
             stroke-dasharray=\"6 4\" stroke-width=\"1.5\"/>\n",
            px(b0),
            py(b0),
            px(b1),
            py(b1)
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"#333\">&#955; = e^&#946;</text>\n",
            px(b1) + 6.0,
            py(b1) + 4.0
        ));
    }

    for c in cells {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"7\" fill=\"{}\" stroke=\"#333\" \
             stroke-width=\"0.5\"><title>lambda={:.4} beta={:.4} {}</title></circle>\n",
            px(c.lambda.ln()),
            py(c.beta),
            svg_color(c.classification),
            c.lambda,
            c.beta,
            c.classification
        ));
    }

    for (i, class) in [
        Classification::Ac,
        Classification::Sc,
        Classification::Pp,
        Classification::Boundary,
    ]
    .into_iter()
    .enumerate()
    {
        let y = MT + 20.0 + 22.0 * i as f64;
        s.push_str(&format!(
            "<circle cx=\"{:.1}\" cy=\"{y:.1}\" r=\"7\" fill=\"{}\" stroke=\"#333\" \
             stroke-width=\"0.5\"/>\n<text x=\"{:.1}\" y=\"{:.1}\">{class}</text>\n",
            W - MR + 20.0,
            svg_color(class),
            W - MR + 34.0,
            y + 4.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">ln &#955;</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 14.0
    ));
    s.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" transform=\"rotate(-90 18 {:.1})\" \
         text-anchor=\"middle\">&#946;</text>\n",
        MT + (H - MT - MB) / 2.0,
        MT + (H - MT - MB) / 2.0
    ));
    s.push_str("</svg>\n");
    std::fs::write(path, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = SweepConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.lambda_grid.len(), 12);
        assert_eq!(cfg.beta_grid.len(), 8);
        assert!((cfg.lambda_grid[0] - 0.25).abs() < 1e-12);
        assert!((cfg.lambda_grid[11] - 8.0).abs() < 1e-12);
        assert!((cfg.beta_grid[7] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn config_rejects_bad_grids() {
        let mut cfg = SweepConfig::default();
        cfg.lambda_grid = vec![2.0, 1.0];
        assert!(matches!(
            cfg.validate(),
            Err(PhaselabError::InvalidConfig(_))
        ));
        let mut cfg = SweepConfig::default();
        cfg.n = 50;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_roundtrips_through_toml() {
        let cfg = SweepConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: SweepConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.lambda_grid, cfg.lambda_grid);
        assert_eq!(back.seed, cfg.seed);
        let partial: SweepConfig = toml::from_str("n = 150\nseed = 3\n").unwrap();
        assert_eq!(partial.n, 150);
        assert_eq!(partial.phases, SweepConfig::default().phases);
    }

    #[test]
    fn classify_examples() {
        let th = Thresholds::default();
        // subcritical coupling with a passing strip test
        assert_eq!(
            classify_cell(0.5, 0.5, 0.004, true, 0.0, &th).unwrap(),
            Classification::Ac
        );
        // ln 2 < 1.2: localization defeated, low good fraction
        assert_eq!(
            classify_cell(2.0, 1.2, 2.0f64.ln(), false, 0.05, &th).unwrap(),
            Classification::Sc
        );
        // ln 8 > 0.3: localized majority
        assert_eq!(
            classify_cell(8.0, 0.3, 8.0f64.ln(), false, 0.92, &th).unwrap(),
            Classification::Pp
        );
    }

    #[test]
    fn boundary_band_and_in_between() {
        let th = Thresholds::default();
        // lambda / e^beta = 1: inside the band regardless of diagnostics
        assert_eq!(
            classify_cell(1.0f64.exp(), 1.0, 1.0, false, 0.99, &th).unwrap(),
            Classification::Boundary
        );
        // good fraction between t_sc and t_pp
        assert_eq!(
            classify_cell(4.0, 0.3, 4.0f64.ln(), false, 0.35, &th).unwrap(),
            Classification::Boundary
        );
        // Lyapunov exponent short of ln lambda
        assert_eq!(
            classify_cell(4.0, 0.3, 0.8, false, 0.9, &th).unwrap(),
            Classification::Boundary
        );
        // subcritical coupling with a failed strip test
        assert_eq!(
            classify_cell(0.5, 0.5, 0.2, false, 0.0, &th).unwrap(),
            Classification::Boundary
        );
    }

    #[test]
    fn incomplete_diagnostics_rejected() {
        let th = Thresholds::default();
        assert!(matches!(
            classify_cell(2.0, 0.5, f64::NAN, false, 0.5, &th),
            Err(PhaselabError::IncompleteDiagnostics { .. })
        ));
    }

    #[test]
    fn classification_string_roundtrip() {
        for c in [
            Classification::Ac,
            Classification::Sc,
            Classification::Pp,
            Classification::Boundary,
        ] {
            assert_eq!(c.as_str().parse::<Classification>().unwrap(), c);
        }
        assert!("xx".parse::<Classification>().is_err());
    }

    #[test]
    fn spacing_helpers() {
        let l = log_spaced(0.25, 8.0, 12);
        assert!((l[1] / l[0] - l[11] / l[10]).abs() < 1e-12);
        let b = lin_spaced(0.1, 1.5, 8);
        assert!((b[1] - b[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn tiny_sweep_is_deterministic_and_classified() {
        let dir = std::env::temp_dir().join("amo-phaselab-test");
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = SweepConfig {
            lambda_grid: vec![4.0],
            beta_grid: vec![0.5],
            n: 100,
            phases: 2,
            eps: 0.2,
            le_steps: 4000,
            seed: 11,
            out_csv: dir.join("tiny.csv"),
            out_svg: dir.join("tiny.svg"),
        };
        let report = run_sweep(&cfg).unwrap();
        assert!(report.complete());
        assert_eq!(report.cells.len(), 1);
        let first = std::fs::read(&cfg.out_csv).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 2);

        let cell = &report.cells[0];
        // ln 4 = 1.386 > beta: localized regime
        assert_eq!(cell.classification, Classification::Pp);
        assert!((cell.le - 4.0f64.ln()).abs() < 0.05, "{}", cell.le);
        assert!(cell.gordon_min.is_none());

        // classification re-derives from the stored row
        let th = Thresholds::default();
        assert_eq!(
            classify_cell(
                cell.lambda,
                cell.beta,
                cell.le,
                cell.subcritical,
                cell.good_fraction,
                &th
            )
            .unwrap(),
            cell.classification
        );

        run_sweep(&cfg).unwrap();
        let second = std::fs::read(&cfg.out_csv).unwrap();
        assert_eq!(first, second);
        assert!(std::fs::read_to_string(&cfg.out_svg)
            .unwrap()
            .contains("</svg>"));
    }

    #[test]
    fn tiny_ac_cell() {
        let dir = std::env::temp_dir().join("amo-phaselab-test-ac");
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = SweepConfig {
            lambda_grid: vec![0.5],
            beta_grid: vec![0.5],
            n: 100,
            phases: 2,
            eps: 0.2,
            le_steps: 6000,
            seed: 1,
            out_csv: dir.join("ac.csv"),
            out_svg: dir.join("ac.svg"),
        };
        let report = run_sweep(&cfg).unwrap();
        assert_eq!(report.cells[0].classification, Classification::Ac);
        assert!(report.cells[0].subcritical);
    }
}
