//! Eigenfunction decay diagnostics: the (N,C,eps)-good predicate, the
//! good-fraction statistic over phases, fitted decay rates, and the Gordon
//! recurrence witness against point spectrum in the Liouville regime.

use crate::arithmetic::{ArithmeticError, Frequency};
use crate::cocycle::{gordon_growth, AmoParams, CocycleError};
use crate::spectrum::{truncate, SpectrumError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LocalizationError {
    #[error("Gordon witness needs ln lambda < beta - 0.1, got ln lambda = {ln_lambda:.3}, beta = {beta:.3}")]
    RegimeMismatch { ln_lambda: f64, beta: f64 },
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Decay analysis of one normalized eigenvector over sites `-N..N`.
#[derive(Debug, Clone)]
pub struct EigenpairReport {
    pub energy: f64,
    /// `u[j]` is the amplitude at site `j - half_width`.
    pub u: Vec<f64>,
    pub half_width: usize,
    /// Site index of the largest amplitude (smallest site on ties).
    pub center: i64,
    /// Fitted slope of `-ln|u|` vs `|n - center|` in nats per site.
    pub decay_rate: f64,
}

const TAIL_FLOOR: f64 = 1e-14;

impl EigenpairReport {
    /// Build the report from an eigenvector indexed by sites
    /// `-half_width ..= half_width`.
    pub fn from_vector(energy: f64, u: Vec<f64>, half_width: usize) -> Self {
        assert_eq!(u.len(), 2 * half_width + 1);
        let mut center = 0usize;
        for (j, x) in u.iter().enumerate() {
            if x.abs() > u[center].abs() {
                center = j;
            }
        }
        let center = center as i64 - half_width as i64;
        let decay_rate = fit_decay(&u, half_width, center);
        Self {
            energy,
            u,
            half_width,
            center,
            decay_rate,
        }
    }

    pub fn site(&self, n: i64) -> f64 {
        self.u[(n + self.half_width as i64) as usize]
    }

    /// The (N,C,eps)-good predicate, verbatim:
    /// `|u(n)| <= e^{-C eps |n|}` for every available site with
    /// `|n| >= (1 - eps) N`.
    pub fn good(&self, n_window: usize, c: f64, eps: f64) -> bool {
        let cutoff = (1.0 - eps) * n_window as f64;
        let h = self.half_width as i64;
        (-h..=h)
            .filter(|n| (n.abs() as f64) >= cutoff)
            .all(|n| self.site(n).abs() <= (-c * eps * n.abs() as f64).exp())
    }
}

fn fit_decay(u: &[f64], half_width: usize, center: i64) -> f64 {
    // least squares of -ln|u| against |n - center| over the window
    // [0.2 D, 0.8 D], where D is the largest distance still above the
    // tail floor: strongly decaying vectors hit the floor long before the
    // truncation edge and the saturated plateau carries no slope
    let mut d_eff = 0i64;
    for (j, amp) in u.iter().enumerate() {
        if amp.abs() > TAIL_FLOOR {
            d_eff = d_eff.max((j as i64 - half_width as i64 - center).abs());
        }
    }
    let n = (d_eff as f64).min(half_width as f64);
    let (lo, hi) = (0.2 * n, 0.8 * n);
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0.0;
    for (j, amp) in u.iter().enumerate() {
        let site = j as i64 - half_width as i64;
        let d = (site - center).abs() as f64;
        if d < lo || d > hi {
            continue;
        }
        if amp.abs() <= TAIL_FLOOR {
            // floor-saturated sites carry no slope information; including
            // the clamped plateau would bias strong decay toward zero
            continue;
        }
        let y = -amp.abs().ln();
        sx += d;
        sy += y;
        sxx += d * d;
        sxy += d * y;
        count += 1.0;
    }
    if count < 2.0 {
        return 0.0;
    }
    let denom = count * sxx - sx * sx;
    if denom == 0.0 {
        return 0.0;
    }
    (count * sxy - sx * sy) / denom
}

/// Diagonalize the centered `2N+1`-site truncation and report every
/// eigenpair, energies ascending.
pub fn analyze_eigenpairs(
    lambda: f64,
    freq: &Frequency,
    phi: f64,
    n: usize,
) -> Result<Vec<EigenpairReport>, LocalizationError> {
    assert!((100..=5000).contains(&n));
    let t = truncate::<f64>(lambda, freq, phi, 2 * n + 1, n as i64);
    let r = t.eigh(true)?;
    let vectors = r.vectors.expect("vectors requested");
    Ok(r
        .values
        .into_iter()
        .zip(vectors)
        .map(|(e, u)| EigenpairReport::from_vector(e, u, n))
        .collect())
}

/// Index range of the interior eigenpairs after discarding the outermost
/// 2% on each side (truncation-edge artifacts).
pub fn interior_range(count: usize) -> std::ops::Range<usize> {
    let skip = (count as f64 * 0.02).ceil() as usize;
    skip..count - skip
}

/// Fraction of interior eigenpairs that are `(N, C, eps)`-good.
pub fn good_fraction(
    lambda: f64,
    freq: &Frequency,
    phi: f64,
    n: usize,
    c: f64,
    eps: f64,
) -> Result<f64, LocalizationError> {
    let reports = analyze_eigenpairs(lambda, freq, phi, n)?;
    let range = interior_range(reports.len());
    let considered = &reports[range];
    let good = considered.iter().filter(|r| r.good(n, c, eps)).count();
    Ok(good as f64 / considered.len() as f64)
}

/// Median of `good_fraction` over `n_phases` uniform phases drawn from a
/// seeded generator; also returns the median decay rate of good pairs.
pub fn good_fraction_median(
    lambda: f64,
    freq: &Frequency,
    n: usize,
    c: f64,
    eps: f64,
    n_phases: usize,
    seed: u64,
) -> Result<PhaseStatistics, LocalizationError> {
    assert!(n_phases >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phis: Vec<f64> = (0..n_phases).map(|_| rng.gen::<f64>()).collect();
    let per_phase: Vec<Result<(f64, Vec<f64>), LocalizationError>> = phis
        .par_iter()
        .map(|&phi| {
            let reports = analyze_eigenpairs(lambda, freq, phi, n)?;
            let range = interior_range(reports.len());
            let considered = &reports[range];
            let good: Vec<&EigenpairReport> =
                considered.iter().filter(|r| r.good(n, c, eps)).collect();
            let frac = good.len() as f64 / considered.len() as f64;
            Ok((frac, good.iter().map(|r| r.decay_rate).collect()))
        })
        .collect();
    let mut fractions = Vec::with_capacity(n_phases);
    let mut decays = Vec::new();
    for r in per_phase {
        let (frac, d) = r?;
        fractions.push(frac);
        decays.extend(d);
    }
    Ok(PhaseStatistics {
        median_good_fraction: median(&mut fractions),
        median_good_decay: if decays.is_empty() {
            f64::NAN
        } else {
            median(&mut decays)
        },
        phases: phis,
    })
}

#[derive(Debug, Clone)]
pub struct PhaseStatistics {
    pub median_good_fraction: f64,
    /// Median decay rate pooled over the good pairs of all phases;
    /// NaN when no pair is good.
    pub median_good_decay: f64,
    pub phases: Vec<f64>,
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Gordon growth of one truncated eigenpair.
#[derive(Debug, Clone)]
pub struct GordonPairDetail {
    pub energy: f64,
    /// `||A_{2 q_n}(theta) v||` with v the boundary data at the center.
    pub growth_2qn: f64,
    pub growth_qn: f64,
    pub growth_neg_qn: f64,
    /// `max` of the three block norms: the classical Gordon statistic.
    pub trichotomy: f64,
}

/// Result of the singular-continuous witness run.
#[derive(Debug, Clone)]
pub struct ScWitness {
    pub level: usize,
    pub q_n: u64,
    /// `min` over interior eigenpairs of `||A_{2 q_n} v||`.
    pub min_growth: f64,
    /// `min` over interior eigenpairs of the trichotomy statistic.
    pub min_trichotomy: f64,
    pub pairs: Vec<GordonPairDetail>,
}

/// Apply the Gordon blocks at convergent level `level` to the boundary
/// data `(u(0), u(-1))` of every interior truncated eigenpair.
///
/// In the regime `ln lambda < beta` a decaying eigenvector would force all
/// three block norms to be small, while the recurrence mechanism keeps the
/// largest above 1/2; tracking the minimum over pairs probes this.
pub fn sc_witness(
    lambda: f64,
    freq: &Frequency,
    phi: f64,
    n: usize,
    level: usize,
) -> Result<ScWitness, LocalizationError> {
    assert!(lambda > 1.0);
    let beta = freq.beta_estimate(1)?.limsup_proxy;
    if lambda.ln() >= beta - 0.1 {
        return Err(LocalizationError::RegimeMismatch {
            ln_lambda: lambda.ln(),
            beta,
        });
    }
    let q_n = freq
        .q_u64(level)
        .ok_or(CocycleError::LevelOutOfRange { level })?;
    assert!(q_n <= 1000);

    let reports = analyze_eigenpairs(lambda, freq, phi, n)?;
    let range = interior_range(reports.len());
    let pairs: Vec<GordonPairDetail> = reports[range]
        .par_iter()
        .filter_map(|r| {
            let (u0, um1) = (r.site(0), r.site(-1));
            let norm = u0.hypot(um1);
            if !norm.is_finite() || norm < 1e-200 {
                // boundary data entirely below the eigensolver floor:
                // the pair carries no usable Gordon statistic
                return None;
            }
            let v = [u0 / norm, um1 / norm];
            let params = AmoParams::new(lambda, r.energy, freq.clone(), phi);
            let g = gordon_growth(&params, level, v).expect("level checked above");
            Some(GordonPairDetail {
                energy: r.energy,
                growth_2qn: g.log_norm_2qn.exp(),
                growth_qn: g.log_norm_qn.exp(),
                growth_neg_qn: g.log_norm_neg_qn.exp(),
                trichotomy: g.log_max_block().exp(),
            })
        })
        .collect();
    let min_growth = pairs.iter().map(|p| p.growth_2qn).fold(f64::INFINITY, f64::min);
    let min_trichotomy = pairs.iter().map(|p| p.trichotomy).fold(f64::INFINITY, f64::min);
    Ok(ScWitness {
        level,
        q_n,
        min_growth,
        min_trichotomy,
        pairs,
    })
}
