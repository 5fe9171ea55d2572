//! Spectrum approximation: Dirichlet truncations, rational-approximant band
//! sets via the Floquet trace criterion, spectral measure, the integrated
//! density of states, and Aubry duality scaling checks.

use crate::arithmetic::Frequency;
use crate::cocycle::{AmoParams, ScaledProduct};
use crate::scalar::Real;
use crate::tridiag::SymTridiag;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("eigenpair residual {residual:.3e} exceeds the {tol:.3e} budget at E = {energy}")]
    ConvergenceFailure {
        energy: f64,
        residual: f64,
        tol: f64,
    },
    #[error("trace is not affine in cos(2 pi q theta): misfit {misfit:.3e}")]
    AffinityCheckFailed { misfit: f64 },
}

/// Dirichlet truncation of the AMO to `N` sites, with site `j` carrying
/// potential `2 lambda cos(2 pi ((j - offset) alpha + theta))`.
#[derive(Debug, Clone)]
pub struct TridiagonalOperator<R: Real> {
    pub matrix: SymTridiag<R>,
    pub lambda: f64,
    pub theta: f64,
    pub offset: i64,
}

pub type TridiagonalOperatorf64 = TridiagonalOperator<f64>;

/// Eigenvalues (ascending) with optional orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EighResult<R: Real> {
    pub values: Vec<R>,
    pub vectors: Option<Vec<Vec<R>>>,
}

pub fn truncate<R: Real>(
    lambda: f64,
    freq: &Frequency,
    theta: f64,
    n: usize,
    offset: i64,
) -> TridiagonalOperator<R> {
    assert!(n >= 1);
    let alpha = freq.value_f64();
    let diag: Vec<R> = (0..n)
        .map(|j| {
            let site = j as i64 - offset;
            let phase = (site as f64 * alpha + theta).rem_euclid(1.0);
            R::from_f64_lossy(2.0 * lambda * (std::f64::consts::TAU * phase).cos())
        })
        .collect();
    TridiagonalOperator {
        matrix: SymTridiag::new(diag, vec![R::one(); n - 1]),
        lambda,
        theta,
        offset,
    }
}

impl<R: Real> TridiagonalOperator<R> {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Diagonalize; with vectors, every pair is residual-checked against
    /// the `1e-10 * (2 + 2 lambda)` budget.
    pub fn eigh(&self, want_vectors: bool) -> Result<EighResult<R>, SpectrumError> {
        let values = self.matrix.eigenvalues();
        if !want_vectors {
            return Ok(EighResult {
                values,
                vectors: None,
            });
        }
        let vectors = self.matrix.eigenvectors_for(&values);
        let tol = R::from_f64_lossy(1e-10 * (2.0 + 2.0 * self.lambda));
        for (v, vec) in values.iter().zip(vectors.iter()) {
            let r = self.matrix.residual(*v, vec);
            if r > tol {
                return Err(SpectrumError::ConvergenceFailure {
                    energy: v.to_f64().unwrap_or(f64::NAN),
                    residual: r.to_f64().unwrap_or(f64::NAN),
                    tol: tol.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(EighResult {
            values,
            vectors: Some(vectors),
        })
    }

    /// Fraction of truncated eigenvalues at or below `E`.
    pub fn ids(&self, energy: R) -> f64 {
        let below = self
            .matrix
            .count_below(energy + R::from_f64_lossy(1e-12));
        below as f64 / self.n() as f64
    }
}

/// Convenience form of `ids`: build the truncation and count.
pub fn ids(lambda: f64, freq: &Frequency, theta: f64, n: usize, energy: f64) -> f64 {
    assert!(n >= 100);
    truncate::<f64>(lambda, freq, theta, n, 0).ids(energy)
}

/// A sorted union of disjoint closed energy intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSet {
    intervals: Vec<(f64, f64)>,
}

impl BandSet {
    /// Build from arbitrary intervals: sorts, drops empties, merges overlaps.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Self {
        intervals.retain(|(lo, hi)| lo < hi);
        intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => *last_hi = last_hi.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Self { intervals: merged }
    }

    pub fn empty() -> Self {
        Self { intervals: vec![] }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Distance from a point to the set (0 inside).
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Affine image `{s*x + t : x in self}` (s > 0).
    pub fn scale(&self, s: f64) -> Self {
        assert!(s > 0.0);
        Self {
            intervals: self.intervals.iter().map(|&(lo, hi)| (s * lo, s * hi)).collect(),
        }
    }

    /// Hausdorff distance between two interval unions. The sup of
    /// `d(x, other)` over a union is attained at an interval endpoint or at
    /// a gap midpoint of the other set, so only those points are examined.
    pub fn hausdorff(&self, other: &Self) -> f64 {
        fn directed(a: &BandSet, b: &BandSet) -> f64 {
            if a.is_empty() {
                return if b.is_empty() { 0.0 } else { f64::INFINITY };
            }
            if b.is_empty() {
                return f64::INFINITY;
            }
            let mut worst = 0.0f64;
            for &(lo, hi) in &a.intervals {
                worst = worst.max(b.distance(lo)).max(b.distance(hi));
            }
            // interior candidates: midpoints of b's gaps that land inside a
            for w in b.intervals.windows(2) {
                let mid = (w[0].1 + w[1].0) / 2.0;
                if a.contains(mid) {
                    worst = worst.max(b.distance(mid));
                }
            }
            worst
        }
        directed(self, other).max(directed(other, self))
    }
}

/// `tr A~_q(E, theta)` for the rational frequency `p/q`.
fn rational_trace(lambda: f64, p: u64, q: u64, energy: f64, theta: f64) -> f64 {
    let freq = Frequency::from_quotients(rational_quotients(p, q), 64);
    let params = AmoParams::new(lambda, energy, freq, theta);
    let level = params.freq.depth();
    let prod: ScaledProduct<f64> = params
        .product(q as i64, Some(level))
        .expect("rational product");
    prod.unit.trace() * prod.log_scale.exp()
}

/// Continued fraction of `p/q` in `(0,1)`, for building a `Frequency` that
/// is exactly rational at its deepest convergent.
fn rational_quotients(p: u64, q: u64) -> Vec<num_bigint::BigUint> {
    assert!(p < q && q >= 1);
    if p == 0 {
        // alpha = 0: a single huge quotient would be dishonest; callers
        // special-case q = 1 instead
        return vec![num_bigint::BigUint::from(q)];
    }
    let (mut num, mut den) = (q, p);
    let mut out = Vec::new();
    while den != 0 {
        out.push(num_bigint::BigUint::from(num / den));
        let r = num % den;
        num = den;
        den = r;
    }
    out
}

/// The q x q Floquet block: diagonal `2 lambda cos(2 pi (j p/q + theta))`,
/// hopping 1, with wrap sign `sigma` (`+1` periodic, `-1` antiperiodic).
fn floquet_matrix(lambda: f64, p: u64, q: u64, theta: f64, sigma: f64) -> DMatrix<f64> {
    let n = q as usize;
    let v = |j: u64| {
        2.0 * lambda
            * (std::f64::consts::TAU * ((j * p) as f64 / q as f64 + theta).rem_euclid(1.0)).cos()
    };
    if n == 1 {
        return DMatrix::from_element(1, 1, v(0) + 2.0 * sigma);
    }
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = v(j as u64);
    }
    for j in 0..n - 1 {
        m[(j, j + 1)] = 1.0;
        m[(j + 1, j)] = 1.0;
    }
    if n == 2 {
        // direct hop and wrap hop join the same pair of sites
        m[(0, 1)] += sigma;
        m[(1, 0)] += sigma;
    } else {
        m[(0, n - 1)] = sigma;
        m[(n - 1, 0)] = sigma;
    }
    m
}

/// Band set of the rational-frequency operator `p/q`: the energies where
/// some phase gives `|tr A~_q| <= 2`.
///
/// The trace is affine in `cos(2 pi q theta)`; the affinity is verified at
/// `theta_samples` phases and then only the two extremal phases are used.
/// Over the phase union the band condition becomes `|c0| <= 2 + |c1|`,
/// whose boundary energies solve `tr = +-2` at an extremal phase: they are
/// eigenvalues of the four periodic/antiperiodic Floquet blocks.
pub fn bands_rational(
    lambda: f64,
    p: u64,
    q: u64,
    theta_samples: usize,
    e_resolution: f64,
) -> Result<BandSet, SpectrumError> {
    assert!(q >= 1 && q <= 200 && p < q && theta_samples >= 8);
    assert!(e_resolution > 0.0);

    verify_affinity(lambda, p, q, theta_samples)?;

    // candidate edges: spectra of the 4 extremal Floquet blocks
    let mut candidates: Vec<f64> = Vec::with_capacity(4 * q as usize);
    for theta in [0.0, 1.0 / (2.0 * q as f64)] {
        for sigma in [1.0, -1.0] {
            let eig = floquet_matrix(lambda, p, q, theta, sigma).symmetric_eigenvalues();
            candidates.extend(eig.iter());
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() < e_resolution);

    // membership of each cell between consecutive candidates
    let in_bands = |energy: f64| -> bool {
        let t0 = rational_trace(lambda, p, q, energy, 0.0);
        let t1 = rational_trace(lambda, p, q, energy, 1.0 / (2.0 * q as f64));
        let c0 = (t0 + t1) / 2.0;
        let c1 = (t0 - t1) / 2.0;
        c0.abs() <= 2.0 + c1.abs()
    };
    let mut intervals = Vec::new();
    for w in candidates.windows(2) {
        if in_bands((w[0] + w[1]) / 2.0) {
            intervals.push((w[0], w[1]));
        }
    }
    Ok(BandSet::new(intervals))
}

fn verify_affinity(
    lambda: f64,
    p: u64,
    q: u64,
    theta_samples: usize,
) -> Result<(), SpectrumError> {
    // probe energies spread over the Gershgorin range
    let e_max = 2.0 + 2.0 * lambda;
    for k in 0..5 {
        let energy = e_max * (k as f64 / 2.0 - 1.0);
        let t0 = rational_trace(lambda, p, q, energy, 0.0);
        let t1 = rational_trace(lambda, p, q, energy, 1.0 / (2.0 * q as f64));
        let c0 = (t0 + t1) / 2.0;
        let c1 = (t0 - t1) / 2.0;
        let scale = 1.0f64.max(t0.abs()).max(t1.abs());
        for m in 0..theta_samples {
            let theta = m as f64 / (theta_samples as f64 * q as f64);
            let t = rational_trace(lambda, p, q, energy, theta);
            let model = c0 + c1 * (std::f64::consts::TAU * q as f64 * theta).cos();
            let misfit = (t - model).abs() / scale;
            if misfit > 1e-8 {
                return Err(SpectrumError::AffinityCheckFailed { misfit });
            }
        }
    }
    Ok(())
}

pub fn spectrum_measure(bands: &BandSet) -> f64 {
    bands.measure()
}

/// Hausdorff distance between `bands(lambda)` and `lambda * bands(1/lambda)`
/// at one rational approximant: a numerical certificate of the duality
/// scaling of the spectrum.
pub fn duality_scale_check(
    lambda: f64,
    p: u64,
    q: u64,
    e_resolution: f64,
) -> Result<f64, SpectrumError> {
    let primal = bands_rational(lambda, p, q, 8, e_resolution)?;
    let dual = bands_rational(1.0 / lambda, p, q, 8, e_resolution)?;
    Ok(primal.hausdorff(&dual.scale(lambda)))
}
