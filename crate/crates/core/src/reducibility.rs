//! The computable fragments of the reducibility chain: weighted Fourier
//! norms on analytic strips, the cohomological equation with small
//! divisors, and Aubry-duality Bloch-wave transport.

use crate::arithmetic::Frequency;
use crate::localization::EigenpairReport;
use num_bigint::BigInt;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReducibilityError {
    #[error("divisor |e^(2 pi i k alpha) - 1| underflows at k = {k}")]
    DivisorUnderflow { k: i64 },
    #[error("eigenvector decay rate {decay_rate:.3} below the 0.1 transport threshold")]
    NotDecaying { decay_rate: f64 },
}

/// A truncated Fourier series with coefficients on `k in [-k_max, k_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    k_max: usize,
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    pub fn zero(k_max: usize) -> Self {
        Self {
            k_max,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * k_max + 1],
        }
    }

    pub fn from_fn(k_max: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let mut s = Self::zero(k_max);
        for k in -(k_max as i64)..=(k_max as i64) {
            s.set(k, f(k));
        }
        s
    }

    pub fn constant(c: f64) -> Self {
        let mut s = Self::zero(0);
        s.set(0, Complex64::new(c, 0.0));
        s
    }

    /// `cos(2 pi theta)`: coefficients 1/2 at `k = +-1`.
    pub fn cosine() -> Self {
        let mut s = Self::zero(1);
        s.set(1, Complex64::new(0.5, 0.0));
        s.set(-1, Complex64::new(0.5, 0.0));
        s
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(k + self.k_max as i64) as usize]
    }

    pub fn set(&mut self, k: i64, value: Complex64) {
        assert!(k.unsigned_abs() as usize <= self.k_max);
        self.coeffs[(k + self.k_max as i64) as usize] = value;
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let k_max = self.k_max.max(rhs.k_max);
        Self::from_fn(k_max, |k| self.coeff(k) + rhs.coeff(k))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let k_max = self.k_max.max(rhs.k_max);
        Self::from_fn(k_max, |k| self.coeff(k) - rhs.coeff(k))
    }

    /// Pointwise value at a real phase.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -(self.k_max as i64)..=(self.k_max as i64) {
            let arg = std::f64::consts::TAU * k as f64 * theta;
            acc += self.coeff(k) * Complex64::new(arg.cos(), arg.sin());
        }
        acc
    }

    /// Weighted coefficient norm `sum_k |c_k| e^{2 pi |k| h}`: an upper
    /// bound for the sup of `|f|` on the strip `|Im theta| < h`.
    pub fn strip_norm(&self, h: f64) -> f64 {
        assert!(h >= 0.0);
        let mut acc = 0.0;
        for k in -(self.k_max as i64)..=(self.k_max as i64) {
            acc += self.coeff(k).norm() * (std::f64::consts::TAU * k.abs() as f64 * h).exp();
        }
        acc
    }
}

/// Suggested truncation order: four periods of the deepest resonance,
/// capped at 2^14.
pub fn suggested_order(freq: &Frequency) -> usize {
    let q = freq
        .q_u64(freq.depth())
        .unwrap_or(1 << 14)
        .min(1 << 12) as usize;
    (4 * q).min(1 << 14)
}

/// `e^{2 pi i k alpha} - 1` with the magnitude computed as
/// `2 |sin(pi k alpha)|` from the exact fractional part, avoiding the
/// cancellation of the naive difference near resonances.
fn divisor(freq: &Frequency, k: i64) -> Complex64 {
    let x = freq.frac_multiple(&BigInt::from(k)); // k alpha mod 1
    let half_angle = std::f64::consts::PI * x;
    // e^{i 2 pi x} - 1 = 2 sin(pi x) e^{i (pi x + pi/2)}
    Complex64::from_polar(
        2.0 * half_angle.sin(),
        half_angle + std::f64::consts::FRAC_PI_2,
    )
}

/// Solution record of the cohomological equation
/// `psi(theta + alpha) - psi(theta) = eta(theta) - eta_hat(0)`.
#[derive(Debug, Clone)]
pub struct CohomologicalSolution {
    pub psi: FourierSeries,
    /// `strip_norm` of the equation defect at `h_out`, relative to
    /// `strip_norm(eta, h_in)`.
    pub residual: f64,
    /// `strip_norm(psi, h_out) / strip_norm(eta, h_in)`: the measured
    /// divisor-loss constant for this input.
    pub norm_ratio: f64,
}

/// Solve by Fourier division: `psi_hat(k) = eta_hat(k) / (e^{2 pi i k a} - 1)`
/// for `k != 0`, `psi_hat(0) = 0`. The mean of `eta` is removed by
/// construction.
pub fn solve_cohomological(
    eta: &FourierSeries,
    freq: &Frequency,
    h_in: f64,
    h_out: f64,
) -> Result<CohomologicalSolution, ReducibilityError> {
    assert!(h_out < h_in, "output strip must be strictly smaller");
    let k_max = eta.k_max();
    let mut psi = FourierSeries::zero(k_max);
    for k in -(k_max as i64)..=(k_max as i64) {
        if k == 0 {
            continue;
        }
        let d = divisor(freq, k);
        if d.norm() < 1e-300 {
            return Err(ReducibilityError::DivisorUnderflow { k });
        }
        psi.set(k, eta.coeff(k) / d);
    }

    // defect of the solved equation, coefficientwise:
    // psi_hat(k) (e^{2 pi i k alpha} - 1) - eta_hat(k), k != 0
    let defect = FourierSeries::from_fn(k_max, |k| {
        if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            psi.coeff(k) * divisor(freq, k) - eta.coeff(k)
        }
    });
    let eta_norm = eta.strip_norm(h_in);
    let residual = if eta_norm > 0.0 {
        defect.strip_norm(h_out) / eta_norm
    } else {
        0.0
    };
    let norm_ratio = if eta_norm > 0.0 {
        psi.strip_norm(h_out) / eta_norm
    } else {
        0.0
    };
    Ok(CohomologicalSolution {
        psi,
        residual,
        norm_ratio,
    })
}

/// Dual Bloch-wave data transported from a localized eigenpair.
#[derive(Debug, Clone)]
pub struct BlochTransport {
    /// Sup defect of the dual eigenvalue equation over the sampled lattice,
    /// relative to the largest sample.
    pub residual: f64,
    /// The Bloch function's Fourier coefficients (the eigenvector itself).
    pub bloch: FourierSeries,
}

/// Push a decaying eigenfunction of `H_{lambda, alpha, phi}` through the
/// duality transform: `x_k = e^{2 pi i k phi} psi_bar(theta0 + k alpha)`
/// with `psi_bar(theta) = sum_n u(n) e^{2 pi i n theta}` must satisfy the
/// dual equation at coupling `1/lambda` and energy `E/lambda`.
pub fn bloch_transport(
    report: &EigenpairReport,
    lambda: f64,
    freq: &Frequency,
    phi: f64,
    theta0: f64,
    sample_count: usize,
) -> Result<BlochTransport, ReducibilityError> {
    assert!(lambda > 1.0);
    if !(report.decay_rate >= 0.1) {
        return Err(ReducibilityError::NotDecaying {
            decay_rate: report.decay_rate,
        });
    }
    let n = report.half_width;
    let bloch = FourierSeries::from_fn(n, |k| Complex64::new(report.site(k), 0.0));
    let alpha = freq.value_f64();

    let m = sample_count as i64;
    let x = |k: i64| -> Complex64 {
        let phase_arg = std::f64::consts::TAU * k as f64 * phi;
        let phase = Complex64::new(phase_arg.cos(), phase_arg.sin());
        phase * bloch.eval((theta0 + k as f64 * alpha).rem_euclid(1.0))
    };
    let xs: Vec<Complex64> = (-(m + 1)..=(m + 1)).map(x).collect();
    let at = |k: i64| xs[(k + m + 1) as usize];

    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    for k in -m..=m {
        let cos = (std::f64::consts::TAU * (k as f64 * alpha + theta0).rem_euclid(1.0)).cos();
        let defect = at(k + 1) + at(k - 1) + (2.0 / lambda) * cos * at(k)
            - (report.energy / lambda) * at(k);
        worst = worst.max(defect.norm());
        largest = largest.max(at(k).norm());
    }
    Ok(BlochTransport {
        residual: if largest > 0.0 { worst / largest } else { 0.0 },
        bloch,
    })
}
