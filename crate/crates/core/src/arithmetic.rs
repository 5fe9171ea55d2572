//! Exact continued-fraction machinery: expansion with certified interval
//! arithmetic, big-integer convergents, torus norms, beta estimation and
//! synthesis of frequencies with a prescribed Liouville exponent.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type BigRational = Ratio<BigInt>;

/// Default cap on the decimal digits of a synthesized denominator.
/// Beyond this, `synthesize` fails rather than silently switching to
/// approximate logarithms.
pub const DEFAULT_DIGIT_CAP: u32 = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithmeticError {
    #[error("input is rational to working precision (some alpha_k hit 0 before the requested depth)")]
    RationalInput,
    #[error("precision exhausted: partial quotient ambiguous at level {level}")]
    PrecisionExhausted { level: usize },
    #[error("next denominator would exceed the {cap}-digit budget")]
    DepthOverflow { cap: u32 },
    #[error("|k| must be smaller than the deepest denominator q_{depth}")]
    HorizonExceeded { depth: usize },
    #[error("frequency holds {have} convergent levels, {need} required")]
    InsufficientDepth { have: usize, need: usize },
}

/// An irrational frequency represented by its partial quotients.
///
/// The quotients are ground truth; every real evaluation derives from the
/// deepest convergent together with a certified interval error. Convergents
/// are stored for levels `0..=depth` with `p_0 = 0, q_0 = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frequency {
    partial_quotients: Vec<BigUint>,
    convergents: Vec<(BigInt, BigInt)>,
    precision_bits: u64,
}

/// Per-level `ln(q_{n+1})/q_n` values and their tail-window maximum.
///
/// The maximum is a proxy for the limsup, not a certificate: no finite
/// probe depth can certify a limsup.
#[derive(Debug, Clone)]
pub struct BetaEstimate {
    pub per_level: Vec<f64>,
    pub limsup_proxy: f64,
    pub depth: usize,
}

/// `ln` of a nonnegative big integer, accurate to f64 precision.
pub fn ln_big(x: &BigInt) -> f64 {
    debug_assert!(!x.is_negative());
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit chunk");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Big rational to f64, robust to numerator/denominator overflowing f64.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let excess = nb.max(db) - 900;
    if excess <= 0 {
        return num.to_f64().unwrap() / den.to_f64().unwrap();
    }
    let n = (num >> excess).to_f64().unwrap();
    let d = (den >> excess).to_f64().unwrap();
    n / d
}

/// Distance from a rational to the nearest integer, exactly.
pub fn dist_to_integer(r: &BigRational) -> BigRational {
    let f = r - r.floor();
    let alt = BigRational::one() - f.clone();
    if f <= alt {
        f
    } else {
        alt
    }
}

impl Frequency {
    /// Continued-fraction expansion of an `alpha` known to lie in
    /// `[alpha - 2^-precision_bits, alpha + 2^-precision_bits]`.
    ///
    /// Runs the Gauss map on the interval; a level is accepted only when
    /// both endpoints agree on the partial quotient.
    pub fn expand(
        alpha: &BigRational,
        precision_bits: u64,
        depth: usize,
    ) -> Result<Self, ArithmeticError> {
        assert!(depth >= 1, "depth must be >= 1");
        let eps = BigRational::new(BigInt::one(), BigInt::one() << precision_bits);
        let mut lo = alpha - &eps;
        let mut hi = alpha + &eps;
        assert!(
            lo > BigRational::zero() && hi < BigRational::one(),
            "alpha must lie in (0,1) with margin for the precision interval"
        );

        let mut center = alpha.clone();
        let mut quotients = Vec::with_capacity(depth);
        for level in 1..=depth {
            if lo <= BigRational::zero() || center.is_zero() {
                return Err(ArithmeticError::RationalInput);
            }
            // x in [lo, hi] => 1/x in [1/hi, 1/lo]
            let inv_lo = hi.recip();
            let inv_hi = lo.recip();
            let a_lo = inv_lo.floor().to_integer();
            let a_hi = inv_hi.floor().to_integer();
            if a_lo != a_hi {
                // a reciprocal landing exactly on an integer means the
                // expansion of the center terminates here
                let inv_c = center.recip();
                if inv_c.is_integer() {
                    return Err(ArithmeticError::RationalInput);
                }
                return Err(ArithmeticError::PrecisionExhausted { level });
            }
            let a_rat = BigRational::from_integer(a_lo.clone());
            center = center.recip() - &a_rat;
            lo = inv_lo - &a_rat;
            hi = inv_hi - &a_rat;
            quotients.push(a_lo.to_biguint().expect("quotient >= 1"));
        }
        Ok(Self::from_quotients(quotients, precision_bits))
    }

    /// Build a frequency from explicit partial quotients (all >= 1).
    pub fn from_quotients(partial_quotients: Vec<BigUint>, precision_bits: u64) -> Self {
        assert!(!partial_quotients.is_empty());
        assert!(partial_quotients.iter().all(|a| !a.is_zero()));
        let mut convergents = Vec::with_capacity(partial_quotients.len() + 1);
        convergents.push((BigInt::zero(), BigInt::one()));
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        for a in &partial_quotients {
            let a = BigInt::from(a.clone());
            let (p_last, q_last) = convergents.last().unwrap().clone();
            let p = &a * &p_last + &p_prev;
            let q = &a * &q_last + &q_prev;
            p_prev = p_last;
            q_prev = q_last;
            convergents.push((p, q));
        }
        Self {
            partial_quotients,
            convergents,
            precision_bits,
        }
    }

    /// The golden mean `(sqrt(5)-1)/2`: all partial quotients equal 1.
    pub fn golden(depth: usize) -> Self {
        Self::from_quotients(vec![BigUint::one(); depth], 64 + 2 * depth as u64)
    }

    /// `sqrt(2) - 1`: all partial quotients equal 2.
    pub fn sqrt2_minus_1(depth: usize) -> Self {
        Self::from_quotients(vec![BigUint::from(2u32); depth], 64 + 3 * depth as u64)
    }

    /// Synthesize a frequency whose per-level `ln(q_{n+1})/q_n` tracks
    /// `beta_target`, by choosing `a_{n+1} = max(1, ceil(e^{beta q_n}/q_n))`.
    pub fn synthesize(
        beta_target: f64,
        depth: usize,
        a1_seed: u64,
    ) -> Result<Self, ArithmeticError> {
        Self::synthesize_capped(beta_target, depth, a1_seed, DEFAULT_DIGIT_CAP)
    }

    pub fn synthesize_capped(
        beta_target: f64,
        depth: usize,
        a1_seed: u64,
        digit_cap: u32,
    ) -> Result<Self, ArithmeticError> {
        assert!(beta_target > 0.0 && depth >= 2 && a1_seed >= 1);
        let mut quotients = vec![BigUint::from(a1_seed)];
        let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
        let (mut p, mut q) = (BigInt::one(), BigInt::from(a1_seed));
        for _ in 1..depth {
            let a = next_quotient(beta_target, &q, digit_cap)?;
            let a_int = BigInt::from(a.clone());
            let p_next = &a_int * &p + &p_prev;
            let q_next = &a_int * &q + &q_prev;
            if decimal_digits(&q_next) > digit_cap as u64 {
                return Err(ArithmeticError::DepthOverflow { cap: digit_cap });
            }
            quotients.push(a);
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
        }
        let bits = 2 * q.bits() + 8;
        Ok(Self::from_quotients(quotients, bits))
    }

    /// Extend a synthesized frequency level by level until the deepest
    /// denominator reaches `min_q` (or the digit cap stops it). At least
    /// two levels are always produced.
    pub fn synthesize_until(
        beta_target: f64,
        a1_seed: u64,
        min_q: u64,
    ) -> Result<Self, ArithmeticError> {
        let mut depth = 2;
        let mut freq = Self::synthesize(beta_target, depth, a1_seed)?;
        loop {
            let q = freq.q(freq.depth());
            if q.bits() > 64 || q.to_u64().map(|v| v >= min_q).unwrap_or(true) {
                return Ok(freq);
            }
            depth += 1;
            match Self::synthesize(beta_target, depth, a1_seed) {
                Ok(f) => freq = f,
                Err(ArithmeticError::DepthOverflow { .. }) => return Ok(freq),
                Err(e) => return Err(e),
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn precision_bits(&self) -> u64 {
        self.precision_bits
    }

    pub fn partial_quotients(&self) -> &[BigUint] {
        &self.partial_quotients
    }

    /// Convergent `(p_k, q_k)`, `k` in `0..=depth`.
    pub fn convergent(&self, k: usize) -> (&BigInt, &BigInt) {
        let (p, q) = &self.convergents[k];
        (p, q)
    }

    pub fn p(&self, k: usize) -> &BigInt {
        &self.convergents[k].0
    }

    pub fn q(&self, k: usize) -> &BigInt {
        &self.convergents[k].1
    }

    /// `q_k` as u64 if it fits.
    pub fn q_u64(&self, k: usize) -> Option<u64> {
        self.q(k).to_u64()
    }

    /// Deepest convergent as an exact rational.
    pub fn value_rational(&self) -> BigRational {
        let (p, q) = &self.convergents[self.depth()];
        BigRational::new(p.clone(), q.clone())
    }

    /// The working real value of alpha (deepest convergent, rounded).
    pub fn value_f64(&self) -> f64 {
        ratio_to_f64(&self.value_rational())
    }

    /// Bracket `(lo, hi)` from the two deepest convergents; the true value
    /// of any irrational with these leading quotients lies strictly inside.
    pub fn bracket(&self) -> (BigRational, BigRational) {
        let d = self.depth();
        let a = BigRational::new(self.p(d - 1).clone(), self.q(d - 1).clone());
        let b = BigRational::new(self.p(d).clone(), self.q(d).clone());
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// `||k alpha||_T` evaluated exactly against the deepest convergent.
    pub fn torus_norm(&self, k: &BigInt) -> Result<f64, ArithmeticError> {
        Ok(ratio_to_f64(&self.torus_norm_exact(k)?))
    }

    /// Exact rational `||k p_d / q_d||_T`; requires `|k| < q_depth`.
    pub fn torus_norm_exact(&self, k: &BigInt) -> Result<BigRational, ArithmeticError> {
        let d = self.depth();
        if k.is_zero() || k.abs() >= *self.q(d) {
            return Err(ArithmeticError::HorizonExceeded { depth: d });
        }
        let (p, q) = self.convergent(d);
        let r = (k * p).mod_floor(q);
        let r_alt = q - &r;
        let num = r.min(r_alt);
        Ok(BigRational::new(num, q.clone()))
    }

    /// Fractional part of `k * alpha` in `[0, 1)`, with `alpha` the deepest
    /// convergent, by exact mod-q arithmetic (no cancellation for large k).
    pub fn frac_multiple(&self, k: &BigInt) -> f64 {
        let (p, q) = self.convergent(self.depth());
        let r = (k * p).mod_floor(q);
        ratio_to_f64(&BigRational::new(r, q.clone()))
    }

    /// Certified error of `torus_norm` relative to the true irrational:
    /// `|k|` times the bracket width.
    pub fn torus_norm_error_bound(&self, k: &BigInt) -> f64 {
        let d = self.depth();
        let width = BigRational::new(BigInt::one(), self.q(d - 1) * self.q(d));
        ratio_to_f64(&(width * BigRational::from_integer(k.abs())))
    }

    /// Per-level `ln(q_{n+1})/q_n` with the max over the last `tail_window`
    /// levels as the limsup proxy.
    pub fn beta_estimate(&self, tail_window: usize) -> Result<BetaEstimate, ArithmeticError> {
        assert!(tail_window >= 1);
        let d = self.depth();
        if d < tail_window + 1 {
            return Err(ArithmeticError::InsufficientDepth {
                have: d,
                need: tail_window + 1,
            });
        }
        let mut per_level = Vec::with_capacity(d - 1);
        for n in 1..d {
            let ln_next = ln_big(self.q(n + 1));
            let qn = self.q(n);
            let v = if qn.bits() <= 1000 {
                ln_next / qn.to_f64().unwrap()
            } else {
                // q_n beyond f64 range: ratio underflows to ~0
                (ln_next.ln() - ln_big(qn)).exp()
            };
            per_level.push(v);
        }
        let tail = &per_level[per_level.len().saturating_sub(tail_window)..];
        let limsup_proxy = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(BetaEstimate {
            per_level,
            limsup_proxy,
            depth: d,
        })
    }

    /// Secondary beta estimate: `max (1/q_n) ln(1/||q_n alpha||)` over the
    /// last `tail_window` convergent denominators, where the sup over all
    /// integers is attained.
    pub fn beta_estimate_dual(&self, tail_window: usize) -> Result<f64, ArithmeticError> {
        assert!(tail_window >= 1);
        let d = self.depth();
        if d < tail_window + 1 {
            return Err(ArithmeticError::InsufficientDepth {
                have: d,
                need: tail_window + 1,
            });
        }
        let mut best = 0.0f64;
        for n in (d - tail_window)..d {
            let qn = self.q(n);
            let norm = self.torus_norm_exact(qn)?;
            // ln(1/norm) = ln(den) - ln(num)
            let v = (ln_big(norm.denom()) - ln_big(norm.numer()))
                * if qn.bits() <= 1000 {
                    1.0 / qn.to_f64().unwrap()
                } else {
                    0.0
                };
            best = best.max(v);
        }
        Ok(best)
    }

    /// Largest `gamma` such that `phi` passes the `DC_alpha(tau, gamma)`
    /// test over `|m| <= horizon`:
    /// `min_m ||2 phi - m alpha|| * (|m|+1)^tau`.
    pub fn diophantine_margin(
        &self,
        phi: f64,
        tau: f64,
        horizon: u64,
    ) -> Result<f64, ArithmeticError> {
        let d = self.depth();
        if BigInt::from(horizon) >= *self.q(d) {
            return Err(ArithmeticError::HorizonExceeded { depth: d });
        }
        let alpha = self.value_rational();
        let two_phi = BigRational::from_float(2.0 * phi).expect("finite phi");
        let mut best = f64::INFINITY;
        for m in -(horizon as i64)..=(horizon as i64) {
            let x = &two_phi - BigRational::from_integer(BigInt::from(m)) * &alpha;
            let dist = ratio_to_f64(&dist_to_integer(&x));
            let weight = ((m.unsigned_abs() + 1) as f64).powf(tau);
            best = best.min(dist * weight);
        }
        Ok(best)
    }
}

fn decimal_digits(x: &BigInt) -> u64 {
    (x.bits() as f64 * std::f64::consts::LOG10_2).ceil() as u64
}

/// `max(1, ceil(e^{beta q}/q))`, with a shifted-mantissa path once the
/// exponent leaves f64 range.
fn next_quotient(beta: f64, q: &BigInt, digit_cap: u32) -> Result<BigUint, ArithmeticError> {
    let qf = match q.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => return Err(ArithmeticError::DepthOverflow { cap: digit_cap }),
    };
    let x = beta * qf; // ln of e^{beta q}
    if x / std::f64::consts::LN_10 > digit_cap as f64 + 2.0 {
        return Err(ArithmeticError::DepthOverflow { cap: digit_cap });
    }
    let y = x - qf.ln(); // ln of e^{beta q}/q
    if y < 40.0 {
        let a = y.exp().ceil().max(1.0);
        return Ok(BigUint::from(a as u64));
    }
    // e^{beta q} / q = 2^t; split into a 52-bit mantissa and a shift
    let t = y / std::f64::consts::LN_2;
    let shift = t.floor() as u64 - 52;
    let mantissa = ((t - t.floor()).exp2() * (1u64 << 52) as f64).ceil() as u64;
    Ok(BigUint::from(mantissa) << shift)
}
