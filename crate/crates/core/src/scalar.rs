//! Scalar abstractions: the real field the numerics run over (f32 or f64)
//! and the entry type of cocycle matrices (real or complexified).

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point field for all real-valued numerics.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    const TAU: Self;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }
}

impl Real for f32 {
    const TAU: Self = std::f32::consts::TAU;
}

impl Real for f64 {
    const TAU: Self = std::f64::consts::TAU;
}

/// Entry type of a 2x2 cocycle matrix: the real field itself, or its
/// complexification when the phase carries an imaginary offset.
pub trait MatScalar:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::ops::Div<Output = Self>
{
    type R: Real;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(r: Self::R) -> Self;
    /// Squared modulus.
    fn abs_sq(self) -> Self::R;
    /// Cosine of `2*pi*(theta + i*eps)` as an entry value. For real scalars
    /// `eps` must be zero; the complex impl uses
    /// cos(x+iy) = cos x cosh y - i sin x sinh y.
    fn cos_2pi(theta: Self::R, eps: Self::R) -> Self;

    fn abs(self) -> Self::R {
        self.abs_sq().sqrt()
    }
    fn scale(self, r: Self::R) -> Self {
        self * Self::from_real(r)
    }
}

impl<R: Real> MatScalar for R {
    type R = R;

    fn zero() -> Self {
        R::zero()
    }
    fn one() -> Self {
        R::one()
    }
    fn from_real(r: R) -> Self {
        r
    }
    fn abs_sq(self) -> R {
        self * self
    }
    fn cos_2pi(theta: R, eps: R) -> Self {
        debug_assert!(eps == R::zero(), "real cocycle cannot take eps_im > 0");
        (R::TAU * theta).cos()
    }
}

impl<R: Real> MatScalar for Complex<R> {
    type R = R;

    fn zero() -> Self {
        Complex::new(R::zero(), R::zero())
    }
    fn one() -> Self {
        Complex::new(R::one(), R::zero())
    }
    fn from_real(r: R) -> Self {
        Complex::new(r, R::zero())
    }
    fn abs_sq(self) -> R {
        self.re * self.re + self.im * self.im
    }
    fn cos_2pi(theta: R, eps: R) -> Self {
        let x = R::TAU * theta;
        let y = R::TAU * eps;
        Complex::new(x.cos() * y.cosh(), -(x.sin() * y.sinh()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_cos_reduces_to_real_on_axis() {
        let z = <Complex<f64> as MatScalar>::cos_2pi(0.3, 0.0);
        assert!((z.re - (std::f64::consts::TAU * 0.3).cos()).abs() < 1e-15);
        assert_eq!(z.im, 0.0);
    }

    #[test]
    fn complex_cos_grows_on_strip() {
        // |cos 2pi(theta + i eps)| ~ e^{2 pi eps}/2 for large eps
        let eps = 2.0;
        let z = <Complex<f64> as MatScalar>::cos_2pi(0.17, eps);
        let expected = (std::f64::consts::TAU * eps).exp() / 2.0;
        assert!((z.abs() / expected - 1.0).abs() < 1e-4);
    }
}
