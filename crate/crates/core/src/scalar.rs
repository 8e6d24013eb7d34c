//! Coefficient fields for algebra elements.
//!
//! Everything above this module is generic over [`Scalar`], a complex number
//! type whose real and imaginary parts live in an ordered field
//! ([`RealScalar`]). The exact instance is `Complex<BigRational>`; the float
//! instances exist for quick numerical experiments.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// An ordered field usable as the real part of a coefficient.
pub trait RealScalar:
    Num + Clone + PartialOrd + Neg<Output = Self> + fmt::Debug + Send + Sync + 'static
{
    fn to_f64(&self) -> f64;
    fn from_i64(value: i64) -> Self;
}

impl RealScalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(value: i64) -> Self {
        value as f64
    }
}

impl RealScalar for f32 {
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
    fn from_i64(value: i64) -> Self {
        value as f32
    }
}

impl RealScalar for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }
}

/// A complex coefficient type with an involution.
pub trait Scalar: Num + Clone + Neg<Output = Self> + fmt::Debug + Send + Sync + 'static {
    type Real: RealScalar;

    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn conj(&self) -> Self;
    fn norm_sqr(&self) -> Self::Real;

    fn from_i64(re: i64, im: i64) -> Self {
        Self::from_parts(Self::Real::from_i64(re), Self::Real::from_i64(im))
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re().to_f64(), self.im().to_f64())
    }
}

impl<T: RealScalar> Scalar for Complex<T> {
    type Real = T;

    fn from_parts(re: T, im: T) -> Self {
        Complex::new(re, im)
    }
    fn re(&self) -> T {
        self.re.clone()
    }
    fn im(&self) -> T {
        self.im.clone()
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn norm_sqr(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
}

/// A non-negative real number `|z|` stored through its square, so that
/// moduli of exact complex numbers can be compared without square roots.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Magnitude<R> {
    squared: R,
}

impl<R: RealScalar> Magnitude<R> {
    pub fn zero() -> Self {
        Magnitude { squared: R::zero() }
    }

    pub fn from_squared(squared: R) -> Self {
        debug_assert!(squared >= R::zero());
        Magnitude { squared }
    }

    pub fn of<S: Scalar<Real = R>>(z: &S) -> Self {
        Magnitude { squared: z.norm_sqr() }
    }

    pub fn squared(&self) -> &R {
        &self.squared
    }

    pub fn value(&self) -> f64 {
        self.squared.to_f64().sqrt()
    }

    /// `|x|^2` as a magnitude in its own right.
    pub fn square(&self) -> Self {
        Magnitude { squared: self.squared.clone() * self.squared.clone() }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Decides `|self| <= |bound| + eps` for `eps >= 0` exactly.
    pub fn le_plus(&self, bound: &Self, eps: &R) -> bool {
        // sqrt(a) <= sqrt(b) + e  <=>  a - b - e^2 <= 2 e sqrt(b)
        let t = self.squared.clone() - bound.squared.clone() - eps.clone() * eps.clone();
        if t <= R::zero() {
            return true;
        }
        let four = R::from_i64(4);
        t.clone() * t <= four * eps.clone() * eps.clone() * bound.squared.clone()
    }

    /// Decides `|self| < |bound| + eps` for `eps >= 0` exactly.
    pub fn lt_plus(&self, bound: &Self, eps: &R) -> bool {
        let t = self.squared.clone() - bound.squared.clone() - eps.clone() * eps.clone();
        if t < R::zero() {
            return true;
        }
        let four = R::from_i64(4);
        t.clone() * t < four * eps.clone() * eps.clone() * bound.squared.clone()
    }
}

impl<R: RealScalar> fmt::Display for Magnitude<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_real(self.value()))
    }
}

/// Formats a float for reports: at most twelve decimals, trailing zeros
/// trimmed, so that `2.0000000000001` prints as `2`.
pub fn format_real(value: f64) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    let s = format!("{value:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Parses `[-]a[.b]` or `[-]p/q` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((p, q)) = body.split_once('/') {
        if !is_digits(p) || !is_digits(q) {
            return None;
        }
        let q: BigInt = q.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        BigRational::new(p.parse().ok()?, q)
    } else {
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if !is_digits(int) || !(frac.is_empty() || is_digits(frac)) || body.ends_with('.') {
            return None;
        }
        let digits: BigInt = format!("{int}{frac}").parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        BigRational::new(digits, scale)
    };
    Some(if negative { -value } else { value })
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Exact decimal rendering when the denominator divides a power of ten,
/// `p/q` otherwise. Always re-parses with [`parse_rational`].
pub fn format_rational(value: &BigRational) -> String {
    let mut den = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    let scaled = value * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let sign = if value.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    format!("{sign}{int}.{frac}")
}

/// Renders an exact complex coefficient in the `a`, `bi`, `a+bi`, `a-bi`
/// forms accepted by the element-file grammar.
pub fn format_complex(z: &Complex<BigRational>) -> String {
    if z.im.is_zero() {
        return format_rational(&z.re);
    }
    let im = if z.im.abs().is_one() {
        String::new()
    } else {
        format_rational(&z.im.abs())
    };
    if z.re.is_zero() {
        let sign = if z.im.is_negative() { "-" } else { "" };
        return format!("{sign}{im}i");
    }
    let sign = if z.im.is_negative() { '-' } else { '+' };
    format!("{}{sign}{im}i", format_rational(&z.re))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> BigRational {
        parse_rational(text).unwrap()
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(q("2"), BigRational::from_i64(2));
        assert_eq!(q("-0.25"), BigRational::new((-1).into(), 4.into()));
        assert_eq!(q("1/3"), BigRational::new(1.into(), 3.into()));
        assert!(parse_rational("1.").is_none());
        assert!(parse_rational("x").is_none());
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn rational_formatting_round_trips() {
        for text in ["0", "2", "-3.5", "0.01", "-0.125", "1/3", "-22/7", "12.0625"] {
            let value = q(text);
            assert_eq!(q(&format_rational(&value)), value, "{text}");
        }
        assert_eq!(format_rational(&q("0.010")), "0.01");
    }

    #[test]
    fn complex_formatting() {
        let z = |a: &str, b: &str| Complex::new(q(a), q(b));
        assert_eq!(format_complex(&z("1", "0")), "1");
        assert_eq!(format_complex(&z("0", "-1")), "-i");
        assert_eq!(format_complex(&z("1.5", "2")), "1.5+2i");
        assert_eq!(format_complex(&z("-1", "-0.5")), "-1-0.5i");
    }

    #[test]
    fn exact_epsilon_comparison() {
        let m = |x: i64| Magnitude::<BigRational>::from_squared(BigRational::from_i64(x));
        let eps = q("0.5");
        // 3 <= 2.5 + 0.5
        assert!(Magnitude::from_squared(q("9")).le_plus(&Magnitude::from_squared(q("6.25")), &eps));
        assert!(!Magnitude::from_squared(q("9")).lt_plus(&Magnitude::from_squared(q("6.25")), &eps));
        // sqrt(5) > sqrt(4) + 0.2
        assert!(!m(5).le_plus(&m(4), &q("0.2")));
        assert!(m(5).le_plus(&m(4), &q("0.25")));
        assert!(m(0).lt_plus(&m(0), &q("0.01")));
    }

    #[test]
    fn float_scalars_share_the_interface() {
        let z = Complex64::new(3.0, 4.0);
        assert_eq!(Magnitude::of(&z).value(), 5.0);
        assert_eq!(Scalar::conj(&z), Complex64::new(3.0, -4.0));
        let w = num_complex::Complex32::new(0.0, 2.0);
        assert_eq!(Magnitude::of(&w).value(), 2.0);
    }
}
