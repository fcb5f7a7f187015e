//! Exact complex rationals, the coefficient field ℚ(i) of every series in the crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

pub use rug::{Integer, Rational};
use thiserror::Error;

/// An element `re + im·i` of ℚ(i). Both parts are kept as reduced fractions,
/// so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: Rational,
    im: Rational,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid scalar `{text}`: {reason}")]
pub struct ParseScalarError {
    pub text: String,
    pub reason: &'static str,
}

impl Scalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(Rational::new(), Rational::from(1))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::new(Rational::from(n), Rational::new())
    }

    pub fn gaussian(re: i64, im: i64) -> Self {
        Scalar::new(Rational::from(re), Rational::from(im))
    }

    /// `num/den` as a real scalar. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::new(Rational::from((num, den)), Rational::new())
    }

    pub fn from_real(re: Rational) -> Self {
        Scalar::new(re, Rational::new())
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.cmp0() == Ordering::Equal && self.im.cmp0() == Ordering::Equal
    }

    pub fn is_one(&self) -> bool {
        self.re == 1 && self.im.cmp0() == Ordering::Equal
    }

    pub fn is_real(&self) -> bool {
        self.im.cmp0() == Ordering::Equal
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), Rational::from(-&self.im))
    }

    /// The field norm `re² + im²`.
    pub fn norm(&self) -> Rational {
        Rational::from(self.re.square_ref()) + Rational::from(self.im.square_ref())
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_real() {
            return Some(Scalar::from_real(Rational::from(self.re.recip_ref())));
        }
        let n = self.norm();
        Some(Scalar::new(
            Rational::from(&self.re / &n),
            -Rational::from(&self.im / &n),
        ))
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, exp: i64) -> Option<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Scalar::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Some(acc)
    }

    pub fn scale_int(&self, n: i64) -> Self {
        Scalar::new(Rational::from(&self.re * n), Rational::from(&self.im * n))
    }

    pub fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        Scalar::new(Rational::from(&self.re / n), Rational::from(&self.im / n))
    }

    /// Lexicographic order on `(re, im)`; used wherever a deterministic choice is needed.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    /// Positive common denominator of both parts.
    pub fn denominator_lcm(&self) -> Integer {
        self.re.denom().clone().lcm(self.im.denom())
    }

    /// Floating approximation, for root-finding seeds only.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if *q.denom() == 1 {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            return fmt_rational(&self.re, f);
        }
        if self.re.cmp0() != Ordering::Equal {
            fmt_rational(&self.re, f)?;
            if self.im.cmp0() == Ordering::Greater {
                write!(f, "+")?;
            }
        }
        fmt_rational(&self.im, f)?;
        write!(f, "*i")
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let valid = |s: &str, signed: bool| {
        let digits = if signed {
            s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return None;
    }
    let num: Integer = num.trim_start_matches('+').parse().ok()?;
    let den: Integer = den.parse().ok()?;
    if den.cmp0() == Ordering::Equal {
        return None;
    }
    Some(Rational::from((num, den)))
}

/// Parses the imaginary coefficient in front of `*i` (or a bare sign for `i`, `-i`).
fn parse_imag(coeff: &str) -> Option<Rational> {
    match coeff {
        "" | "+" => Some(Rational::from(1)),
        "-" => Some(Rational::from(-1)),
        _ => parse_rational(coeff.strip_suffix('*')?),
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts `p`, `p/q`, `re+im*i`, `re-im*i`, `im*i`, `i` and `-i`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParseScalarError {
            text: s.to_string(),
            reason,
        };
        let text = s.trim();
        if text.is_empty() {
            return Err(err("empty"));
        }
        if let Some(body) = text.strip_suffix('i') {
            // split at the last sign that is not the leading one
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(_, c)| c == '+' || c == '-')
                .map(|(idx, _)| idx)
                .last();
            let (re_part, im_part) = match split {
                Some(idx) => (&body[..idx], &body[idx..]),
                None => ("", body),
            };
            let re = if re_part.is_empty() {
                Rational::new()
            } else {
                parse_rational(re_part).ok_or_else(|| err("bad real part"))?
            };
            let im = parse_imag(im_part).ok_or_else(|| err("bad imaginary part"))?;
            return Ok(Scalar::new(re, im));
        }
        parse_rational(text)
            .map(Scalar::from_real)
            .ok_or_else(|| err("not a rational"))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar::new(
            Rational::from(&self.re + &rhs.re),
            Rational::from(&self.im + &rhs.im),
        )
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar::new(
            Rational::from(&self.re - &rhs.re),
            Rational::from(&self.im - &rhs.im),
        )
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self.is_real(), rhs.is_real()) {
            (true, true) => Scalar::from_real(Rational::from(&self.re * &rhs.re)),
            (true, false) => Scalar::new(
                Rational::from(&self.re * &rhs.re),
                Rational::from(&self.re * &rhs.im),
            ),
            (false, true) => Scalar::new(
                Rational::from(&self.re * &rhs.re),
                Rational::from(&self.im * &rhs.re),
            ),
            (false, false) => {
                let mut re = Rational::from(&self.re * &rhs.re);
                re -= Rational::from(&self.im * &rhs.im);
                let mut im = Rational::from(&self.re * &rhs.im);
                im += Rational::from(&self.im * &rhs.re);
                Scalar::new(re, im)
            }
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero scalar");
        if rhs.is_real() {
            return Scalar::new(
                Rational::from(&self.re / &rhs.re),
                Rational::from(&self.im / &rhs.re),
            );
        }
        let n = rhs.norm();
        let p = self * &rhs.conj();
        Scalar::new(Rational::from(&p.re / &n), Rational::from(&p.im / &n))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(Rational::from(-&self.re), Rational::from(-&self.im))
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}
