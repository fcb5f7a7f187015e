//! Univariate power series truncated at an explicit order.

use std::fmt;

use thiserror::Error;

use rug::{Integer, Rational};

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("inner series of a composition must vanish at 0")]
    NonVanishingInner,
    #[error("series is not invertible under composition (zero constant term and nonzero linear term required)")]
    NotInvertible,
    #[error("series has no multiplicative inverse (zero constant term)")]
    NotAUnit,
}

/// A power series known modulo `t^(order+1)`.
///
/// Coefficients are stored for degrees `0..=order`; the constant term is
/// usually zero for the objects of this crate (germs and vector fields).
/// Binary operations truncate to the smaller of the two orders.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series {
    coeffs: Vec<Scalar>,
}

impl Series {
    /// The zero series of the given order.
    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![Scalar::zero(); order + 1],
        }
    }

    /// Builds from coefficients of degrees `0, 1, 2, ...`, padded or cut to `order`.
    pub fn from_coeffs(order: usize, coeffs: impl IntoIterator<Item = Scalar>) -> Self {
        let mut coeffs: Vec<Scalar> = coeffs.into_iter().take(order + 1).collect();
        coeffs.resize(order + 1, Scalar::zero());
        Series { coeffs }
    }

    /// Builds a series without constant term from `c_1, c_2, ...`.
    pub fn from_degree_one(order: usize, coeffs: impl IntoIterator<Item = Scalar>) -> Self {
        Series::from_coeffs(order, std::iter::once(Scalar::zero()).chain(coeffs))
    }

    pub fn from_ints(order: usize, coeffs: &[i64]) -> Self {
        Series::from_coeffs(order, coeffs.iter().map(|&c| Scalar::from_int(c)))
    }

    pub fn constant(order: usize, c: Scalar) -> Self {
        Series::from_coeffs(order, [c])
    }

    /// The series `t`.
    pub fn identity(order: usize) -> Self {
        Series::monomial(order, 1, Scalar::one())
    }

    pub fn monomial(order: usize, degree: usize, c: Scalar) -> Self {
        let mut s = Series::zero(order);
        if degree <= order {
            s.coeffs[degree] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `t^degree`; zero beyond the order.
    pub fn coeff(&self, degree: usize) -> Scalar {
        self.coeffs.get(degree).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, degree: usize) -> &Scalar {
        &self.coeffs[degree]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, degree: usize, c: Scalar) {
        if degree <= self.order() {
            self.coeffs[degree] = c;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Lowest degree with a nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Series::from_coeffs(order.min(self.order()), self.coeffs.iter().cloned())
    }

    pub fn add(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        Series {
            coeffs: (0..=n).map(|d| &self.coeffs[d] + &other.coeffs[d]).collect(),
        }
    }

    pub fn sub(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        Series {
            coeffs: (0..=n).map(|d| &self.coeffs[d] - &other.coeffs[d]).collect(),
        }
    }

    pub fn neg(&self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &Series) -> Series {
        self.mul_to(other, self.order().min(other.order()))
    }

    /// Product truncated at `order` (which must not exceed either operand's order).
    pub fn mul_to(&self, other: &Series, order: usize) -> Series {
        let (Some(va), Some(vb)) = (self.valuation(), other.valuation()) else {
            return Series::zero(order);
        };
        if va + vb > order {
            return Series::zero(order);
        }
        let a = IntPoly::new(&self.coeffs[..=order - vb]);
        let b = IntPoly::new(&other.coeffs[..=order - va]);
        let real = a.im.is_none() && b.im.is_none();
        let zero = || vec![Integer::new(); order + 1];
        let (mut re, mut im) = (zero(), zero());
        for i in va..a.re.len() {
            let (ar, ai) = (&a.re[i], a.im.as_ref().map(|v| &v[i]));
            let a_zero = ar.cmp0().is_eq() && ai.is_none_or(|x| x.cmp0().is_eq());
            if a_zero {
                continue;
            }
            for j in vb..=(order - i) {
                let (br, bi) = (&b.re[j], b.im.as_ref().map(|v| &v[j]));
                re[i + j] += ar * br;
                if real {
                    continue;
                }
                if let Some(bi) = bi {
                    im[i + j] += ar * bi;
                }
                if let Some(ai) = ai {
                    im[i + j] += ai * br;
                    if let Some(bi) = bi {
                        re[i + j] -= ai * bi;
                    }
                }
            }
        }
        let den = Integer::from(&a.den * &b.den);
        let coeffs = re
            .into_iter()
            .zip(im)
            .map(|(r, i)| {
                Scalar::new(
                    Rational::from((r, den.clone())),
                    Rational::from((i, den.clone())),
                )
            })
            .collect();
        Series { coeffs }
    }

    pub fn pow(&self, n: usize) -> Series {
        let mut acc = Series::constant(self.order(), Scalar::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal derivative; the result is known to one order less.
    pub fn derivative(&self) -> Series {
        if self.order() == 0 {
            return Series::zero(0);
        }
        Series {
            coeffs: (1..=self.order())
                .map(|d| self.coeffs[d].scale_int(d as i64))
                .collect(),
        }
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn recip(&self) -> Result<Series, SeriesError> {
        let c0_inv = self.coeffs[0].inv().ok_or(SeriesError::NotAUnit)?;
        let n = self.order();
        let mut out: Vec<Scalar> = Vec::with_capacity(n + 1);
        out.push(c0_inv.clone());
        for d in 1..=n {
            let mut acc = Scalar::zero();
            for j in 1..=d {
                if !self.coeffs[j].is_zero() {
                    acc += &(&self.coeffs[j] * &out[d - j]);
                }
            }
            out.push(-&(&acc * &c0_inv));
        }
        Ok(Series { coeffs: out })
    }

    /// `f(t)/t^k` for a series divisible by `t^k`; known to order `order - k`.
    pub fn shift_down(&self, k: usize) -> Series {
        debug_assert!(self.coeffs[..k.min(self.coeffs.len())]
            .iter()
            .all(Scalar::is_zero));
        Series {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    /// Evaluates the polynomial part at a scalar point.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    /// `f ∘ g` for `g(0) = 0`, by Horner evaluation of `f` at `g`.
    pub fn compose(&self, g: &Series) -> Result<Series, SeriesError> {
        if !g.coeffs[0].is_zero() {
            return Err(SeriesError::NonVanishingInner);
        }
        let n = self.order().min(g.order());
        let mut acc = Series::constant(n, self.coeffs[n].clone());
        for d in (0..n).rev() {
            acc = acc.mul_to(g, n);
            acc.coeffs[0] += &self.coeffs[d];
        }
        Ok(acc)
    }

    /// Compositional inverse by Lagrange inversion:
    /// `[t^n] f^{-1} = (1/n) [t^{n-1}] (t/f(t))^n`.
    pub fn comp_inverse(&self) -> Result<Series, SeriesError> {
        let n = self.order();
        if !self.coeffs[0].is_zero() || n == 0 || self.coeffs[1].is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let h = self.shift_down(1).recip()?;
        let mut out = Series::zero(n);
        let mut power = Series::constant(h.order(), Scalar::one());
        for k in 1..=n {
            power = power.mul(&h);
            out.coeffs[k] = power.coeffs[k - 1].div_int(k as i64);
        }
        Ok(out)
    }
}

/// Coefficients over a common denominator, `c_d = (re_d + i·im_d) / den`.
/// Products then accumulate in integers and reduce once per coefficient.
struct IntPoly {
    den: Integer,
    re: Vec<Integer>,
    im: Option<Vec<Integer>>,
}

impl IntPoly {
    fn new(c: &[Scalar]) -> Self {
        let mut den = Integer::from(1);
        for x in c {
            if !x.is_zero() {
                den.lcm_mut(&x.denominator_lcm());
            }
        }
        let lift = |q: &Rational| q.numer() * Integer::from(den.div_exact_ref(q.denom()));
        let re = c.iter().map(|x| lift(x.re())).collect();
        let im = (!c.iter().all(Scalar::is_real)).then(|| c.iter().map(|x| lift(x.im())).collect());
        IntPoly { den, re, im }
    }
}

/// Precomputed powers `g, g², ..., g^order` for repeated composition `h ∘ g`.
#[derive(Clone, Debug)]
pub struct PowerTable {
    powers: Vec<Series>,
}

impl PowerTable {
    pub fn new(g: &Series) -> Result<Self, SeriesError> {
        if !g.coeffs[0].is_zero() {
            return Err(SeriesError::NonVanishingInner);
        }
        let n = g.order();
        let mut powers = Vec::with_capacity(n + 1);
        powers.push(Series::constant(n, Scalar::one()));
        for k in 1..=n {
            let next = powers[k - 1].mul(g);
            powers.push(next);
        }
        Ok(PowerTable { powers })
    }

    pub fn order(&self) -> usize {
        self.powers.len() - 1
    }

    /// `h ∘ g`, truncated at the smaller order.
    pub fn compose(&self, h: &Series) -> Series {
        let n = self.order().min(h.order());
        let mut out = vec![Scalar::zero(); n + 1];
        for (k, c) in h.coeffs.iter().enumerate().take(n + 1) {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out[k..].iter_mut().zip(&self.powers[k].coeffs[k..=n]) {
                if !p.is_zero() {
                    *o += &(c * p);
                }
            }
        }
        Series { coeffs: out }
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(t^{})", self.order() + 1)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
