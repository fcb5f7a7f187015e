//! Bivariate truncated series in `(x, y)` and germs of diffeomorphisms of
//! `(ℂ², 0)` fixing the curve `{y = 0}` pointwise.
//!
//! A series with bounds `(n, total)` is known modulo the ideal
//! `(y^{n+1}) + (x, y)^{total+1}`: the `y^j` slice is a polynomial in `x` of
//! degree at most `total - j`. This ideal is stable under substitution of
//! maps fixing the origin, so compositions are exact within the bounds.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BivariateError {
    #[error("substituted series must vanish at the origin")]
    NonVanishingInner,
    #[error("substituted y-series must be divisible by y")]
    NotDivisibleByY,
    #[error("series is not a unit (vanishes at the origin)")]
    NotAUnit,
    #[error("map does not fix the curve y = 0 pointwise")]
    NotFixingCurve,
    #[error("map is not invertible at the origin")]
    NotInvertible,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series2 {
    n: usize,
    total: usize,
    /// `slices[j][i]` is the coefficient of `x^i y^j`.
    slices: Vec<Vec<Scalar>>,
}

impl Series2 {
    /// Zero series with y-order `n` and guaranteed x-order `m` in every slice.
    pub fn zero(n: usize, m: usize) -> Self {
        Series2::with_bounds(n, n + m)
    }

    pub fn with_bounds(n: usize, total: usize) -> Self {
        let n = n.min(total);
        Series2 {
            n,
            total,
            slices: (0..=n).map(|j| vec![Scalar::zero(); total - j + 1]).collect(),
        }
    }

    pub fn from_terms(n: usize, m: usize, terms: &[(usize, usize, Scalar)]) -> Self {
        let mut s = Series2::zero(n, m);
        for (i, j, c) in terms {
            s.add_term(*i, *j, c);
        }
        s
    }

    /// Builds from integer terms `(x-degree, y-degree, coefficient)`.
    pub fn from_int_terms(n: usize, m: usize, terms: &[(usize, usize, i64)]) -> Self {
        let terms: Vec<_> = terms.iter().map(|&(i, j, c)| (i, j, Scalar::from_int(c))).collect();
        Series2::from_terms(n, m, &terms)
    }

    pub fn x(n: usize, m: usize) -> Self {
        Series2::from_int_terms(n, m, &[(1, 0, 1)])
    }

    pub fn y(n: usize, m: usize) -> Self {
        Series2::from_int_terms(n, m, &[(0, 1, 1)])
    }

    pub fn constant(n: usize, m: usize, c: Scalar) -> Self {
        Series2::from_terms(n, m, &[(0, 0, c)])
    }

    /// `Σ c_j y^j` with constant coefficients `coeffs[j]`.
    pub fn from_y_coeffs(n: usize, m: usize, coeffs: &[Scalar]) -> Self {
        let terms: Vec<_> = coeffs.iter().enumerate().map(|(j, c)| (0, j, c.clone())).collect();
        Series2::from_terms(n, m, &terms)
    }

    /// `p(x) y^j`.
    pub fn from_x_poly(n: usize, m: usize, j: usize, p: &[Scalar]) -> Self {
        let terms: Vec<_> = p.iter().enumerate().map(|(i, c)| (i, j, c.clone())).collect();
        Series2::from_terms(n, m, &terms)
    }

    pub fn order_y(&self) -> usize {
        self.n
    }

    /// x-order guaranteed in every slice.
    pub fn order_x(&self) -> usize {
        self.total - self.n
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Coefficient of `x^i y^j`, `None` when outside the known range.
    pub fn coeff(&self, i: usize, j: usize) -> Option<&Scalar> {
        self.slices.get(j).and_then(|s| s.get(i))
    }

    pub fn coeff_or_zero(&self, i: usize, j: usize) -> Scalar {
        self.coeff(i, j).cloned().unwrap_or_default()
    }

    /// The `y^j` slice as a polynomial in `x`.
    pub fn slice(&self, j: usize) -> &[Scalar] {
        &self.slices[j]
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: &Scalar) {
        if let Some(slot) = self.slices.get_mut(j).and_then(|s| s.get_mut(i)) {
            *slot += c;
        }
    }

    pub fn set_slice(&mut self, j: usize, p: &[Scalar]) {
        if let Some(s) = self.slices.get_mut(j) {
            for (i, slot) in s.iter_mut().enumerate() {
                *slot = p.get(i).cloned().unwrap_or_default();
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().flatten().all(Scalar::is_zero)
    }

    pub fn truncate(&self, n: usize, total: usize) -> Series2 {
        let mut out = Series2::with_bounds(n.min(self.n), total.min(self.total));
        for (j, s) in out.slices.iter_mut().enumerate() {
            for (i, c) in s.iter_mut().enumerate() {
                *c = self.slices[j][i].clone();
            }
        }
        out
    }

    fn common(&self, other: &Series2) -> (usize, usize) {
        (self.n.min(other.n), self.total.min(other.total))
    }

    fn zip_with(&self, other: &Series2, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Series2 {
        let (n, total) = self.common(other);
        let mut out = Series2::with_bounds(n, total);
        for (j, s) in out.slices.iter_mut().enumerate() {
            for (i, c) in s.iter_mut().enumerate() {
                *c = f(&self.slices[j][i], &other.slices[j][i]);
            }
        }
        out
    }

    pub fn add(&self, other: &Series2) -> Series2 {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Series2) -> Series2 {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Series2 {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Series2 {
        Series2 {
            n: self.n,
            total: self.total,
            slices: self
                .slices
                .iter()
                .map(|s| s.iter().map(|x| x * c).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Series2) -> Series2 {
        let (n, total) = self.common(other);
        let mut out = Series2::with_bounds(n, total);
        for j1 in 0..=n {
            for (i1, a) in self.slices[j1].iter().enumerate() {
                if a.is_zero() || i1 + j1 > total {
                    continue;
                }
                for j2 in 0..=(n - j1) {
                    let room = total - j1 - j2;
                    if i1 > room {
                        break;
                    }
                    for (i2, b) in other.slices[j2].iter().enumerate().take(room - i1 + 1) {
                        if !b.is_zero() {
                            out.slices[j1 + j2][i1 + i2] += &(a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// `F(X, Y)` for `X(0,0) = 0` and `Y ≡ 0 mod y`.
    pub fn compose(&self, xs: &Series2, ys: &Series2) -> Result<Series2, BivariateError> {
        if !xs.coeff_or_zero(0, 0).is_zero() {
            return Err(BivariateError::NonVanishingInner);
        }
        if !ys.slices[0].iter().all(Scalar::is_zero) {
            return Err(BivariateError::NotDivisibleByY);
        }
        let n = self.n.min(xs.n).min(ys.n);
        let total = self.total.min(xs.total).min(ys.total);
        let xs = xs.truncate(n, total);
        let ys = ys.truncate(n, total);
        let mut powers = vec![Series2::constant(n, total - n, Scalar::one())];
        for i in 1..=total {
            let next = powers[i - 1].mul(&xs);
            powers.push(next);
        }
        let h = |j: usize| {
            let mut acc = Series2::with_bounds(n, total);
            for (i, c) in self.slices[j].iter().enumerate().take(total + 1) {
                if !c.is_zero() {
                    acc = acc.add(&powers[i].scale(c));
                }
            }
            acc
        };
        let mut acc = h(n);
        for j in (0..n).rev() {
            acc = acc.mul(&ys).add(&h(j));
        }
        Ok(acc)
    }

    /// `∂F/∂x`; the total bound drops by one.
    pub fn dx(&self) -> Series2 {
        let total = self.total.saturating_sub(1);
        let mut out = Series2::with_bounds(self.n, total);
        for (j, s) in out.slices.iter_mut().enumerate() {
            for (i, c) in s.iter_mut().enumerate() {
                *c = self.slices[j][i + 1].scale_int(i as i64 + 1);
            }
        }
        out
    }

    /// Quotient by `y^k`, dropping the terms of lower y-degree.
    pub fn div_y(&self, k: usize) -> Series2 {
        let mut out = Series2::with_bounds(self.n - k, self.total - k);
        for (j, s) in out.slices.iter_mut().enumerate() {
            for (i, c) in s.iter_mut().enumerate() {
                *c = self.slices[j + k][i].clone();
            }
        }
        out
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn recip(&self) -> Result<Series2, BivariateError> {
        let c0 = self.coeff_or_zero(0, 0);
        let inv0 = c0.inv().ok_or(BivariateError::NotAUnit)?;
        // 1/F = inv0 · Σ (-W)^p with W = F·inv0 - 1 in the maximal ideal.
        let one = Series2::constant(self.n, self.total - self.n, Scalar::one());
        let w = self.scale(&inv0).sub(&one);
        let neg_w = w.neg();
        let mut acc = one.clone();
        let mut term = one;
        for _ in 0..self.total {
            term = term.mul(&neg_w);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&inv0))
    }

    /// `η` with `F(x, η(x, y)) = y`, for `F = y·u` with `u(0, 0) ≠ 0`.
    pub fn y_inverse(&self) -> Result<Series2, BivariateError> {
        if !self.slices[0].iter().all(Scalar::is_zero) || self.n == 0 {
            return Err(BivariateError::NotDivisibleByY);
        }
        let w = self.div_y(1).recip()?;
        let mut out = Series2::with_bounds(self.n, self.total);
        let mut power = Series2::constant(w.n, w.total - w.n, Scalar::one());
        for l in 1..=self.n {
            power = power.mul(&w);
            let slice: Vec<Scalar> = power.slices[l - 1].iter().map(|c| c.div_int(l as i64)).collect();
            out.set_slice(l, &slice);
        }
        Ok(out)
    }

    /// Lowest y-degree at which two series differ within their common bounds.
    pub fn first_difference(&self, other: &Series2) -> Option<(usize, usize)> {
        let (n, total) = self.common(other);
        for j in 0..=n {
            for i in 0..=(total - j) {
                if self.slices[j][i] != other.slices[j][i] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Equality within the common bounds.
    pub fn agrees_with(&self, other: &Series2) -> bool {
        self.first_difference(other).is_none()
    }
}

impl fmt::Debug for Series2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(y^{}, m^{})", self.n + 1, self.total + 1)
    }
}

impl fmt::Display for Series2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, s) in self.slices.iter().enumerate() {
            for (i, c) in s.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({c})x^{i}y^{j}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A germ `(x, y) ↦ (X, Y)` with `Y ≡ 0` and `X ≡ x` modulo `y`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalDiffeo2 {
    xmap: Series2,
    ymap: Series2,
}

impl LocalDiffeo2 {
    pub fn new(xmap: Series2, ymap: Series2) -> Result<Self, BivariateError> {
        let x_slice = xmap.slice(0);
        let fixes_x = x_slice.iter().enumerate().all(|(i, c)| {
            if i == 1 {
                c.is_one()
            } else {
                c.is_zero()
            }
        });
        if !fixes_x || !ymap.slice(0).iter().all(Scalar::is_zero) {
            return Err(BivariateError::NotFixingCurve);
        }
        if ymap.order_y() == 0 || ymap.coeff_or_zero(0, 1).is_zero() {
            return Err(BivariateError::NotInvertible);
        }
        Ok(LocalDiffeo2 { xmap, ymap })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        LocalDiffeo2 {
            xmap: Series2::x(n, m),
            ymap: Series2::y(n, m),
        }
    }

    pub fn xmap(&self) -> &Series2 {
        &self.xmap
    }

    pub fn ymap(&self) -> &Series2 {
        &self.ymap
    }

    pub fn order_y(&self) -> usize {
        self.xmap.order_y().min(self.ymap.order_y())
    }

    pub fn total(&self) -> usize {
        self.xmap.total().min(self.ymap.total())
    }

    /// `F ∘ φ`.
    pub fn pull(&self, f: &Series2) -> Series2 {
        f.compose(&self.xmap, &self.ymap).expect("map fixes the origin")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LocalDiffeo2) -> LocalDiffeo2 {
        LocalDiffeo2 {
            xmap: other.pull(&self.xmap),
            ymap: other.pull(&self.ymap),
        }
    }

    pub fn is_identity(&self) -> bool {
        let n = self.order_y();
        let m = self.total() - n;
        self.xmap.agrees_with(&Series2::x(n, m)) && self.ymap.agrees_with(&Series2::y(n, m))
    }

    pub fn agrees_with(&self, other: &LocalDiffeo2) -> bool {
        self.xmap.agrees_with(&other.xmap) && self.ymap.agrees_with(&other.ymap)
    }

    pub fn truncate(&self, n: usize, total: usize) -> LocalDiffeo2 {
        LocalDiffeo2 {
            xmap: self.xmap.truncate(n, total),
            ymap: self.ymap.truncate(n, total),
        }
    }

    /// Compositional inverse, by the iteration `ψ ← ψ - L⁻¹(φ∘ψ - id)`.
    pub fn inverse(&self) -> LocalDiffeo2 {
        let n = self.order_y();
        let total = self.total();
        let m = total - n;
        let h0 = self.xmap.coeff_or_zero(0, 1);
        let u0_inv = self.ymap.coeff_or_zero(0, 1).inv().expect("invertible");
        let id = LocalDiffeo2::identity(n, m);
        let mut psi = id.clone();
        for _ in 0..=total {
            let img = self.compose(&psi);
            let ex = img.xmap.sub(&id.xmap);
            let ey = img.ymap.sub(&id.ymap);
            if ex.is_zero() && ey.is_zero() {
                break;
            }
            let ly = ey.scale(&u0_inv);
            let lx = ex.sub(&ly.scale(&h0));
            psi = LocalDiffeo2 {
                xmap: psi.xmap.sub(&lx),
                ymap: psi.ymap.sub(&ly),
            };
        }
        psi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_bounds() {
        let a = Series2::from_int_terms(3, 2, &[(1, 0, 1), (0, 1, 1)]);
        let sq = a.mul(&a);
        assert_eq!(sq.coeff_or_zero(1, 1), Scalar::from_int(2));
        assert_eq!(sq.coeff_or_zero(2, 0), Scalar::one());
        assert_eq!((sq.order_y(), sq.order_x()), (3, 2));
    }

    #[test]
    fn compose_with_identity() {
        let f = Series2::from_int_terms(4, 3, &[(0, 1, 1), (2, 1, 3), (1, 2, -1), (0, 3, 2)]);
        let id = LocalDiffeo2::identity(4, 3);
        assert_eq!(id.pull(&f), f);
    }

    #[test]
    fn y_inverse_straightens() {
        let f = Series2::from_int_terms(5, 4, &[(0, 1, 1), (1, 1, 2), (0, 2, 1), (2, 3, -1)]);
        let eta = f.y_inverse().unwrap();
        let straight = f.compose(&Series2::x(5, 4), &eta).unwrap();
        assert!(straight.agrees_with(&Series2::y(5, 4)));
    }

    #[test]
    fn diffeo_inverse() {
        let xmap = Series2::from_int_terms(4, 4, &[(1, 0, 1), (0, 1, 2), (1, 1, 1), (0, 2, -1)]);
        let ymap = Series2::from_int_terms(4, 4, &[(0, 1, 3), (1, 1, 1), (0, 2, 1)]);
        let phi = LocalDiffeo2::new(xmap, ymap).unwrap();
        let inv = phi.inverse();
        assert!(phi.compose(&inv).is_identity());
        assert!(inv.compose(&phi).is_identity());
    }

    #[test]
    fn recip_of_unit() {
        let u = Series2::from_int_terms(3, 3, &[(0, 0, 2), (1, 0, 1), (0, 1, 1)]);
        let prod = u.mul(&u.recip().unwrap());
        assert!(prod.agrees_with(&Series2::constant(3, 3, Scalar::one())));
    }

    #[test]
    fn rejects_maps_moving_the_curve() {
        let xmap = Series2::from_int_terms(3, 3, &[(1, 0, 1), (2, 0, 1)]);
        assert_eq!(
            LocalDiffeo2::new(xmap, Series2::y(3, 3)),
            Err(BivariateError::NotFixingCurve)
        );
    }
}
