//! Jets of germs of diffeomorphisms of (ℂ, 0) and formal vector fields.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::series::{PowerTable, Series, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("jet must vanish at 0 and have nonzero linear term")]
    NotADiffeo,
    #[error("jet is not tangent to the identity")]
    NotTangentToIdentity,
    #[error("identity jet has no leading term")]
    IdentityHasNoLeadingTerm,
    #[error("vector field must vanish to order 2 at 0")]
    NotAFlowField,
    #[error("truncation order {order} too low for a normal form at tangency {k} (need 2k+1 <= order)")]
    OrderTooLowForNormalForm { k: usize, order: usize },
    #[error("orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("tuple is empty")]
    EmptyTuple,
}

/// Tangency order of a tangent-to-identity jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tangency {
    Finite(usize),
    /// The jet equals the identity at its truncation order.
    IdentityAtOrderN,
}

impl Tangency {
    pub fn finite(self) -> Option<usize> {
        match self {
            Tangency::Finite(k) => Some(k),
            Tangency::IdentityAtOrderN => None,
        }
    }
}

/// An invertible jet `c_1 t + c_2 t² + ...` with `c_1 ≠ 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JetDiffeo {
    series: Series,
}

impl JetDiffeo {
    pub fn new(series: Series) -> Result<Self, JetError> {
        if series.order() == 0 || !series.coeff(0).is_zero() || series.coeff(1).is_zero() {
            return Err(JetError::NotADiffeo);
        }
        Ok(JetDiffeo { series })
    }

    /// From coefficients `c_1, c_2, ...`.
    pub fn from_coeffs(order: usize, coeffs: impl IntoIterator<Item = Scalar>) -> Result<Self, JetError> {
        JetDiffeo::new(Series::from_degree_one(order, coeffs))
    }

    pub fn from_ints(order: usize, coeffs: &[i64]) -> Result<Self, JetError> {
        JetDiffeo::from_coeffs(order, coeffs.iter().map(|&c| Scalar::from_int(c)))
    }

    pub fn identity(order: usize) -> Self {
        JetDiffeo {
            series: Series::identity(order),
        }
    }

    pub fn linear(order: usize, s: Scalar) -> Result<Self, JetError> {
        JetDiffeo::new(Series::monomial(order, 1, s))
    }

    /// `t + c t^degree`.
    pub fn ti_monomial(order: usize, degree: usize, c: Scalar) -> Self {
        let mut series = Series::identity(order);
        if degree >= 2 {
            let cur = series.coeff(degree);
            series.set_coeff(degree, &cur + &c);
        }
        JetDiffeo { series }
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    pub fn into_series(self) -> Series {
        self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeff(&self, degree: usize) -> Scalar {
        self.series.coeff(degree)
    }

    pub fn coeff_ref(&self, degree: usize) -> &Scalar {
        self.series.coeff_ref(degree)
    }

    /// Coefficients `c_1..c_N`.
    pub fn coeffs_from_one(&self) -> &[Scalar] {
        &self.series.coeffs()[1..]
    }

    pub fn linear_part(&self) -> &Scalar {
        self.series.coeff_ref(1)
    }

    pub fn is_tangent_to_identity(&self) -> bool {
        self.linear_part().is_one()
    }

    pub fn is_identity(&self) -> bool {
        self.is_tangent_to_identity() && self.series.coeffs()[2..].iter().all(Scalar::is_zero)
    }

    pub fn truncate(&self, order: usize) -> JetDiffeo {
        JetDiffeo {
            series: self.series.truncate(order.max(1)),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &JetDiffeo) -> JetDiffeo {
        JetDiffeo {
            series: self
                .series
                .compose(&other.series)
                .expect("jets vanish at 0"),
        }
    }

    pub fn inverse(&self) -> JetDiffeo {
        JetDiffeo {
            series: self.series.comp_inverse().expect("jets are invertible"),
        }
    }

    /// `psi ∘ self ∘ psi⁻¹`.
    pub fn conjugate_by(&self, psi: &JetDiffeo) -> JetDiffeo {
        psi.compose(&self.compose(&psi.inverse()))
    }

    /// `f ∘ g ∘ f⁻¹ ∘ g⁻¹`.
    pub fn commutator(f: &JetDiffeo, g: &JetDiffeo) -> JetDiffeo {
        f.compose(&g.compose(&f.inverse().compose(&g.inverse())))
    }

    /// Largest `k` with `f = t mod t^{k+1}`.
    pub fn tangency_order(&self) -> Result<Tangency, JetError> {
        if !self.is_tangent_to_identity() {
            return Err(JetError::NotTangentToIdentity);
        }
        Ok(match (2..=self.order()).find(|&d| !self.series.coeff_ref(d).is_zero()) {
            Some(d) => Tangency::Finite(d - 1),
            None => Tangency::IdentityAtOrderN,
        })
    }

    /// `(k, a)` with `f = t + a t^{k+1} + ...`.
    pub fn leading_term(&self) -> Result<(usize, Scalar), JetError> {
        match self.tangency_order()? {
            Tangency::Finite(k) => Ok((k, self.coeff(k + 1))),
            Tangency::IdentityAtOrderN => Err(JetError::IdentityHasNoLeadingTerm),
        }
    }

    /// Lowest degree at which two jets differ.
    pub fn first_difference(&self, other: &JetDiffeo) -> Option<usize> {
        let n = self.order().min(other.order());
        (1..=n).find(|&d| self.series.coeff_ref(d) != other.series.coeff_ref(d))
    }
}

impl fmt::Debug for JetDiffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet({:?})", self.series)
    }
}

impl fmt::Display for JetDiffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.series)
    }
}

/// A formal vector field `v(t) ∂/∂t` with `v = v_2 t² + ... + v_N t^N`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VectorField {
    series: Series,
}

impl VectorField {
    pub fn new(series: Series) -> Result<Self, JetError> {
        if !series.coeff(0).is_zero() || !series.coeff(1).is_zero() {
            return Err(JetError::NotAFlowField);
        }
        Ok(VectorField { series })
    }

    /// From `v_2, v_3, ...`.
    pub fn from_coeffs(order: usize, coeffs: impl IntoIterator<Item = Scalar>) -> Self {
        VectorField {
            series: Series::from_coeffs(
                order,
                [Scalar::zero(), Scalar::zero()].into_iter().chain(coeffs),
            ),
        }
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeff(&self, degree: usize) -> Scalar {
        self.series.coeff(degree)
    }

    pub fn scale(&self, c: &Scalar) -> VectorField {
        VectorField {
            series: self.series.scale(c),
        }
    }

    pub fn truncate(&self, order: usize) -> VectorField {
        VectorField {
            series: self.series.truncate(order),
        }
    }

    /// `h ↦ h'·v`, exact at the order of `h` because `v` vanishes to order 2.
    pub fn lie_derivative(&self, h: &Series) -> Series {
        let n = h.order().min(self.order());
        let mut out = Series::zero(n);
        for m in 2..=n {
            let mut acc = Scalar::zero();
            for d in 1..m {
                let hd = h.coeff_ref(d);
                let vj = self.series.coeff_ref(m - d + 1);
                if !hd.is_zero() && !vj.is_zero() {
                    acc += &(hd * vj).scale_int(d as i64);
                }
            }
            out.set_coeff(m, acc);
        }
        out
    }
}

/// Time-`s` map of the flow of `v`: `Σ sⁿ/n! Dⁿ(t)` with `D h = h'·v`.
pub fn exp_flow(v: &VectorField, s: &Scalar) -> JetDiffeo {
    let n = v.order();
    let mut sum = Series::identity(n);
    let mut term = Series::identity(n);
    if s.is_zero() {
        return JetDiffeo { series: sum };
    }
    for j in 1..=n {
        term = v.lie_derivative(&term).scale(&s.div_int(j as i64));
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
    }
    JetDiffeo { series: sum }
}

/// Infinitesimal generator of a tangent-to-identity jet:
/// `v = log(C_f)(t)` where `C_f h = h ∘ f`.
pub fn log_flow(f: &JetDiffeo) -> Result<VectorField, JetError> {
    match f.tangency_order()? {
        Tangency::IdentityAtOrderN => return Err(JetError::IdentityHasNoLeadingTerm),
        Tangency::Finite(_) => {}
    }
    let table = PowerTable::new(f.series())?;
    let mut acc = Series::zero(f.order());
    let mut term = Series::identity(f.order());
    for j in 1..=f.order() {
        term = table.compose(&term).sub(&term);
        if term.is_zero() {
            break;
        }
        let c = Scalar::ratio(if j % 2 == 1 { 1 } else { -1 }, j as i64);
        acc = acc.add(&term.scale(&c));
    }
    VectorField::new(acc)
}

/// Normal form `t + a t^{k+1} + b t^{2k+1}` under tangent-to-identity conjugacy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub k: usize,
    pub a: Scalar,
    pub b: Scalar,
    /// Conjugator with `psi ∘ f ∘ psi⁻¹` equal to the normal form.
    pub psi: JetDiffeo,
}

impl CanonicalForm {
    pub fn normal_jet(&self, order: usize) -> JetDiffeo {
        let mut s = Series::identity(order);
        s.set_coeff(self.k + 1, self.a.clone());
        let cur = s.coeff(2 * self.k + 1);
        s.set_coeff(2 * self.k + 1, &cur + &self.b);
        JetDiffeo { series: s }
    }
}

pub fn canonical_form_ti(f: &JetDiffeo) -> Result<CanonicalForm, JetError> {
    let (k, a) = f.leading_term()?;
    let n = f.order();
    if 2 * k + 1 > n {
        return Err(JetError::OrderTooLowForNormalForm { k, order: n });
    }
    let mut g = f.clone();
    let mut psi = JetDiffeo::identity(n);
    for p in 2..=(n - k) {
        if p == k + 1 {
            continue;
        }
        let e = g.coeff(p + k);
        if e.is_zero() {
            continue;
        }
        let c = -&(&e / &a.scale_int(p as i64 - k as i64 - 1));
        let h = JetDiffeo::ti_monomial(n, p, c);
        g = g.conjugate_by(&h);
        psi = h.compose(&psi);
    }
    debug_assert_eq!(g.coeff(k + 1), a);
    Ok(CanonicalForm {
        k,
        a,
        b: g.coeff(2 * k + 1),
        psi,
    })
}

/// An ordered, nonempty tuple of jets with a common truncation order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffeoTuple {
    entries: Vec<JetDiffeo>,
}

impl DiffeoTuple {
    pub fn new(entries: Vec<JetDiffeo>) -> Result<Self, JetError> {
        let first = entries.first().ok_or(JetError::EmptyTuple)?;
        let n = first.order();
        if let Some(e) = entries.iter().find(|e| e.order() != n) {
            return Err(JetError::OrderMismatch(n, e.order()));
        }
        Ok(DiffeoTuple { entries })
    }

    pub fn entries(&self) -> &[JetDiffeo] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<JetDiffeo> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    pub fn conjugate_by(&self, psi: &JetDiffeo) -> DiffeoTuple {
        let inv = psi.inverse();
        DiffeoTuple {
            entries: self
                .entries
                .iter()
                .map(|e| psi.compose(&e.compose(&inv)))
                .collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> DiffeoTuple {
        DiffeoTuple {
            entries: self.entries.iter().map(|e| e.truncate(order)).collect(),
        }
    }

    pub fn concat(parts: &[&DiffeoTuple]) -> Result<DiffeoTuple, JetError> {
        DiffeoTuple::new(parts.iter().flat_map(|p| p.entries.iter().cloned()).collect())
    }
}

/// True iff all pairwise commutators are the identity jet.
pub fn is_abelian(t: &DiffeoTuple) -> bool {
    let e = t.entries();
    (0..e.len()).all(|i| ((i + 1)..e.len()).all(|j| JetDiffeo::commutator(&e[i], &e[j]).is_identity()))
}
