//! Local normal forms for pairs of reduced equations of the curve `{y = 0}`.
//!
//! Both solvers first straighten `F` to `y`, leaving `G₁ = Σ g_j(x) y^j`,
//! then solve for `X = x + Σ ξ_l(x) y^l` one power of `y` at a time.

use thiserror::Error;

use crate::bivariate::{BivariateError, LocalDiffeo2, Series2};
use crate::jet::{JetDiffeo, JetError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalFormError {
    #[error("not a reduced equation of the curve")]
    NotReduced,
    #[error("the two series coincide at this truncation")]
    SeriesCoincide,
    #[error("the wedge vanishes on a transversal through the center; use the tangential form")]
    ExtraTangency,
    #[error("pair is not tangent to identity along the curve below order {k}")]
    NotTangentShape { k: usize },
    #[error("tangency divisor does not have a simple transverse component at the center")]
    WrongDivisor,
    #[error("truncation too low: need y-order >= {need_y} and total order >= {need_total}")]
    OrderTooLow { need_y: usize, need_total: usize },
    #[error(transparent)]
    Bivariate(#[from] BivariateError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Tangency data of a pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeData {
    pub k: usize,
    /// Coefficients of `a(x)` in increasing degree.
    pub a: Vec<Scalar>,
    /// `y`-order of vanishing of `dF ∧ dG`, `None` when it vanishes identically.
    pub wedge_order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub y_degree: usize,
    pub unknowns: usize,
    pub rank: usize,
    pub pivot: Scalar,
}

impl TraceStep {
    pub fn free_parameters(&self) -> usize {
        self.unknowns - self.rank
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverTrace {
    pub steps: Vec<TraceStep>,
}

impl SolverTrace {
    pub fn max_free_parameters(&self) -> usize {
        self.steps.iter().map(TraceStep::free_parameters).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct TransverseForm {
    pub k: usize,
    pub phi: LocalDiffeo2,
    pub a: Vec<Scalar>,
    pub trace: SolverTrace,
}

#[derive(Clone, Debug)]
pub struct TangentialForm {
    pub k: usize,
    pub phi: LocalDiffeo2,
    pub b: JetDiffeo,
    pub a: Vec<Scalar>,
    pub trace: SolverTrace,
}

struct Straightened {
    eta: Series2,
    g: Series2,
}

fn check_reduced(f: &Series2) -> Result<(), NormalFormError> {
    if f.order_y() == 0 || !f.slice(0).iter().all(Scalar::is_zero) || f.coeff_or_zero(0, 1).is_zero() {
        return Err(NormalFormError::NotReduced);
    }
    Ok(())
}

fn straighten(f: &Series2, g: &Series2) -> Result<Straightened, NormalFormError> {
    check_reduced(f)?;
    check_reduced(g)?;
    let eta = f.y_inverse()?;
    let x = Series2::x(f.order_y(), f.order_x());
    let g = g.compose(&x, &eta)?;
    Ok(Straightened { eta, g })
}

fn is_constant(p: &[Scalar]) -> bool {
    p.iter().skip(1).all(Scalar::is_zero)
}

fn wedge_order(g: &Series2) -> Option<usize> {
    (1..=g.order_y()).find(|&j| !is_constant(g.slice(j)))
}

fn first_deviation(g: &Series2) -> Option<usize> {
    (1..=g.order_y()).find(|&j| {
        let s = g.slice(j);
        let expected = if j == 1 { Scalar::one() } else { Scalar::zero() };
        s[0] != expected || !is_constant(s)
    })
}

fn tangency_of(g: &Series2) -> Result<(usize, Option<usize>), NormalFormError> {
    let w = wedge_order(g);
    let j = match w {
        Some(j) => j,
        None => first_deviation(g).ok_or(NormalFormError::SeriesCoincide)?,
    };
    Ok((j - 1, w))
}

/// Tangency order `k` and leading coefficient `a(x)` of a pair of reduced equations.
///
/// `k + 1` is the order of vanishing of `dF ∧ dG` along the curve; when the
/// wedge vanishes identically the first deviation of `G` from `F` is used.
pub fn wedge_tangency(f: &Series2, g: &Series2) -> Result<WedgeData, NormalFormError> {
    let s = straighten(f, g)?;
    let (k, wedge_order) = tangency_of(&s.g)?;
    Ok(WedgeData {
        k,
        a: s.g.slice(k + 1).to_vec(),
        wedge_order,
    })
}

/// Quotient of two power series in `x`, to `len` terms.
fn xdiv(num: &[Scalar], den: &[Scalar], len: usize) -> Vec<Scalar> {
    let inv0 = den[0].inv().expect("unit denominator");
    let mut q: Vec<Scalar> = Vec::with_capacity(len);
    for d in 0..len {
        let mut acc = num.get(d).cloned().unwrap_or_default();
        for (e, qe) in q.iter().enumerate() {
            if let Some(c) = den.get(d - e) {
                acc -= &(c * qe);
            }
        }
        q.push(&acc * &inv0);
    }
    q
}

fn xderivative(p: &[Scalar]) -> Vec<Scalar> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale_int(i as i64))
        .collect()
}

fn y_with_bounds(n: usize, total: usize) -> Series2 {
    let mut y = Series2::with_bounds(n, total);
    y.add_term(0, 1, &Scalar::one());
    y
}

fn x_with_bounds(n: usize, total: usize) -> Series2 {
    let mut x = Series2::with_bounds(n, total);
    x.add_term(1, 0, &Scalar::one());
    x
}

enum Shape {
    Transverse { gprime: Vec<Scalar> },
    Tangential { q: Vec<Scalar> },
}

struct Solved {
    phi: LocalDiffeo2,
    betas: Vec<Scalar>,
    trace: SolverTrace,
}

/// Solves `H̃(X, y) = a(x) + Σ β_l y^l` for `X`, with `β_l = 0` in the transverse shape.
fn solve(s: &Straightened, k: usize, shape: &Shape) -> Result<Solved, NormalFormError> {
    let h = s.g.div_y(k + 1);
    let lmax = h.order_y();
    let mut t = h.total();
    let mut xs = x_with_bounds(lmax, t);
    let mut betas = Vec::new();
    let mut trace = SolverTrace::default();
    for l in 1..=lmax {
        if l > xs.order_y() {
            break;
        }
        let comp = h.compose(&xs, &y_with_bounds(xs.order_y(), xs.total()))?;
        let r = comp.slice(l).to_vec();
        let (xi, pivot) = match shape {
            Shape::Transverse { gprime } => {
                let neg: Vec<Scalar> = r.iter().map(|c| -c).collect();
                (xdiv(&neg, gprime, r.len()), gprime[0].clone())
            }
            Shape::Tangential { q } => {
                betas.push(r[0].clone());
                let neg: Vec<Scalar> = r[1..].iter().map(|c| -c).collect();
                t -= 1;
                xs = xs.truncate(lmax, t);
                (xdiv(&neg, q, r.len() - 1), q[0].clone())
            }
        };
        let extra = usize::from(matches!(shape, Shape::Tangential { .. }));
        trace.steps.push(TraceStep {
            y_degree: l,
            unknowns: xi.len() + extra,
            rank: if pivot.is_zero() { 0 } else { xi.len() + extra },
            pivot,
        });
        if l <= xs.order_y() {
            xs.set_slice(l, &xi);
        }
    }
    let ymap = s.eta.compose(&xs, &y_with_bounds(xs.order_y(), xs.total()))?;
    let phi = LocalDiffeo2::new(xs, ymap)?;
    Ok(Solved { phi, betas, trace })
}

fn check_capacity(g: &Series2, k: usize) -> Result<(), NormalFormError> {
    let need_y = k + 2;
    let need_total = k + 3;
    if g.order_y() < need_y || g.total() < need_total {
        return Err(NormalFormError::OrderTooLow { need_y, need_total });
    }
    Ok(())
}

/// The unique `φ` fixing the curve with `(F, G)∘φ = (y, y + a(x) y^{k+1})`.
pub fn normalize_transverse(f: &Series2, g: &Series2) -> Result<TransverseForm, NormalFormError> {
    let s = straighten(f, g)?;
    let (k, _) = tangency_of(&s.g)?;
    check_capacity(&s.g, k)?;
    if first_deviation(&s.g) != Some(k + 1) {
        return Err(NormalFormError::NotTangentShape { k });
    }
    let a = s.g.slice(k + 1).to_vec();
    let gprime = xderivative(&a);
    if gprime[0].is_zero() {
        return Err(NormalFormError::ExtraTangency);
    }
    let solved = solve(&s, k, &Shape::Transverse { gprime })?;
    Ok(TransverseForm {
        k,
        phi: solved.phi,
        a,
        trace: solved.trace,
    })
}

/// The unique `φ` fixing the curve with `(F, G)∘φ = (y, b(y) + a(x) y^{k+1})`,
/// where `a` vanishes to order exactly two at the center.
pub fn normalize_tangential(f: &Series2, g: &Series2) -> Result<TangentialForm, NormalFormError> {
    let s = straighten(f, g)?;
    let (k, wedge) = tangency_of(&s.g)?;
    if wedge.is_none() {
        return Err(NormalFormError::WrongDivisor);
    }
    check_capacity(&s.g, k)?;
    let lead = s.g.slice(k + 1);
    let gprime = xderivative(lead);
    if !gprime[0].is_zero() || gprime.get(1).is_none_or(Scalar::is_zero) {
        return Err(NormalFormError::WrongDivisor);
    }
    let q = gprime[1..].to_vec();
    let solved = solve(&s, k, &Shape::Tangential { q })?;
    let mut a = lead.to_vec();
    a[0] = Scalar::zero();
    let mut b: Vec<Scalar> = (1..=k).map(|j| s.g.slice(j)[0].clone()).collect();
    b.push(lead[0].clone());
    b.extend(solved.betas);
    let b = JetDiffeo::from_coeffs(b.len(), b)?;
    Ok(TangentialForm {
        k,
        phi: solved.phi,
        b,
        a,
        trace: solved.trace,
    })
}

/// `(y, y + a(x) y^{k+1})` with y-order `n` and x-order `m`.
pub fn transverse_pair(n: usize, m: usize, k: usize, a: &[Scalar]) -> (Series2, Series2) {
    tangential_pair(n, m, k, &JetDiffeo::identity(n), a)
}

/// `(y, b(y) + a(x) y^{k+1})` with y-order `n` and x-order `m`.
pub fn tangential_pair(n: usize, m: usize, k: usize, b: &JetDiffeo, a: &[Scalar]) -> (Series2, Series2) {
    let f = Series2::y(n, m);
    let mut g = Series2::from_y_coeffs(n, m, b.series().coeffs());
    g = g.add(&Series2::from_x_poly(n, m, k + 1, a));
    (f, g)
}

/// `(F∘φ⁻¹, G∘φ⁻¹)`, so that normalizing the result returns `φ`.
pub fn push_forward(phi: &LocalDiffeo2, f: &Series2, g: &Series2) -> (Series2, Series2) {
    let inv = phi.inverse();
    (inv.pull(f), inv.pull(g))
}
