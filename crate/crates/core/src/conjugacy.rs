//! Simultaneous conjugacy of tuples of tangent-to-identity jets.
//!
//! For each admissible linear part `s`, a particular conjugator of the
//! driver entry (the first entry of minimal tangency) is built order by
//! order; every other conjugator of the driver differs from it by a time-`c`
//! map of the driver's generating field. The remaining entries cut `c` out
//! as the common root of polynomial constraints, obtained by interpolation.

use thiserror::Error;

use crate::exec::Execution;
use crate::jet::{exp_flow, log_flow, DiffeoTuple, JetDiffeo, JetError, Tangency};
use crate::poly::Poly;
use crate::roots::nth_roots;
use crate::scalar::Scalar;
use crate::series::Series;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConjugacyError {
    #[error("tuples have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("tuples have different orders: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("entry {entry} is not tangent to the identity")]
    NotTangentToIdentity { entry: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstructionKind {
    /// An entry and its counterpart have different tangency orders.
    TangencyMismatch,
    /// No linear part is compatible with the leading coefficients.
    LinearPart,
    /// The driver's degree-(2k+1) invariant differs.
    NormalForm,
    /// The centralizer parameter has no consistent value.
    Centralizer,
    /// A residual remains after all parameters are fixed.
    Residual,
}

impl ObstructionKind {
    pub fn name(self) -> &'static str {
        match self {
            ObstructionKind::TangencyMismatch => "tangency-mismatch",
            ObstructionKind::LinearPart => "linear-part",
            ObstructionKind::NormalForm => "normal-form",
            ObstructionKind::Centralizer => "centralizer",
            ObstructionKind::Residual => "residual",
        }
    }
}

/// How one branch (one candidate linear part) failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchFailure {
    pub linear_part: Scalar,
    pub order: usize,
    pub entry: Option<usize>,
    pub kind: ObstructionKind,
    /// Free centralizer directions left just before the failing constraint.
    pub free_parameters: usize,
    /// Nontrivial constraints on the centralizer parameter seen so far.
    pub constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    /// Lowest order at which no common conjugator exists.
    pub order: usize,
    pub entry: Option<usize>,
    pub kind: ObstructionKind,
    pub branches: Vec<BranchFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Undecided {
    /// `s^degree = value` has no solution in ℚ(i).
    RootNotInField { degree: usize, value: Scalar },
    /// The centralizer constraints leave several candidate values.
    AmbiguousCentralizer { linear_part: Scalar, candidates: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Certificate(JetDiffeo),
    Obstruction(Obstruction),
    Undecided(Undecided),
}

impl Decision {
    pub fn certificate(&self) -> Option<&JetDiffeo> {
        match self {
            Decision::Certificate(psi) => Some(psi),
            _ => None,
        }
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            Decision::Obstruction(o) => Some(o),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct DecideOptions {
    pub exec: Execution,
    /// Extra constraint `s^n = value` on the linear part of the conjugator.
    pub linear_constraint: Option<(usize, Scalar)>,
}

/// Decides whether some `ψ` satisfies `ψ ∘ A_i ∘ ψ⁻¹ = B_i` for all `i`.
pub fn decide_conjugate_tuple(a: &DiffeoTuple, b: &DiffeoTuple) -> Result<Decision, ConjugacyError> {
    decide_conjugate_tuple_with(a, b, &DecideOptions::default())
}

pub fn decide_conjugate_tuple_with(
    a: &DiffeoTuple,
    b: &DiffeoTuple,
    opts: &DecideOptions,
) -> Result<Decision, ConjugacyError> {
    if a.len() != b.len() {
        return Err(ConjugacyError::LengthMismatch(a.len(), b.len()));
    }
    if a.order() != b.order() {
        return Err(ConjugacyError::OrderMismatch(a.order(), b.order()));
    }
    if a == b {
        return Ok(Decision::Certificate(JetDiffeo::identity(a.order())));
    }
    for (idx, (x, y)) in a.entries().iter().zip(b.entries()).enumerate() {
        if !x.is_tangent_to_identity() || !y.is_tangent_to_identity() {
            return Err(ConjugacyError::NotTangentToIdentity { entry: idx });
        }
    }
    Ok(decide_ti(a.entries(), b.entries(), opts))
}

fn tangency(f: &JetDiffeo) -> Option<usize> {
    f.tangency_order().ok().and_then(Tangency::finite)
}

fn decide_ti(a: &[JetDiffeo], b: &[JetDiffeo], opts: &DecideOptions) -> Decision {
    let n = a[0].order();
    if a == b {
        return Decision::Certificate(JetDiffeo::identity(n));
    }

    // Orders at which the leading terms alone are already contradictory.
    let mut linear_failure: Option<(usize, usize, ObstructionKind)> = None;
    let mut note = |d: usize, idx: usize, kind: ObstructionKind| {
        if linear_failure.is_none_or(|(d0, i0, _)| (d, idx) < (d0, i0)) {
            linear_failure = Some((d, idx, kind));
        }
    };
    let mut active: Vec<(usize, usize)> = Vec::new();
    for (idx, (x, y)) in a.iter().zip(b).enumerate() {
        match (tangency(x), tangency(y)) {
            (None, None) => {}
            (Some(kx), Some(ky)) if kx == ky => active.push((kx, idx)),
            (kx, ky) => {
                let d = kx.unwrap_or(usize::MAX).min(ky.unwrap_or(usize::MAX)) + 1;
                note(d, idx, ObstructionKind::TangencyMismatch);
            }
        }
    }
    active.sort();

    // Combine s^{k_i} = a_A,i / a_B,i into a single s^g = R.
    let mut combined: Option<(usize, Scalar)> = opts.linear_constraint.clone();
    for &(k, idx) in &active {
        let r = &a[idx].coeff(k + 1) / &b[idx].coeff(k + 1);
        let next = match &combined {
            None => Some((k, r)),
            Some((g, big_r)) => combine_powers(*g, big_r, k, &r),
        };
        if next.is_none() {
            note(k + 1, idx, ObstructionKind::LinearPart);
            break;
        }
        combined = next;
    }

    if let Some((d, idx, kind)) = linear_failure {
        // Lower-order failures are searched on the truncation below `d`.
        if d >= 2 {
            let ta: Vec<JetDiffeo> = a.iter().map(|f| f.truncate(d - 1)).collect();
            let tb: Vec<JetDiffeo> = b.iter().map(|f| f.truncate(d - 1)).collect();
            if let Decision::Obstruction(o) = decide_ti(&ta, &tb, opts) {
                return Decision::Obstruction(o);
            }
        }
        return Decision::Obstruction(Obstruction {
            order: d,
            entry: Some(idx),
            kind,
            branches: Vec::new(),
        });
    }

    let (g, big_r) = combined.expect("a differing pair has an active entry");
    let candidates = nth_roots(&big_r, g as u32);
    if candidates.is_empty() {
        return Decision::Undecided(Undecided::RootNotInField {
            degree: g,
            value: big_r,
        });
    }
    let driver = active[0].1;
    let outcomes = opts
        .exec
        .map(&candidates, |s| run_branch(s, a, b, driver, &active));

    let mut failures = Vec::new();
    let mut undecided = None;
    for outcome in outcomes {
        match outcome {
            BranchOutcome::Certificate(psi) => return Decision::Certificate(psi),
            BranchOutcome::Failed(f) => failures.push(f),
            BranchOutcome::Undecided(u) => {
                undecided.get_or_insert(u);
            }
        }
    }
    if let Some(u) = undecided {
        return Decision::Undecided(u);
    }
    let worst = failures
        .iter()
        .max_by(|x, y| x.order.cmp(&y.order).then(y.linear_part.lex_cmp(&x.linear_part)))
        .expect("at least one branch")
        .clone();
    Decision::Obstruction(Obstruction {
        order: worst.order,
        entry: worst.entry,
        kind: worst.kind,
        branches: failures,
    })
}

/// Merges `s^g = R` with `s^k = r` into `s^{gcd} = R'`, or `None` if inconsistent.
fn combine_powers(g: usize, big_r: &Scalar, k: usize, r: &Scalar) -> Option<(usize, Scalar)> {
    let (d, u, v) = ext_gcd(g as i64, k as i64);
    let merged = &big_r.pow(u)? * &r.pow(v)?;
    let ok = merged.pow((g as i64) / d)? == *big_r && merged.pow((k as i64) / d)? == *r;
    ok.then_some((d as usize, merged))
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (d, x, y) = ext_gcd(b, a % b);
        (d, y, x - (a / b) * y)
    }
}

enum BranchOutcome {
    Certificate(JetDiffeo),
    Failed(BranchFailure),
    Undecided(Undecided),
}

/// Coefficient of `t^deg` in `ψ ∘ A − B ∘ ψ`.
fn residual_at(psi: &Series, a: &Series, b: &Series, deg: usize) -> Scalar {
    let p = psi.truncate(deg);
    let lhs = p.compose(&a.truncate(deg)).expect("vanishes at 0");
    let rhs = b.truncate(deg).compose(&p).expect("vanishes at 0");
    &lhs.coeff(deg) - &rhs.coeff(deg)
}

/// Lowest degree where `ψ ∘ A` and `B ∘ ψ` differ, up to `order`.
fn mismatch(psi: &JetDiffeo, a: &JetDiffeo, b: &JetDiffeo, order: usize) -> Option<usize> {
    let p = psi.truncate(order);
    let lhs = p.compose(&a.truncate(order));
    let rhs = b.truncate(order).compose(&p);
    lhs.first_difference(&rhs)
}

fn first_mismatch(psi: &JetDiffeo, a: &[JetDiffeo], b: &[JetDiffeo], order: usize) -> Option<(usize, usize)> {
    a.iter()
        .zip(b)
        .enumerate()
        .filter_map(|(i, (x, y))| mismatch(psi, x, y, order).map(|d| (d, i)))
        .min()
}

fn run_branch(
    s: &Scalar,
    a: &[JetDiffeo],
    b: &[JetDiffeo],
    driver: usize,
    active: &[(usize, usize)],
) -> BranchOutcome {
    let n = a[0].order();
    let (k, alpha) = a[driver].leading_term().expect("active entry");
    let ad = a[driver].series();
    let bd = b[driver].series();
    let fail = |order: usize, entry: usize, kind: ObstructionKind, free: usize, constraints: usize| {
        BranchOutcome::Failed(BranchFailure {
            linear_part: s.clone(),
            order,
            entry: Some(entry),
            kind,
            free_parameters: free,
            constraints,
        })
    };

    // Particular conjugator of the driver with the free coefficient at k+1 set to 0.
    let mut psi = Series::monomial(n, 1, s.clone());
    for m in 2..=n.saturating_sub(k) {
        let r = residual_at(&psi, ad, bd, m + k);
        if m == k + 1 {
            if !r.is_zero() {
                let p = JetDiffeo::new(psi.clone()).expect("linear part nonzero");
                let lower = first_mismatch(&p, a, b, 2 * k).filter(|&(d, _)| d <= 2 * k);
                return match lower {
                    Some((d, i)) => fail(d, i, ObstructionKind::Residual, 1, 0),
                    None => fail(2 * k + 1, driver, ObstructionKind::NormalForm, 1, 0),
                };
            }
            continue;
        }
        let c = -&(&r / &alpha.scale_int(m as i64 - k as i64 - 1));
        psi.set_coeff(m, c);
    }
    let psi_p = JetDiffeo::new(psi).expect("linear part nonzero");

    if 2 * k + 1 > n {
        return match first_mismatch(&psi_p, a, b, n) {
            None => BranchOutcome::Certificate(psi_p),
            Some((d, i)) => fail(d, i, ObstructionKind::Residual, 0, 0),
        };
    }

    let psi_inv = psi_p.inverse();
    let b_pulled: Vec<JetDiffeo> = b.iter().map(|y| psi_inv.compose(&y.compose(&psi_p))).collect();
    let d0 = a
        .iter()
        .zip(&b_pulled)
        .filter_map(|(x, y)| x.first_difference(y))
        .min();
    let Some(d0) = d0 else {
        return BranchOutcome::Certificate(psi_p);
    };
    let v = log_flow(&a[driver]).expect("driver is not the identity");
    let others: Vec<usize> = active.iter().map(|&(_, i)| i).filter(|&i| i != driver).collect();

    let mut d_max = d0;
    loop {
        match centralizer_root(&v, k, a, &b_pulled, &others, d_max) {
            CentralizerRoots::Inconsistent { degree, entry, free, constraints } => {
                return fail(degree, entry, ObstructionKind::Centralizer, free, constraints);
            }
            CentralizerRoots::Unique(c0) => {
                let psi = psi_p.compose(&exp_flow(&v, &c0));
                return match first_mismatch(&psi, a, b, n) {
                    None => BranchOutcome::Certificate(psi),
                    Some((d, i)) => fail(d, i, ObstructionKind::Residual, 0, others.len()),
                };
            }
            CentralizerRoots::Several(count) => {
                if d_max == n {
                    return BranchOutcome::Undecided(Undecided::AmbiguousCentralizer {
                        linear_part: s.clone(),
                        candidates: count,
                    });
                }
                d_max = n;
            }
        }
    }
}

enum CentralizerRoots {
    Inconsistent {
        degree: usize,
        entry: usize,
        free: usize,
        constraints: usize,
    },
    Unique(Scalar),
    Several(usize),
}

/// Solves `exp(cv) ∘ A_i ∘ exp(−cv) = B_i` in `c` through degree `d_max`.
fn centralizer_root(
    v: &crate::jet::VectorField,
    k: usize,
    a: &[JetDiffeo],
    b: &[JetDiffeo],
    others: &[usize],
    d_max: usize,
) -> CentralizerRoots {
    let samples = (d_max - 1) / k + 1;
    let v = v.truncate(d_max);
    let conjugated: Vec<Vec<JetDiffeo>> = (0..samples)
        .map(|c| {
            let c = Scalar::from_int(c as i64);
            let fwd = exp_flow(&v, &c);
            let back = exp_flow(&v, &-&c);
            others
                .iter()
                .map(|&i| fwd.compose(&a[i].truncate(d_max).compose(&back)))
                .collect()
        })
        .collect();

    let mut g = Poly::zero();
    let mut constraints = 0;
    for d in 2..=d_max {
        for (slot, &i) in others.iter().enumerate() {
            let target = b[i].coeff(d);
            let ys: Vec<Scalar> = conjugated
                .iter()
                .map(|row| &row[slot].coeff(d) - &target)
                .collect();
            let p = Poly::interpolate_at_naturals(&ys);
            if p.is_zero() {
                continue;
            }
            constraints += 1;
            let free = usize::from(g.is_zero());
            g = if g.is_zero() { p.monic() } else { g.gcd(&p) };
            if g.degree() == Some(0) {
                return CentralizerRoots::Inconsistent {
                    degree: d,
                    entry: i,
                    free,
                    constraints,
                };
            }
        }
    }
    let sf = g.squarefree();
    match sf.degree() {
        Some(1) => {
            let c = sf.coeffs();
            CentralizerRoots::Unique(-&(&c[0] / &c[1]))
        }
        Some(d) => CentralizerRoots::Several(d),
        None => CentralizerRoots::Unique(Scalar::zero()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(order: usize, c: &[i64]) -> JetDiffeo {
        JetDiffeo::from_ints(order, c).unwrap()
    }

    fn tuple(v: Vec<JetDiffeo>) -> DiffeoTuple {
        DiffeoTuple::new(v).unwrap()
    }

    #[test]
    fn equal_tuples_give_identity() {
        let a = tuple(vec![j(6, &[1, 3, 1]), j(6, &[1, 0, 2])]);
        let d = decide_conjugate_tuple(&a, &a).unwrap();
        assert!(d.certificate().unwrap().is_identity());
    }

    #[test]
    fn scaling_certificate() {
        let a = tuple(vec![j(4, &[1, 1])]);
        let b = tuple(vec![JetDiffeo::from_coeffs(4, [Scalar::one(), Scalar::ratio(1, 2)]).unwrap()]);
        let d = decide_conjugate_tuple(&a, &b).unwrap();
        assert_eq!(d.certificate(), Some(&j(4, &[2])));
    }

    #[test]
    fn order_three_obstruction() {
        let a = tuple(vec![j(5, &[1, 1]), j(5, &[1, 0, 1])]);
        let b = tuple(vec![j(5, &[1, 1]), j(5, &[1, 0, 2])]);
        let o = decide_conjugate_tuple(&a, &b).unwrap();
        let o = o.obstruction().expect("obstruction");
        assert_eq!(o.order, 3);
    }

    #[test]
    fn identity_against_nonidentity() {
        let a = tuple(vec![JetDiffeo::identity(5)]);
        let b = tuple(vec![j(5, &[1, 0, 0, 4])]);
        let o = decide_conjugate_tuple(&a, &b).unwrap();
        assert_eq!(o.obstruction().unwrap().order, 4);
    }

    #[test]
    fn root_not_in_field() {
        // s^2 = 2 has no solution in Q(i).
        let a = tuple(vec![j(6, &[1, 0, 2])]);
        let b = tuple(vec![j(6, &[1, 0, 1])]);
        assert!(matches!(
            decide_conjugate_tuple(&a, &b).unwrap(),
            Decision::Undecided(Undecided::RootNotInField { degree: 2, .. })
        ));
    }

    #[test]
    fn linear_constraint_excludes_scaling() {
        let a = tuple(vec![j(4, &[1, 1])]);
        let b = tuple(vec![JetDiffeo::from_coeffs(4, [Scalar::one(), Scalar::ratio(1, 2)]).unwrap()]);
        let opts = DecideOptions {
            linear_constraint: Some((1, Scalar::one())),
            ..Default::default()
        };
        let d = decide_conjugate_tuple_with(&a, &b, &opts).unwrap();
        assert_eq!(d.obstruction().unwrap().order, 2);
    }

    #[test]
    fn conjugated_tuple_is_recognized() {
        let a = tuple(vec![j(10, &[1, 1, 0, 2]), j(10, &[1, 0, 3, 1, -1]), j(10, &[1, 2, 1])]);
        let psi = JetDiffeo::from_coeffs(10, [Scalar::gaussian(0, 1), Scalar::from_int(2), Scalar::ratio(1, 3)]).unwrap();
        let b = a.conjugate_by(&psi);
        let d = decide_conjugate_tuple(&a, &b).unwrap();
        let cert = d.certificate().expect("certificate");
        assert_eq!(a.conjugate_by(cert), b);
    }
}
