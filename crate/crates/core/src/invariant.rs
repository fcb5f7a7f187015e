//! Holonomy invariants of bifoliated neighborhoods and of neighborhoods:
//! realizability, the reduction to the neighborhood invariant, and equivalence.

use std::fmt;

use thiserror::Error;

use crate::conjugacy::{decide_conjugate_tuple_with, ConjugacyError, DecideOptions, Decision};
use crate::exec::Execution;
use crate::jet::{DiffeoTuple, JetDiffeo, JetError, Tangency};
use crate::scalar::Scalar;
use crate::surface::{LoopWord, SurfaceError, SurfaceModel, UedaFormData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("{part} must have {expected} entries, got {got}")]
    WrongSize {
        part: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),
    #[error("entries have different truncation orders")]
    OrderMismatch,
    #[error("entry {0} is not tangent to the identity")]
    NotTangentToIdentity(String),
    #[error("entry {0} must be the identity in a canonical pair")]
    NotCanonicalPair(String),
    #[error("the two foliations have the same holonomy")]
    FoliationsCoincide,
    #[error("the form has non-simple zeros")]
    DegenerateOmega,
    #[error("tangency order {k} needs truncation order at least {need}, got {order}")]
    OrderTooLow { k: usize, need: usize, order: usize },
    #[error("form data is for tangency order {got}, expected {expected}")]
    IndexMismatch { expected: usize, got: usize },
    #[error("invariants have different genera: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Conjugacy(#[from] ConjugacyError),
}

fn check_part(part: &'static str, t: &DiffeoTuple, expected: usize) -> Result<(), InvariantError> {
    if t.len() != expected {
        return Err(InvariantError::WrongSize {
            part,
            expected,
            got: t.len(),
        });
    }
    Ok(())
}

fn validate(genus: usize, parts: &[&DiffeoTuple], labels: &[String]) -> Result<(), InvariantError> {
    if genus < 2 {
        return Err(InvariantError::GenusTooSmall(genus));
    }
    let order = parts[0].order();
    if parts.iter().any(|p| p.order() != order) {
        return Err(InvariantError::OrderMismatch);
    }
    let all = parts.iter().flat_map(|p| p.entries());
    for (f, label) in all.zip(labels) {
        if !f.is_tangent_to_identity() {
            return Err(InvariantError::NotTangentToIdentity(label.clone()));
        }
    }
    Ok(())
}

fn loop_labels(genus: usize) -> impl Iterator<Item = String> {
    (1..=genus).map(|i| format!("a{i}")).chain((1..=genus).map(|i| format!("b{i}")))
}

fn transport_labels(genus: usize) -> impl Iterator<Item = String> {
    (2..=2 * genus - 2).map(|j| format!("transport(1,{j})"))
}

/// Operations shared by both kinds of invariant tuple.
pub trait InvariantTuple {
    fn genus(&self) -> usize;
    fn order(&self) -> usize;
    /// All entries in a fixed order, as one tuple.
    fn concatenated(&self) -> DiffeoTuple;
    /// Human-readable name of each entry, in the order of `concatenated`.
    fn labels(&self) -> Vec<String>;
    /// Tangency order of the two foliations.
    fn ueda_index(&self) -> Result<usize, InvariantError>;
}

/// Holonomy representations of two foliations and the holonomy transports
/// between the first tangency curve and the others.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BifoliatedInvariant {
    genus: usize,
    rho_f: DiffeoTuple,
    rho_g: DiffeoTuple,
    transports: DiffeoTuple,
}

impl BifoliatedInvariant {
    pub fn new(
        genus: usize,
        rho_f: DiffeoTuple,
        rho_g: DiffeoTuple,
        transports: DiffeoTuple,
    ) -> Result<Self, InvariantError> {
        if genus < 2 {
            return Err(InvariantError::GenusTooSmall(genus));
        }
        check_part("rho_F", &rho_f, 2 * genus)?;
        check_part("rho_G", &rho_g, 2 * genus)?;
        check_part("transports", &transports, 2 * genus - 3)?;
        let inv = BifoliatedInvariant {
            genus,
            rho_f,
            rho_g,
            transports,
        };
        validate(genus, &[&inv.rho_f, &inv.rho_g, &inv.transports], &inv.labels())?;
        Ok(inv)
    }

    pub fn rho_f(&self) -> &DiffeoTuple {
        &self.rho_f
    }

    pub fn rho_g(&self) -> &DiffeoTuple {
        &self.rho_g
    }

    pub fn transports(&self) -> &DiffeoTuple {
        &self.transports
    }

    /// `ρ_G(γ) ∘ ρ_F(γ)⁻¹` for each basis loop `α_1..α_g, β_1..β_g`.
    pub fn composites(&self) -> Vec<JetDiffeo> {
        self.rho_f
            .entries()
            .iter()
            .zip(self.rho_g.entries())
            .map(|(f, g)| g.compose(&f.inverse()))
            .collect()
    }

    pub fn with_transports(&self, transports: DiffeoTuple) -> Result<Self, InvariantError> {
        BifoliatedInvariant::new(self.genus, self.rho_f.clone(), self.rho_g.clone(), transports)
    }

    /// The invariant in the coordinate `ψ(t)` on the first tangency curve.
    pub fn conjugate_by(&self, psi: &JetDiffeo) -> Self {
        BifoliatedInvariant {
            genus: self.genus,
            rho_f: self.rho_f.conjugate_by(psi),
            rho_g: self.rho_g.conjugate_by(psi),
            transports: self.transports.conjugate_by(psi),
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        BifoliatedInvariant {
            genus: self.genus,
            rho_f: self.rho_f.truncate(order),
            rho_g: self.rho_g.truncate(order),
            transports: self.transports.truncate(order),
        }
    }

    /// Rebuilds from a concatenated tuple in the order of `concatenated`.
    pub fn from_concatenated(genus: usize, t: &DiffeoTuple) -> Result<Self, InvariantError> {
        check_part("invariant", t, 6 * genus - 3)?;
        let e = t.entries();
        let part = |r: std::ops::Range<usize>| DiffeoTuple::new(e[r].to_vec());
        BifoliatedInvariant::new(
            genus,
            part(0..2 * genus)?,
            part(2 * genus..4 * genus)?,
            part(4 * genus..6 * genus - 3)?,
        )
    }
}

impl InvariantTuple for BifoliatedInvariant {
    fn genus(&self) -> usize {
        self.genus
    }

    fn order(&self) -> usize {
        self.rho_f.order()
    }

    fn concatenated(&self) -> DiffeoTuple {
        DiffeoTuple::concat(&[&self.rho_f, &self.rho_g, &self.transports]).expect("uniform order")
    }

    fn labels(&self) -> Vec<String> {
        let g = self.genus;
        loop_labels(g)
            .map(|l| format!("rho_F({l})"))
            .chain(loop_labels(g).map(|l| format!("rho_G({l})")))
            .chain(transport_labels(g))
            .collect()
    }

    fn ueda_index(&self) -> Result<usize, InvariantError> {
        min_tangency(self.composites().iter())
    }
}

fn min_tangency<'a>(jets: impl Iterator<Item = &'a JetDiffeo>) -> Result<usize, InvariantError> {
    let mut k: Option<usize> = None;
    for f in jets {
        if let Tangency::Finite(t) = f.tangency_order()? {
            k = Some(k.map_or(t, |k| k.min(t)));
        }
    }
    k.ok_or(InvariantError::FoliationsCoincide)
}

/// The data retained from a canonical bifoliated invariant: `ρ_F` on the
/// B-loops, `ρ_G` on the A-loops, and the transports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodInvariant {
    genus: usize,
    phi_f_beta: DiffeoTuple,
    phi_g_alpha: DiffeoTuple,
    transports: DiffeoTuple,
}

impl NeighborhoodInvariant {
    pub fn new(
        genus: usize,
        phi_f_beta: DiffeoTuple,
        phi_g_alpha: DiffeoTuple,
        transports: DiffeoTuple,
    ) -> Result<Self, InvariantError> {
        if genus < 2 {
            return Err(InvariantError::GenusTooSmall(genus));
        }
        check_part("phi_F", &phi_f_beta, genus)?;
        check_part("phi_G", &phi_g_alpha, genus)?;
        check_part("transports", &transports, 2 * genus - 3)?;
        let inv = NeighborhoodInvariant {
            genus,
            phi_f_beta,
            phi_g_alpha,
            transports,
        };
        validate(genus, &[&inv.phi_f_beta, &inv.phi_g_alpha, &inv.transports], &inv.labels())?;
        Ok(inv)
    }

    pub fn phi_f_beta(&self) -> &DiffeoTuple {
        &self.phi_f_beta
    }

    pub fn phi_g_alpha(&self) -> &DiffeoTuple {
        &self.phi_g_alpha
    }

    pub fn transports(&self) -> &DiffeoTuple {
        &self.transports
    }

    pub fn conjugate_by(&self, psi: &JetDiffeo) -> Self {
        NeighborhoodInvariant {
            genus: self.genus,
            phi_f_beta: self.phi_f_beta.conjugate_by(psi),
            phi_g_alpha: self.phi_g_alpha.conjugate_by(psi),
            transports: self.transports.conjugate_by(psi),
        }
    }

    pub fn from_concatenated(genus: usize, t: &DiffeoTuple) -> Result<Self, InvariantError> {
        check_part("invariant", t, 4 * genus - 3)?;
        let e = t.entries();
        let part = |r: std::ops::Range<usize>| DiffeoTuple::new(e[r].to_vec());
        NeighborhoodInvariant::new(
            genus,
            part(0..genus)?,
            part(genus..2 * genus)?,
            part(2 * genus..4 * genus - 3)?,
        )
    }
}

impl InvariantTuple for NeighborhoodInvariant {
    fn genus(&self) -> usize {
        self.genus
    }

    fn order(&self) -> usize {
        self.transports.order()
    }

    fn concatenated(&self) -> DiffeoTuple {
        DiffeoTuple::concat(&[&self.phi_f_beta, &self.phi_g_alpha, &self.transports]).expect("uniform order")
    }

    fn labels(&self) -> Vec<String> {
        let g = self.genus;
        (1..=g)
            .map(|i| format!("phi_F(b{i})"))
            .chain((1..=g).map(|i| format!("phi_G(a{i})")))
            .chain(transport_labels(g))
            .collect()
    }

    fn ueda_index(&self) -> Result<usize, InvariantError> {
        min_tangency(self.phi_f_beta.entries().iter().chain(self.phi_g_alpha.entries()))
    }
}

/// Result of evaluating the product of commutators `[ρ(α_1), ρ(β_1)] ⋯ [ρ(α_g), ρ(β_g)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    pub residual: JetDiffeo,
}

impl RelationCheck {
    pub fn passes(&self) -> bool {
        self.residual.is_identity()
    }

    /// Lowest degree at which the residual differs from the identity.
    pub fn failing_degree(&self) -> Option<usize> {
        self.residual.first_difference(&JetDiffeo::identity(self.residual.order()))
    }
}

pub fn check_surface_relation(rho: &DiffeoTuple) -> Result<RelationCheck, InvariantError> {
    if !rho.len().is_multiple_of(2) {
        return Err(InvariantError::WrongSize {
            part: "representation",
            expected: rho.len() + 1,
            got: rho.len(),
        });
    }
    let residual = LoopWord::surface_relator(rho.len() / 2).evaluate(rho.entries())?;
    Ok(RelationCheck { residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKind {
    /// Every entry is tangent to the identity at order at least `k`.
    Tangency,
    /// Leading coefficients of `ρ_G(γ) ∘ ρ_F(γ)⁻¹` are the periods of ω.
    Periods,
    /// Leading coefficients of the transports are minus the relative periods.
    Transports,
    /// Both representations satisfy the surface group relation.
    Relation,
}

impl CheckKind {
    pub const ALL: [CheckKind; 4] = [
        CheckKind::Tangency,
        CheckKind::Periods,
        CheckKind::Transports,
        CheckKind::Relation,
    ];

    pub fn numeral(self) -> &'static str {
        match self {
            CheckKind::Tangency => "i",
            CheckKind::Periods => "ii",
            CheckKind::Transports => "iii",
            CheckKind::Relation => "iv",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Tangency => "tangency",
            CheckKind::Periods => "periods",
            CheckKind::Transports => "transports",
            CheckKind::Relation => "relation",
        }
    }
}

/// One offending coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub subject: String,
    pub degree: usize,
    pub expected: Scalar,
    pub found: Scalar,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} degree {}: expected {}, found {}",
            self.subject, self.degree, self.expected, self.found
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub kind: CheckKind,
    pub failures: Vec<CheckFailure>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizabilityReport {
    pub checks: Vec<CheckResult>,
}

impl RealizabilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failing(&self) -> Vec<CheckKind> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.kind).collect()
    }

    pub fn check(&self, kind: CheckKind) -> &CheckResult {
        self.checks.iter().find(|c| c.kind == kind).expect("all kinds present")
    }
}

fn identity_coeff(degree: usize) -> Scalar {
    if degree == 1 {
        Scalar::one()
    } else {
        Scalar::zero()
    }
}

fn run_check(kind: CheckKind, inv: &BifoliatedInvariant, k: usize, omega: &UedaFormData) -> CheckResult {
    let labels = inv.labels();
    let mut failures = Vec::new();
    match kind {
        CheckKind::Tangency => {
            for (f, label) in inv.concatenated().entries().iter().zip(&labels) {
                if let Some(d) = f.first_difference(&JetDiffeo::identity(f.order())) {
                    if d <= k {
                        failures.push(CheckFailure {
                            subject: label.clone(),
                            degree: d,
                            expected: identity_coeff(d),
                            found: f.coeff(d),
                        });
                    }
                }
            }
        }
        CheckKind::Periods => {
            let periods = omega.periods();
            for ((c, p), l) in inv.composites().iter().zip(&periods).zip(loop_labels(inv.genus)) {
                let found = c.coeff(k + 1);
                if &found != p {
                    failures.push(CheckFailure {
                        subject: format!("rho_G({l}) o rho_F({l})^-1"),
                        degree: k + 1,
                        expected: p.clone(),
                        found,
                    });
                }
            }
        }
        CheckKind::Transports => {
            let labels = transport_labels(inv.genus);
            for ((f, r), l) in inv.transports.entries().iter().zip(&omega.rel_periods).zip(labels) {
                let found = f.coeff(k + 1);
                let expected = -r;
                if found != expected {
                    failures.push(CheckFailure {
                        subject: l,
                        degree: k + 1,
                        expected,
                        found,
                    });
                }
            }
        }
        CheckKind::Relation => {
            for (name, rho) in [("rho_F", &inv.rho_f), ("rho_G", &inv.rho_g)] {
                let rel = check_surface_relation(rho).expect("even size");
                if let Some(d) = rel.failing_degree() {
                    failures.push(CheckFailure {
                        subject: format!("relation of {name}"),
                        degree: d,
                        expected: identity_coeff(d),
                        found: rel.residual.coeff(d),
                    });
                }
            }
        }
    }
    CheckResult { kind, failures }
}

/// Checks whether `inv` is the invariant of a bifoliated neighborhood with
/// tangency order `k` and form `omega`.
pub fn check_realizability(
    inv: &BifoliatedInvariant,
    k: usize,
    omega: &UedaFormData,
    surface: &SurfaceModel,
) -> Result<RealizabilityReport, InvariantError> {
    check_realizability_with(inv, k, omega, surface, Execution::default())
}

pub fn check_realizability_with(
    inv: &BifoliatedInvariant,
    k: usize,
    omega: &UedaFormData,
    surface: &SurfaceModel,
    exec: Execution,
) -> Result<RealizabilityReport, InvariantError> {
    let g = inv.genus;
    if surface.genus() != g {
        return Err(InvariantError::GenusMismatch(surface.genus(), g));
    }
    if !omega.simple_zeros {
        return Err(InvariantError::DegenerateOmega);
    }
    if omega.k != k {
        return Err(InvariantError::IndexMismatch {
            expected: k,
            got: omega.k,
        });
    }
    if k == 0 || 2 * k + 1 > inv.order() {
        return Err(InvariantError::OrderTooLow {
            k,
            need: 2 * k + 1,
            order: inv.order(),
        });
    }
    for (part, v, n) in [
        ("A-periods", &omega.a_periods, g),
        ("B-periods", &omega.b_periods, g),
        ("relative periods", &omega.rel_periods, 2 * g - 3),
    ] {
        if v.len() != n {
            return Err(InvariantError::WrongSize {
                part,
                expected: n,
                got: v.len(),
            });
        }
    }
    if let Some(i) = omega.holomorphicity_defect(surface) {
        return Err(SurfaceError::HolomorphicityViolated(i).into());
    }
    let checks = exec.map(&CheckKind::ALL, |&kind| run_check(kind, inv, k, omega));
    Ok(RealizabilityReport { checks })
}

/// Restricts a canonical pair (`ρ_F` trivial on A-loops, `ρ_G` trivial on B-loops).
pub fn reduce_phi(inv: &BifoliatedInvariant) -> Result<NeighborhoodInvariant, InvariantError> {
    let g = inv.genus;
    let labels = inv.labels();
    let f = inv.rho_f.entries();
    let gg = inv.rho_g.entries();
    for i in 0..g {
        if !f[i].is_identity() {
            return Err(InvariantError::NotCanonicalPair(labels[i].clone()));
        }
    }
    for i in g..2 * g {
        if !gg[i].is_identity() {
            return Err(InvariantError::NotCanonicalPair(labels[2 * g + i].clone()));
        }
    }
    NeighborhoodInvariant::new(
        g,
        DiffeoTuple::new(f[g..].to_vec())?,
        DiffeoTuple::new(gg[..g].to_vec())?,
        inv.transports.clone(),
    )
}

/// The canonical bifoliated invariant with the given neighborhood data.
pub fn embed(n: &NeighborhoodInvariant) -> BifoliatedInvariant {
    let g = n.genus;
    let id = JetDiffeo::identity(n.order());
    let ids = || std::iter::repeat_n(id.clone(), g);
    let rho_f = ids().chain(n.phi_f_beta.entries().iter().cloned()).collect();
    let rho_g = n.phi_g_alpha.entries().iter().cloned().chain(ids()).collect();
    BifoliatedInvariant {
        genus: g,
        rho_f: DiffeoTuple::new(rho_f).expect("nonempty"),
        rho_g: DiffeoTuple::new(rho_g).expect("nonempty"),
        transports: n.transports.clone(),
    }
}

pub fn ueda_index<I: InvariantTuple>(inv: &I) -> Result<usize, InvariantError> {
    inv.ueda_index()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquivalenceMode {
    /// Any coordinate change; ω is compared up to a constant factor.
    #[default]
    UpToScale,
    /// Only coordinate changes preserving ω, i.e. with `s^k = 1`.
    FixedForm,
}

impl EquivalenceMode {
    pub fn name(self) -> &'static str {
        match self {
            EquivalenceMode::UpToScale => "up-to-scale",
            EquivalenceMode::FixedForm => "fixed-form",
        }
    }
}

/// Decides whether `b` is `a` written in another coordinate on the first tangency curve.
pub fn decide_equivalence<I: InvariantTuple>(
    a: &I,
    b: &I,
    mode: EquivalenceMode,
    exec: Execution,
) -> Result<Decision, InvariantError> {
    if a.genus() != b.genus() {
        return Err(InvariantError::GenusMismatch(a.genus(), b.genus()));
    }
    let linear_constraint = match mode {
        EquivalenceMode::UpToScale => None,
        EquivalenceMode::FixedForm => Some((a.ueda_index()?, Scalar::one())),
    };
    let opts = DecideOptions {
        exec,
        linear_constraint,
    };
    Ok(decide_conjugate_tuple_with(&a.concatenated(), &b.concatenated(), &opts)?)
}
