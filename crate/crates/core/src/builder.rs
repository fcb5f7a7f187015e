//! Local patches around the tangency curves, built from an invariant tuple,
//! and the extraction of holonomy transports back out of them.

use thiserror::Error;

use crate::bivariate::Series2;
use crate::conjugacy::Decision;
use crate::exec::Execution;
use crate::invariant::{
    check_realizability_with, decide_equivalence, BifoliatedInvariant, CheckKind, EquivalenceMode, InvariantError,
    InvariantTuple,
};
use crate::jet::{DiffeoTuple, JetDiffeo};
use crate::normal_form::{normalize_tangential, tangential_pair, NormalFormError};
use crate::scalar::Scalar;
use crate::surface::{SurfaceModel, UedaFormData};
use crate::synth;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuilderError {
    #[error("invariant is not realizable: checks {0:?} fail")]
    RealizabilityFailed(Vec<CheckKind>),
    #[error("no patch for transport index {0}")]
    NoSuchPatch(usize),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
}

/// Pair of first integrals near the zero `p_j`, written in the chart
/// coordinate `x - center`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchData {
    /// Index `j` of the zero, `2..=2g-2`.
    pub zero: usize,
    pub center: Scalar,
    pub f: Series2,
    pub g: Series2,
}

impl PatchData {
    /// `(y, b(y) + x² y^{k+1})` in the chart centered at `x = zero`.
    pub fn normal(zero: usize, k: usize, b: &JetDiffeo, x_order: usize) -> Self {
        let square = [Scalar::zero(), Scalar::zero(), Scalar::one()];
        let (f, g) = tangential_pair(b.order(), x_order, k, b, &square);
        PatchData {
            zero,
            center: Scalar::from_int(zero as i64),
            f,
            g,
        }
    }
}

/// x-order of the patches, enough for the tangential solver to recover
/// transports to the full y-order.
pub fn patch_x_order(order: usize, k: usize) -> usize {
    order.saturating_sub(k).max(3)
}

fn require_realizable(
    inv: &BifoliatedInvariant,
    k: usize,
    omega: &UedaFormData,
    surface: &SurfaceModel,
    exec: Execution,
) -> Result<(), BuilderError> {
    let report = check_realizability_with(inv, k, omega, surface, exec)?;
    if !report.passed() {
        return Err(BuilderError::RealizabilityFailed(report.failing()));
    }
    Ok(())
}

pub fn build_patches(
    inv: &BifoliatedInvariant,
    k: usize,
    omega: &UedaFormData,
    surface: &SurfaceModel,
) -> Result<Vec<PatchData>, BuilderError> {
    require_realizable(inv, k, omega, surface, Execution::default())?;
    Ok(patches_unchecked(inv, k))
}

fn patches_unchecked(inv: &BifoliatedInvariant, k: usize) -> Vec<PatchData> {
    let m = patch_x_order(inv.order(), k);
    inv.transports()
        .entries()
        .iter()
        .enumerate()
        .map(|(idx, b)| PatchData::normal(idx + 2, k, b, m))
        .collect()
}

/// The transport `b` with `(F, G) ∘ φ = (y, b(y) + a(x) y^{k+1})`.
pub fn extract_transport(p: &PatchData) -> Result<JetDiffeo, BuilderError> {
    Ok(normalize_tangential(&p.f, &p.g)?.b)
}

/// Composes a patch with a random germ fixing the curve.
pub fn perturb_patch(p: &PatchData, seed: u64) -> PatchData {
    let mut rng = synth::rng(seed ^ (p.zero as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let phi = synth::local_diffeo2(&mut rng, p.f.order_y(), p.f.order_x());
    PatchData {
        zero: p.zero,
        center: p.center.clone(),
        f: phi.pull(&p.f),
        g: phi.pull(&p.g),
    }
}

#[derive(Debug, Clone, Default)]
pub struct RoundtripOptions {
    pub seed: u64,
    pub exec: Execution,
    /// Replaces the transport of patch `idx` (0-based) after building.
    pub fault: Option<(usize, JetDiffeo)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundtripVerdict {
    Certificate(JetDiffeo),
    Mismatch {
        entry: usize,
        label: String,
        degree: Option<usize>,
        decision: Decision,
    },
}

impl RoundtripVerdict {
    pub fn certificate(&self) -> Option<&JetDiffeo> {
        match self {
            RoundtripVerdict::Certificate(psi) => Some(psi),
            RoundtripVerdict::Mismatch { .. } => None,
        }
    }
}

/// The invariant with its transports replaced by those extracted from the
/// perturbed patches, without checking realizability first.
pub fn rebuild(inv: &BifoliatedInvariant, k: usize, opts: &RoundtripOptions) -> Result<BifoliatedInvariant, BuilderError> {
    let mut patches = patches_unchecked(inv, k);
    if let Some((idx, b)) = &opts.fault {
        let p = patches.get_mut(*idx).ok_or(BuilderError::NoSuchPatch(*idx))?;
        *p = PatchData::normal(p.zero, k, b, p.f.order_x());
    }
    let extracted = opts.exec.map(&patches, |p| extract_transport(&perturb_patch(p, opts.seed)));
    let transports = extracted.into_iter().collect::<Result<Vec<_>, _>>()?;
    let transports: Vec<JetDiffeo> = transports.iter().map(|b| b.truncate(inv.order())).collect();
    Ok(inv.with_transports(DiffeoTuple::new(transports).map_err(InvariantError::from)?)?)
}

/// Builds patches, perturbs them, re-extracts the transports and compares the
/// reassembled invariant with the input.
pub fn roundtrip(
    inv: &BifoliatedInvariant,
    k: usize,
    omega: &UedaFormData,
    surface: &SurfaceModel,
    opts: &RoundtripOptions,
) -> Result<RoundtripVerdict, BuilderError> {
    require_realizable(inv, k, omega, surface, opts.exec)?;
    let rebuilt = rebuild(inv, k, opts)?;
    let decision = decide_equivalence(inv, &rebuilt, EquivalenceMode::UpToScale, opts.exec)?;
    if let Decision::Certificate(psi) = decision {
        return Ok(RoundtripVerdict::Certificate(psi));
    }
    let a = inv.concatenated();
    let b = rebuilt.concatenated();
    let (entry, degree) = a
        .entries()
        .iter()
        .zip(b.entries())
        .enumerate()
        .find_map(|(i, (x, y))| x.first_difference(y).map(|d| (i, Some(d))))
        .unwrap_or((0, None));
    Ok(RoundtripVerdict::Mismatch {
        entry,
        label: inv.labels()[entry].clone(),
        degree,
        decision,
    })
}
