use super::{SurfaceError, SurfaceModel};
use crate::jet::{JetDiffeo, Tangency};
use crate::scalar::Scalar;

/// The Ueda index `k` and the 1-form ω, recorded through its periods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UedaFormData {
    pub k: usize,
    pub a_periods: Vec<Scalar>,
    pub b_periods: Vec<Scalar>,
    /// `∫_{γ_1j} ω` for `j = 2..2g-2`.
    pub rel_periods: Vec<Scalar>,
    pub simple_zeros: bool,
}

impl UedaFormData {
    pub fn periods(&self) -> Vec<Scalar> {
        self.a_periods.iter().chain(&self.b_periods).cloned().collect()
    }

    /// Index of the first `β_i` whose period differs from `(τ a)_i`.
    pub fn holomorphicity_defect(&self, surface: &SurfaceModel) -> Option<usize> {
        let expected = surface.tau_times(&self.a_periods);
        expected
            .iter()
            .zip(&self.b_periods)
            .position(|(x, y)| x != y)
            .map(|i| i + 1)
    }

    /// The form `c·ω`: all periods scale by `c`.
    pub fn scaled(&self, c: &Scalar) -> UedaFormData {
        let sc = |v: &[Scalar]| v.iter().map(|x| x * c).collect();
        UedaFormData {
            k: self.k,
            a_periods: sc(&self.a_periods),
            b_periods: sc(&self.b_periods),
            rel_periods: sc(&self.rel_periods),
            simple_zeros: self.simple_zeros,
        }
    }
}

/// Splits a period vector `(a, b)` as the periods of the holomorphic form with
/// A-periods `a` plus a class with vanishing A-periods.
pub fn a_normalize_class(periods: &[Scalar], surface: &SurfaceModel) -> (Vec<Scalar>, Vec<Scalar>) {
    let g = surface.genus();
    assert_eq!(periods.len(), 2 * g, "period vector must have length 2g");
    let (a, b) = periods.split_at(g);
    let ta = surface.tau_times(a);
    let normalized = std::iter::repeat_n(Scalar::zero(), g)
        .chain(b.iter().zip(&ta).map(|(x, y)| x - y))
        .collect();
    (a.to_vec(), normalized)
}

/// Reads `k` and the periods of ω off `ρ_G(γ) ∘ ρ_F(γ)⁻¹ = t + (∫_γ ω) t^{k+1} + ...`.
pub fn ueda_form_from_pair(
    rho_f: &[JetDiffeo],
    rho_g: &[JetDiffeo],
    surface: &SurfaceModel,
) -> Result<UedaFormData, SurfaceError> {
    let g = surface.genus();
    for t in [rho_f, rho_g] {
        if t.len() != 2 * g {
            return Err(SurfaceError::WrongTupleSize {
                expected: 2 * g,
                got: t.len(),
            });
        }
    }
    let composites: Vec<JetDiffeo> = rho_f
        .iter()
        .zip(rho_g)
        .map(|(f, gg)| gg.compose(&f.inverse()))
        .collect();
    let mut k = None;
    for c in &composites {
        if let Tangency::Finite(t) = c.tangency_order()? {
            k = Some(k.map_or(t, |k: usize| k.min(t)));
        }
    }
    let k = k.ok_or(SurfaceError::PairsCoincide)?;
    let periods: Vec<Scalar> = composites.iter().map(|c| c.coeff(k + 1)).collect();
    let data = UedaFormData {
        k,
        a_periods: periods[..g].to_vec(),
        b_periods: periods[g..].to_vec(),
        rel_periods: Vec::new(),
        simple_zeros: true,
    };
    if let Some(i) = data.holomorphicity_defect(surface) {
        return Err(SurfaceError::HolomorphicityViolated(i));
    }
    Ok(data)
}
