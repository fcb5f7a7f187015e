//! Seeded random generators for jets, tuples and coordinate changes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bivariate::{LocalDiffeo2, Series2};
use crate::invariant::BifoliatedInvariant;
use crate::jet::{exp_flow, DiffeoTuple, JetDiffeo, VectorField};
use crate::scalar::Scalar;
use crate::series::Series;
use crate::surface::{SurfaceModel, UedaFormData};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small Gaussian rational: parts in `[-3, 3]`, halves allowed.
pub fn scalar<R: Rng>(rng: &mut R) -> Scalar {
    let den = if rng.gen_bool(0.25) { 2 } else { 1 };
    let re = Scalar::ratio(rng.gen_range(-3..=3), den);
    if rng.gen_bool(0.5) {
        re
    } else {
        &re + &(&Scalar::i() * &Scalar::from_int(rng.gen_range(-3..=3)))
    }
}

pub fn nonzero_scalar<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let s = scalar(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Small nonzero Gaussian integer, for linear parts of conjugators.
pub fn unit_like<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let s = Scalar::gaussian(rng.gen_range(-2..=2), rng.gen_range(-1..=1));
        if !s.is_zero() {
            return s;
        }
    }
}

/// Invertible jet with random linear part.
pub fn jet<R: Rng>(rng: &mut R, order: usize) -> JetDiffeo {
    let coeffs: Vec<Scalar> = std::iter::once(nonzero_scalar(rng))
        .chain((2..=order).map(|_| scalar(rng)))
        .collect();
    JetDiffeo::from_coeffs(order, coeffs).expect("nonzero linear part")
}

/// Conjugator with a small Gaussian-integer linear part.
pub fn conjugator<R: Rng>(rng: &mut R, order: usize) -> JetDiffeo {
    let coeffs: Vec<Scalar> = std::iter::once(unit_like(rng))
        .chain((2..=order).map(|_| scalar(rng)))
        .collect();
    JetDiffeo::from_coeffs(order, coeffs).expect("nonzero linear part")
}

/// Tangent-to-identity jet of tangency exactly `k`.
pub fn ti_jet<R: Rng>(rng: &mut R, order: usize, k: usize) -> JetDiffeo {
    let mut s = Series::identity(order);
    for d in (k + 1)..=order {
        let c = if d == k + 1 { nonzero_scalar(rng) } else { scalar(rng) };
        s.set_coeff(d, c);
    }
    JetDiffeo::new(s).expect("tangent to identity")
}

/// Tangent-to-identity jet with a prescribed degree-(k+1) coefficient (possibly zero).
pub fn ti_jet_with_leading<R: Rng>(rng: &mut R, order: usize, k: usize, lead: &Scalar) -> JetDiffeo {
    let mut s = Series::identity(order);
    s.set_coeff(k + 1, lead.clone());
    for d in (k + 2)..=order {
        s.set_coeff(d, scalar(rng));
    }
    JetDiffeo::new(s).expect("tangent to identity")
}

pub fn vector_field<R: Rng>(rng: &mut R, order: usize) -> VectorField {
    VectorField::from_coeffs(order, std::iter::once(nonzero_scalar(rng)).chain((3..=order).map(|_| scalar(rng))))
}

/// Random holomorphic form data: A-periods free, B-periods `τ a`,
/// nonzero relative periods.
pub fn ueda_form<R: Rng>(rng: &mut R, surface: &SurfaceModel, k: usize) -> UedaFormData {
    let g = surface.genus();
    let a: Vec<Scalar> = (0..g).map(|_| scalar(rng)).collect();
    UedaFormData {
        k,
        b_periods: surface.tau_times(&a),
        a_periods: a,
        rel_periods: (0..2 * g - 3).map(|_| nonzero_scalar(rng)).collect(),
        simple_zeros: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TupleShape {
    /// `ρ_F` trivial on A-loops and `ρ_G` trivial on B-loops.
    Canonical,
    /// `ρ_F` and `ρ_G` are time maps of two fixed vector fields.
    Abelian,
}

fn ti_with<R: Rng>(rng: &mut R, order: usize, k: usize, lead: &Scalar) -> JetDiffeo {
    ti_jet_with_leading(rng, order, k, lead)
}

/// Field `t^{k+1} + ...` with random higher terms.
fn field_of_order<R: Rng>(rng: &mut R, order: usize, k: usize) -> VectorField {
    let coeffs = (2..=order).map(|d| match d.cmp(&(k + 1)) {
        std::cmp::Ordering::Less => Scalar::zero(),
        std::cmp::Ordering::Equal => Scalar::one(),
        std::cmp::Ordering::Greater => scalar(rng),
    });
    VectorField::from_coeffs(order, coeffs)
}

/// A bifoliated invariant realizing `(k, omega)` at truncation `order`.
pub fn bifoliated<R: Rng>(
    rng: &mut R,
    genus: usize,
    k: usize,
    order: usize,
    omega: &UedaFormData,
    shape: TupleShape,
) -> BifoliatedInvariant {
    let periods = omega.periods();
    let id = JetDiffeo::identity(order);
    let (rho_f, rho_g): (Vec<JetDiffeo>, Vec<JetDiffeo>) = match shape {
        TupleShape::Canonical => {
            let f = (0..2 * genus)
                .map(|i| if i < genus { id.clone() } else { ti_with(rng, order, k, &-&periods[i]) })
                .collect();
            let g = (0..2 * genus)
                .map(|i| if i < genus { ti_with(rng, order, k, &periods[i]) } else { id.clone() })
                .collect();
            (f, g)
        }
        TupleShape::Abelian => {
            let v = field_of_order(rng, order, k);
            let w = field_of_order(rng, order, k);
            periods
                .iter()
                .map(|p| {
                    let c = scalar(rng);
                    (exp_flow(&v, &c), exp_flow(&w, &(&c + p)))
                })
                .unzip()
        }
    };
    let transports = omega
        .rel_periods
        .iter()
        .map(|r| ti_with(rng, order, k, &-r))
        .collect();
    let t = |v| DiffeoTuple::new(v).expect("nonempty");
    BifoliatedInvariant::new(genus, t(rho_f), t(rho_g), t(transports)).expect("valid shape")
}

/// Random germ fixing the curve `{y = 0}` pointwise, with a few low-degree terms.
pub fn local_diffeo2<R: Rng>(rng: &mut R, n: usize, m: usize) -> LocalDiffeo2 {
    let mut xmap = Series2::x(n, m);
    let mut ymap = Series2::from_terms(n, m, &[(0, 1, unit_like(rng))]);
    for (i, j) in [(0, 1), (1, 1), (0, 2), (2, 1)] {
        xmap.add_term(i, j, &scalar(rng));
    }
    for (i, j) in [(1, 1), (0, 2), (1, 2), (2, 1)] {
        ymap.add_term(i, j, &scalar(rng));
    }
    LocalDiffeo2::new(xmap, ymap).expect("fixes the curve")
}
