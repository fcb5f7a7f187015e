//! Naive reference arithmetic and proptest strategies shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;

use nbhd_core::{JetDiffeo, Scalar, Series};

pub fn sc(s: &str) -> Scalar {
    s.parse().unwrap()
}

pub fn ints(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&c| Scalar::from_int(c)).collect()
}

/// Schoolbook product of coefficient vectors (index = degree), cut at degree `n`.
pub fn naive_mul(a: &[Scalar], b: &[Scalar], n: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `Σ f_d g^d` with explicit powers of `g`, cut at degree `n`.
pub fn naive_compose(f: &[Scalar], g: &[Scalar], n: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); n + 1];
    let mut power = vec![Scalar::zero(); n + 1];
    power[0] = Scalar::one();
    for c in f.iter().take(n + 1) {
        for (o, p) in out.iter_mut().zip(&power) {
            *o = &*o + &(c * p);
        }
        power = naive_mul(&power, g, n);
    }
    out
}

pub fn coeffs_of(f: &JetDiffeo) -> Vec<Scalar> {
    f.series().coeffs().to_vec()
}

/// Small Gaussian rationals: parts in `[-4, 4]` over denominators 1..=3.
pub fn scalar() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3).prop_map(|(a, b, c, d)| {
        &Scalar::ratio(a, b) + &(&Scalar::i() * &Scalar::ratio(c, d))
    })
}

pub fn nonzero_scalar() -> impl Strategy<Value = Scalar> {
    scalar().prop_filter("nonzero", |s| !s.is_zero())
}

/// Invertible jet of the given order.
pub fn jet(order: usize) -> impl Strategy<Value = JetDiffeo> {
    (nonzero_scalar(), prop::collection::vec(scalar(), order - 1)).prop_map(move |(c1, rest)| {
        JetDiffeo::from_coeffs(order, std::iter::once(c1).chain(rest)).unwrap()
    })
}

/// Tangent-to-identity jet of tangency exactly `k`.
pub fn ti_jet(order: usize, k: usize) -> impl Strategy<Value = JetDiffeo> {
    (nonzero_scalar(), prop::collection::vec(scalar(), order - k - 1)).prop_map(move |(lead, rest)| {
        let mut s = Series::identity(order);
        s.set_coeff(k + 1, lead);
        for (d, c) in rest.into_iter().enumerate() {
            s.set_coeff(k + 2 + d, c);
        }
        JetDiffeo::new(s).unwrap()
    })
}

/// Tangent-to-identity conjugator.
pub fn ti_conjugator(order: usize) -> impl Strategy<Value = JetDiffeo> {
    prop::collection::vec(scalar(), order - 1).prop_map(move |rest| {
        JetDiffeo::from_coeffs(order, std::iter::once(Scalar::one()).chain(rest)).unwrap()
    })
}

/// Conjugator with a Gaussian-integer linear part.
pub fn conjugator(order: usize) -> impl Strategy<Value = JetDiffeo> {
    (
        (-2i64..=2, -1i64..=1).prop_filter("nonzero", |&(a, b)| (a, b) != (0, 0)),
        prop::collection::vec(scalar(), order - 1),
    )
        .prop_map(move |((re, im), rest)| {
            JetDiffeo::from_coeffs(order, std::iter::once(Scalar::gaussian(re, im)).chain(rest)).unwrap()
        })
}
