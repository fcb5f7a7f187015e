//! Roots of `s^n = r` inside ℚ(i).

use crate::scalar::{Integer, Rational, Scalar};

type Gauss = (Integer, Integer);

fn gmul(a: &Gauss, b: &Gauss) -> Gauss {
    (
        Integer::from(&a.0 * &b.0) - Integer::from(&a.1 * &b.1),
        Integer::from(&a.0 * &b.1) + Integer::from(&a.1 * &b.0),
    )
}

fn gpow(a: &Gauss, n: u32) -> Gauss {
    let mut acc: Gauss = (Integer::from(1), Integer::new());
    for _ in 0..n {
        acc = gmul(&acc, a);
    }
    acc
}

fn to_gauss_scalar(z: &Gauss) -> Scalar {
    Scalar::new(Rational::from(&z.0), Rational::from(&z.1))
}

fn round_rational(q: &Rational) -> Integer {
    // floor(q + 1/2)
    let shifted = q + Rational::from((1, 2));
    shifted.floor().into_numer_denom().0
}

/// One exact Newton step for `z^n = w`, rounded to the nearest Gaussian integer.
fn newton_step(z: &Gauss, w: &Gauss, n: u32) -> Option<Gauss> {
    let zs = to_gauss_scalar(z);
    let ws = to_gauss_scalar(w);
    let denom = zs.pow(n as i64 - 1)?;
    if denom.is_zero() {
        return None;
    }
    let next = (&zs.scale_int(n as i64 - 1) + &(&ws / &denom)).div_int(n as i64);
    Some((round_rational(next.re()), round_rational(next.im())))
}

/// All `s ∈ ℚ(i)` with `s^n = r`, sorted lexicographically on `(re, im)`.
pub fn nth_roots(r: &Scalar, n: u32) -> Vec<Scalar> {
    assert!(n >= 1, "root degree must be positive");
    if r.is_zero() {
        return vec![Scalar::zero()];
    }
    if n == 1 {
        return vec![r.clone()];
    }
    // s = z / d with z a Gaussian integer solving z^n = r d^n.
    let d = r.denominator_lcm();
    let a: Gauss = (
        Rational::from(r.re() * &d).into_numer_denom().0,
        Rational::from(r.im() * &d).into_numer_denom().0,
    );
    let dpow: Gauss = (Integer::from(rug::ops::Pow::pow(&d, n - 1)), Integer::new());
    let w = gmul(&a, &dpow);
    let norm_w = Integer::from(w.0.square_ref()) + Integer::from(w.1.square_ref());
    let norm_z = Integer::from(norm_w.root_ref(n));
    if Integer::from(rug::ops::Pow::pow(&norm_z, n)) != norm_w {
        return Vec::new();
    }

    let theta0 = w.1.to_f64().atan2(w.0.to_f64());
    let radius = norm_z.to_f64().sqrt();
    let mut found: Vec<Gauss> = Vec::new();
    for j in 0..n {
        let theta = (theta0 + 2.0 * std::f64::consts::PI * j as f64) / n as f64;
        let mut z: Gauss = (
            Integer::from_f64((radius * theta.cos()).round()).unwrap_or_default(),
            Integer::from_f64((radius * theta.sin()).round()).unwrap_or_default(),
        );
        if radius > 1e12 {
            for _ in 0..64 {
                match newton_step(&z, &w, n) {
                    Some(next) if next != z => z = next,
                    _ => break,
                }
            }
        }
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                let cand: Gauss = (Integer::from(&z.0 + dx), Integer::from(&z.1 + dy));
                if !found.contains(&cand) && gpow(&cand, n) == w {
                    found.push(cand);
                }
            }
        }
    }
    let mut roots: Vec<Scalar> = found
        .into_iter()
        .map(|(x, y)| Scalar::new(Rational::from((x, d.clone())), Rational::from((y, d.clone()))))
        .collect();
    roots.sort_by(|a, b| a.lex_cmp(b));
    roots
}

/// Whether `r` has at least one `n`-th root in ℚ(i).
pub fn has_root(r: &Scalar, n: u32) -> bool {
    !nth_roots(r, n).is_empty()
}
