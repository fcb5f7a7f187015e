//! Dense exact linear algebra over ℚ(i).

use crate::scalar::Scalar;

pub fn mat_vec(m: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn determinant(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut det = Scalar::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Scalar::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det = &det * &pivot;
        let inv = pivot.inv().expect("nonzero pivot");
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            let (top, rest) = a.split_at_mut(r);
            for (x, p) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= &(&f * p);
            }
        }
    }
    det
}

/// Leading principal minors `det(m[..j][..j])`, `j = 1..=n`.
pub fn leading_minors(m: &[Vec<Scalar>]) -> Vec<Scalar> {
    (1..=m.len())
        .map(|j| {
            let sub: Vec<Vec<Scalar>> = m[..j].iter().map(|row| row[..j].to_vec()).collect();
            determinant(&sub)
        })
        .collect()
}

/// Some solution of `a x = b`, with free variables set to zero; `None` if inconsistent.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar], unknowns: usize) -> Option<Vec<Scalar>> {
    let mut rows: Vec<(Vec<Scalar>, Scalar)> = a.iter().cloned().zip(b.iter().cloned()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let inv = rows[r].0[col].inv().expect("nonzero pivot");
        let (row_r, rhs_r) = {
            let (coeffs, rhs) = &rows[r];
            (
                coeffs.iter().map(|c| c * &inv).collect::<Vec<_>>(),
                rhs * &inv,
            )
        };
        for (i, (coeffs, rhs)) in rows.iter_mut().enumerate() {
            if i == r || coeffs[col].is_zero() {
                continue;
            }
            let f = coeffs[col].clone();
            for (c, pr) in coeffs.iter_mut().zip(&row_r).skip(col) {
                if !pr.is_zero() {
                    *c -= &(&f * pr);
                }
            }
            *rhs -= &(&f * &rhs_r);
        }
        rows[r] = (row_r, rhs_r);
        pivots.push((r, col));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rows[r..].iter().any(|(_, rhs)| !rhs.is_zero()) {
        return None;
    }
    let mut x = vec![Scalar::zero(); unknowns];
    for (row, col) in pivots {
        x[col] = rows[row].1.clone();
    }
    Some(x)
}
