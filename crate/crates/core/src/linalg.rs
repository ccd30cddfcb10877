//! Small dense linear algebra over the rationals and at high precision.

use num_traits::{One, Signed, Zero};

use crate::bigfloat::{BigFloat, Cx};
use crate::mpoly::Rational;

pub type RatMatrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &RatMatrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

pub fn transpose(m: &RatMatrix) -> RatMatrix {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

/// Basis of `{x : a . x = 0}` with integer-friendly vectors
/// `a_j e_i - a_i e_j`, where `j` is the first nonzero index of `a`.
pub fn hyperplane_basis(a: &[Rational]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let j = a.iter().position(|c| !c.is_zero()).expect("nonzero form");
    let mut basis = Vec::with_capacity(n - 1);
    for i in 0..n {
        if i == j {
            continue;
        }
        let mut v = vec![Rational::zero(); n];
        v[i] = a[j].clone();
        v[j] = -a[i].clone();
        // a_j > 0 for sign-normalized forms; keep vectors primitive
        let g = content(&v);
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
        basis.push(v);
    }
    basis
}

fn content(v: &[Rational]) -> Rational {
    use num_integer::Integer;
    let mut g = num_bigint::BigInt::zero();
    let mut l = num_bigint::BigInt::one();
    for c in v {
        g = g.gcd(c.numer());
        l = l.lcm(c.denom());
    }
    if g.is_zero() {
        Rational::one()
    } else {
        Rational::new(g, l)
    }
}

/// Kernel of a matrix (as column vectors), from the reduced row echelon form.
pub fn kernel(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        let g = content(&v);
        out.push(v.iter().map(|x| x / &g).collect());
    }
    out
}

/// Solves `B c = v` for a full column rank `B`. Returns `Err(residual)`
/// when `v` is not in the column space.
pub fn solve_in_column_space(
    b: &RatMatrix,
    v: &[Rational],
) -> Result<Vec<Rational>, Vec<Rational>> {
    let rows = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    let mut aug: RatMatrix = (0..rows)
        .map(|i| {
            let mut r = b[i].clone();
            r.push(v[i].clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        // inconsistent: report v minus its best partial reconstruction
        let mut c = vec![Rational::zero(); cols];
        for (r, &pc) in pivots.iter().enumerate() {
            if pc < cols {
                c[pc] = aug[r][cols].clone();
            }
        }
        let residual = (0..rows)
            .map(|i| {
                let s: Rational = (0..cols).map(|j| &b[i][j] * &c[j]).sum();
                &v[i] - s
            })
            .collect();
        return Err(residual);
    }
    let mut c = vec![Rational::zero(); cols];
    for (r, &pc) in pivots.iter().enumerate() {
        c[pc] = aug[r][cols].clone();
    }
    Ok(c)
}

pub fn mat_vec(m: &RatMatrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Numerical rank by complete pivoting: a pivot counts when it exceeds
/// `rel_tol` times the largest entry of the matrix.
pub fn numeric_rank(m: &[Vec<Cx>], rel_tol: &BigFloat) -> usize {
    let mut a: Vec<Vec<Cx>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let scale = a
        .iter()
        .flatten()
        .map(|c| c.abs())
        .fold(None::<BigFloat>, |acc, x| match acc {
            Some(m) if m >= x => Some(m),
            _ => Some(x),
        });
    let Some(scale) = scale else { return 0 };
    if scale.is_zero() {
        return 0;
    }
    let threshold = &scale * rel_tol;
    let mut rank = 0;
    let mut used_rows = vec![false; rows];
    let mut used_cols = vec![false; cols];
    loop {
        let mut best: Option<(usize, usize, BigFloat)> = None;
        for i in (0..rows).filter(|&i| !used_rows[i]) {
            for j in (0..cols).filter(|&j| !used_cols[j]) {
                let v = a[i][j].abs();
                if best.as_ref().map_or(true, |b| v > b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((pi, pj, pv)) = best else { break };
        if pv <= threshold {
            break;
        }
        rank += 1;
        used_rows[pi] = true;
        used_cols[pj] = true;
        for i in (0..rows).filter(|&i| !used_rows[i]) {
            let f = &a[i][pj] / &a[pi][pj];
            for j in 0..cols {
                let t = &f * &a[pi][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
    }
    rank
}

/// Exact rank test helper: true when every entry is zero.
pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Normalizes a rational projective point so its first nonzero coordinate
/// is positive and the coordinates are coprime integers.
pub fn normalize_point(v: &[Rational]) -> Vec<Rational> {
    let g = content(v);
    let mut out: Vec<Rational> = v.iter().map(|x| x / &g).collect();
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in out.iter_mut() {
            *x = -x.clone();
        }
    }
    out
}
