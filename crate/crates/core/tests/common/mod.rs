#![allow(dead_code)]

use num_bigint::BigInt;
use pcflab_core::mpoly::Rational;
use pcflab_core::poly::HomPoly;
use pcflab_core::projmap::{ProjectiveMap, Validation};
use proptest::prelude::*;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exponent vectors of total degree `d` in `n` variables.
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for mut rest in monomials(n - 1, d - a) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

/// Form of degree exactly `d` with up to `max_terms` small integer terms;
/// may be zero.
pub fn form(n: usize, d: u32, max_terms: usize) -> impl Strategy<Value = HomPoly> {
    let monos = monomials(n, d);
    let count = monos.len();
    prop::collection::vec((0..count, -4i64..=4), 1..=max_terms).prop_map(move |ts| {
        HomPoly::from_terms(n, d, ts.into_iter().map(|(i, c)| (monos[i].clone(), q(c)))).unwrap()
    })
}

pub fn nonzero_form(n: usize, d: u32, max_terms: usize) -> impl Strategy<Value = HomPoly> {
    form(n, d, max_terms).prop_filter("nonzero", |f| !f.is_zero())
}

/// Nonzero form of degree between `lo` and `hi`.
pub fn any_form(n: usize, lo: u32, hi: u32, max_terms: usize) -> impl Strategy<Value = HomPoly> {
    (lo..=hi).prop_flat_map(move |d| nonzero_form(n, d, max_terms))
}

pub fn small_point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Rational::new(a.into(), b.into())).collect())
}

/// Well-defined map of degree `d` from random components.
pub fn random_map(n: usize, d: u32) -> impl Strategy<Value = ProjectiveMap> {
    prop::collection::vec(nonzero_form(n, d, 4), n).prop_filter_map("degenerate", move |comps| {
        match ProjectiveMap::validate(comps).ok()? {
            Validation::WellDefined {
                map,
                removed_factor: None,
                ..
            } if map.degree() == d => Some(map),
            _ => None,
        }
    })
}

/// Random invertible integer matrix with small entries.
pub fn invertible_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, n), n).prop_filter_map(
        "singular",
        move |rows| {
            let m: Vec<Vec<Rational>> =
                rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            (pcflab_core::linalg::rank(&m) == n).then_some(m)
        },
    )
}
