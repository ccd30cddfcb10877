//! Named example maps.

use crate::poly::{rat, HomPoly};
use crate::projmap::ProjectiveMap;

pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub provenance: &'static str,
    /// Post-critical set expected to be a union of hyperplanes; checked by
    /// the test suite, not assumed by the analysis.
    pub hyperplane_postcritical: bool,
    build: fn() -> ProjectiveMap,
}

impl CatalogEntry {
    pub fn map(&self) -> ProjectiveMap {
        (self.build)()
    }
}

fn v(n: usize, i: usize) -> HomPoly {
    HomPoly::var(n, i)
}

fn sq(h: HomPoly) -> HomPoly {
    h.pow(2)
}

/// `a - c * b`
fn minus(a: &HomPoly, c: i64, b: &HomPoly) -> HomPoly {
    a.sub(&b.scale(&rat(c))).unwrap()
}

fn squaring_p1() -> ProjectiveMap {
    ProjectiveMap::new(vec![sq(v(2, 0)), sq(v(2, 1))]).unwrap()
}

fn squaring_p2() -> ProjectiveMap {
    ProjectiveMap::new(vec![sq(v(3, 0)), sq(v(3, 1)), sq(v(3, 2))]).unwrap()
}

fn fs_1992_a() -> ProjectiveMap {
    let (x, y, z) = (v(3, 0), v(3, 1), v(3, 2));
    ProjectiveMap::new(vec![sq(minus(&x, 2, &y)), sq(minus(&x, 2, &z)), sq(x)]).unwrap()
}

fn chebyshev_p1() -> ProjectiveMap {
    let (s, t) = (v(2, 0), v(2, 1));
    ProjectiveMap::new(vec![minus(&sq(s), 2, &sq(t.clone())), sq(t)]).unwrap()
}

fn chebyshev_product_p2() -> ProjectiveMap {
    let (x, y, z) = (v(3, 0), v(3, 1), v(3, 2));
    let z2 = sq(z);
    ProjectiveMap::new(vec![minus(&sq(x), 2, &z2), minus(&sq(y), 2, &z2), z2]).unwrap()
}

fn basilica_squaring_p2() -> ProjectiveMap {
    let (x, y, z) = (v(3, 0), v(3, 1), v(3, 2));
    let z2 = sq(z);
    ProjectiveMap::new(vec![minus(&sq(x), 1, &z2), sq(y), z2]).unwrap()
}

pub static CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "squaring-p1",
        summary: "(s^2 : t^2) on P^1",
        provenance: "classical power map",
        hyperplane_postcritical: true,
        build: squaring_p1,
    },
    CatalogEntry {
        name: "squaring-p2",
        summary: "(x^2 : y^2 : z^2) on P^2",
        provenance: "classical power map",
        hyperplane_postcritical: true,
        build: squaring_p2,
    },
    CatalogEntry {
        name: "fs-1992-a",
        summary: "((x - 2y)^2 : (x - 2z)^2 : x^2) on P^2",
        provenance: "literature example; all dynamical claims derived by this tool, not assumed",
        hyperplane_postcritical: true,
        build: fs_1992_a,
    },
    CatalogEntry {
        name: "chebyshev-p1",
        summary: "(s^2 - 2t^2 : t^2) on P^1",
        provenance: "Chebyshev polynomial of degree 2",
        hyperplane_postcritical: true,
        build: chebyshev_p1,
    },
    CatalogEntry {
        name: "chebyshev-product-p2",
        summary: "(x^2 - 2z^2 : y^2 - 2z^2 : z^2) on P^2",
        provenance: "product of degree 2 Chebyshev polynomials",
        hyperplane_postcritical: true,
        build: chebyshev_product_p2,
    },
    CatalogEntry {
        name: "basilica-squaring-p2",
        summary: "(x^2 - z^2 : y^2 : z^2) on P^2",
        provenance: "product of z^2 - 1 and z^2",
        hyperplane_postcritical: true,
        build: basilica_squaring_p2,
    },
];

pub fn lookup(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name)
}
