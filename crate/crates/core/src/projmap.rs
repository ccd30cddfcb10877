//! Endomorphisms of projective space, their iterates, Jacobians and
//! restrictions to linear subspaces.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bigfloat::{BigFloat, Cx};
use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};
use crate::mpoly::{sylvester_resultant, MPoly, Rational};
use crate::poly::{certainly_coprime, HomPoly, NumForm};
use crate::roots;

/// Default bound on the algebraic degree of iterates.
pub const DEFAULT_DEGREE_CAP: u64 = 4096;

/// `f : P^k -> P^k` given by `k + 1` forms of a common degree.
#[derive(Clone, PartialEq, Eq)]
pub struct ProjectiveMap {
    k: usize,
    d: u32,
    comps: Vec<HomPoly>,
}

/// How well-definedness was established.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub method: String,
}

/// Why a tuple fails to define an endomorphism.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerateWitness {
    /// Common zero, exact when it could be rationalized.
    pub point: Vec<String>,
    pub exact: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub enum Validation {
    WellDefined {
        map: ProjectiveMap,
        certificate: Certificate,
        /// Common factor divided out of the input tuple, if any.
        removed_factor: Option<HomPoly>,
    },
    Degenerate(DegenerateWitness),
}

fn tuple_content(comps: &[HomPoly]) -> Rational {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for c in comps {
        for (_, q) in c.terms() {
            g = g.gcd(q.numer());
            l = l.lcm(q.denom());
        }
    }
    if g.is_zero() {
        Rational::one()
    } else {
        Rational::new(g, l)
    }
}

/// Divides out the common factor and common content; makes the first
/// nonzero component's lex-leading coefficient positive.
fn primitivize(comps: Vec<HomPoly>) -> Result<(Vec<HomPoly>, Option<HomPoly>)> {
    let mut g = HomPoly::one(comps[0].nvars());
    if !certainly_coprime(&comps) {
        g = comps[0].clone();
        for c in &comps[1..] {
            if g.is_zero() {
                g = c.clone();
            } else if !c.is_zero() {
                g = g.gcd(c)?;
            }
        }
    }
    let mut out = comps;
    let mut removed = None;
    if !g.is_zero() && g.degree() > 0 {
        out = out
            .iter()
            .map(|c| c.exact_divide(&g).map(|q| q.expect("gcd divides")))
            .collect::<Result<_>>()?;
        removed = Some(g);
    }
    let mut content = tuple_content(&out);
    if let Some(first) = out.iter().find(|c| !c.is_zero()) {
        if first.terms().next_back().is_some_and(|(_, c)| c.is_negative()) {
            content = -content;
        }
    }
    let inv = Rational::one() / content;
    Ok((out.iter().map(|c| c.scale(&inv)).collect(), removed))
}

impl ProjectiveMap {
    /// Builds a map from forms without the nondegeneracy check; the tuple is
    /// primitivized.
    pub fn from_forms(comps: Vec<HomPoly>) -> Result<Self> {
        let k = check_shape(&comps)?;
        let (comps, _) = primitivize(comps)?;
        let d = comps[0].degree();
        Ok(ProjectiveMap { k, d, comps })
    }

    /// Validates a candidate tuple: primitivizes it, then certifies that
    /// the forms have no common zero besides the origin.
    pub fn validate(comps: Vec<HomPoly>) -> Result<Validation> {
        let k = check_shape(&comps)?;
        if comps.iter().all(|c| c.is_zero()) {
            return Ok(Validation::Degenerate(DegenerateWitness {
                point: vec![],
                exact: true,
                detail: "all components vanish identically".into(),
            }));
        }
        if let Some(i) = comps.iter().position(|c| c.is_zero()) {
            // k forms in k+1 variables always share a projective zero
            let others: Vec<HomPoly> = comps
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| c.clone())
                .collect();
            let w = find_common_zero(&others, k)?
                .unwrap_or_else(|| DegenerateWitness {
                    point: vec![],
                    exact: false,
                    detail: String::new(),
                });
            return Ok(Validation::Degenerate(DegenerateWitness {
                detail: format!("component {i} vanishes identically"),
                ..w
            }));
        }
        let (comps, removed) = primitivize(comps)?;
        let d = comps[0].degree();
        let map = ProjectiveMap { k, d, comps };
        if d == 0 {
            return Ok(Validation::WellDefined {
                map,
                certificate: Certificate {
                    method: "constant tuple after removing the common factor".into(),
                },
                removed_factor: removed,
            });
        }
        match k {
            1 => {
                let r = sylvester_resultant(
                    map.comps[0].as_mpoly(),
                    map.comps[1].as_mpoly(),
                    0,
                    d,
                    d,
                );
                if r.is_zero() {
                    // unreachable for a primitive pair, kept as a guard
                    let w = find_common_zero(&map.comps, 1)?;
                    return Ok(Validation::Degenerate(w.unwrap_or(DegenerateWitness {
                        point: vec![],
                        exact: false,
                        detail: "binary resultant vanishes".into(),
                    })));
                }
                Ok(Validation::WellDefined {
                    map,
                    certificate: Certificate {
                        method: "nonzero binary resultant".into(),
                    },
                    removed_factor: removed,
                })
            }
            2 => {
                if let Some(method) = certify_plane(&map.comps) {
                    return Ok(Validation::WellDefined {
                        map,
                        certificate: Certificate { method },
                        removed_factor: removed,
                    });
                }
                match find_common_zero(&map.comps, 2)? {
                    Some(w) => Ok(Validation::Degenerate(w)),
                    None => Ok(Validation::WellDefined {
                        map,
                        certificate: Certificate {
                            method: "no common zero found by numerical search (uncertified)"
                                .into(),
                        },
                        removed_factor: removed,
                    }),
                }
            }
            _ => Err(Error::Unsupported(format!(
                "nondegeneracy check for P^{k}"
            ))),
        }
    }

    /// Validates and unwraps a well-defined map.
    pub fn new(comps: Vec<HomPoly>) -> Result<Self> {
        match Self::validate(comps)? {
            Validation::WellDefined { map, .. } => Ok(map),
            Validation::Degenerate(w) => Err(Error::Invalid(format!(
                "degenerate map: common zero ({}) {}",
                w.point.join(":"),
                w.detail
            ))),
        }
    }

    /// Errors unless the degree allows post-critical analysis.
    pub fn require_degree_two(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::LowDegree(self.d));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn comps(&self) -> &[HomPoly] {
        &self.comps
    }

    pub fn nvars(&self) -> usize {
        self.k + 1
    }

    /// `f^n`, primitivized.
    pub fn iterate(&self, n: u32) -> Result<Self> {
        self.iterate_capped(n, DEFAULT_DEGREE_CAP)
    }

    pub fn iterate_capped(&self, n: u32, cap: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("iterate exponent must be positive".into()));
        }
        let needed = (self.d as u64).checked_pow(n).unwrap_or(u64::MAX);
        if needed > cap {
            return Err(Error::DegreeCap { needed, cap });
        }
        let mut g = self.clone();
        for _ in 1..n {
            g = self.after(&g)?;
        }
        Ok(g)
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &ProjectiveMap) -> Result<Self> {
        if inner.k != self.k {
            return Err(Error::VarCountMismatch(inner.nvars(), self.nvars()));
        }
        let comps = self
            .comps
            .iter()
            .map(|c| c.compose(&inner.comps))
            .collect::<Result<Vec<_>>>()?;
        Self::from_forms(comps)
    }

    /// Determinant of the matrix of partial derivatives.
    pub fn jacobian_det(&self) -> HomPoly {
        let n = self.nvars();
        let m: Vec<Vec<HomPoly>> = self
            .comps
            .iter()
            .map(|c| (0..n).map(|j| c.partial(j).expect("index in range")).collect())
            .collect();
        let deg = (n as u32) * self.d.saturating_sub(1);
        let det = laplace_det(&m);
        if det.is_zero() {
            HomPoly::zero(n, deg)
        } else {
            det
        }
    }

    /// Matrix of partial derivatives.
    pub fn jacobian_matrix(&self) -> Vec<Vec<HomPoly>> {
        let n = self.nvars();
        self.comps
            .iter()
            .map(|c| (0..n).map(|j| c.partial(j).expect("index in range")).collect())
            .collect()
    }

    /// The map `g` on `P^r` with `B g(s) = f(A s)`.
    pub fn restrict(&self, a: &LinearEmbedding, b: &LinearEmbedding) -> Result<ProjectiveMap> {
        if a.ambient_dim() != self.k || b.ambient_dim() != self.k {
            return Err(Error::VarCountMismatch(a.rows(), self.nvars()));
        }
        if a.dim() != b.dim() {
            return Err(Error::Invalid(format!(
                "source and target subspaces have dimensions {} and {}",
                a.dim(),
                b.dim()
            )));
        }
        let r1 = a.dim() + 1;
        let subs = a.coordinate_forms();
        let pulled: Vec<HomPoly> = self
            .comps
            .iter()
            .map(|c| c.compose(&subs))
            .collect::<Result<_>>()?;
        let mut monos: Vec<Vec<u32>> = pulled
            .iter()
            .flat_map(|p| p.terms().map(|(e, _)| e.clone()))
            .collect();
        monos.sort();
        monos.dedup();
        let mut out_terms: Vec<Vec<(Vec<u32>, Rational)>> = vec![Vec::new(); r1];
        for mono in monos {
            let v: Vec<Rational> = pulled.iter().map(|p| p.coefficient(&mono)).collect();
            match linalg::solve_in_column_space(&b.matrix, &v) {
                Ok(c) => {
                    for (j, cj) in c.into_iter().enumerate() {
                        if !cj.is_zero() {
                            out_terms[j].push((mono.clone(), cj));
                        }
                    }
                }
                Err(residual) => {
                    let res: Vec<String> = residual.iter().map(|x| x.to_string()).collect();
                    return Err(Error::NotInvariant(format!(
                        "coefficient vector of monomial {mono:?} leaves the target span, residual ({})",
                        res.join(", ")
                    )));
                }
            }
        }
        let comps = out_terms
            .into_iter()
            .map(|t| HomPoly::from_terms(r1, self.d, t))
            .collect::<Result<Vec<_>>>()?;
        if comps.iter().all(|c| c.is_zero()) {
            return Err(Error::Invalid("restriction vanishes identically".into()));
        }
        Self::from_forms(comps)
    }

    /// Topological degree of a map on `P^1`: the degree of the primitive pair.
    pub fn p1_degree(&self) -> u32 {
        assert_eq!(self.k, 1, "p1_degree needs a map on P^1");
        self.d
    }

    /// Conjugate `M^{-1} f M` by an invertible rational matrix.
    pub fn conjugate(&self, m: &RatMatrix) -> Result<Self> {
        let e = LinearEmbedding::new(m.clone())?;
        if e.dim() != self.k {
            return Err(Error::Invalid("conjugating matrix must be square".into()));
        }
        self.restrict(&e, &e)
    }

    pub fn numeric(&self, prec: u32) -> NumMap {
        NumMap {
            prec,
            forms: self.comps.iter().map(|c| c.numeric(prec)).collect(),
        }
    }

    /// Image of a point, normalized so its largest coordinate is 1.
    pub fn pushforward_point(&self, p: &[Cx], prec: u32) -> Result<Vec<Cx>> {
        self.numeric(prec).push(p)
    }

    /// Exact image of a rational point.
    pub fn eval_rational(&self, p: &[Rational]) -> Vec<Rational> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }
}

fn check_shape(comps: &[HomPoly]) -> Result<usize> {
    if comps.len() < 2 {
        return Err(Error::Invalid(format!(
            "need at least 2 components, got {}",
            comps.len()
        )));
    }
    let n = comps.len();
    let d = comps[0].degree();
    for c in comps {
        if c.nvars() != n {
            return Err(Error::VarCountMismatch(c.nvars(), n));
        }
        if c.degree() != d {
            return Err(Error::DegreeMismatch(format!(
                "components of degree {} and {}",
                d,
                c.degree()
            )));
        }
    }
    Ok(n - 1)
}

fn laplace_det(m: &[Vec<HomPoly>]) -> HomPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: Option<HomPoly> = None;
    for j in 0..n {
        let minor: Vec<Vec<HomPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let mut t = m[0][j].mul(&laplace_det(&minor)).expect("same nvars");
        if j % 2 == 1 {
            t = t.neg();
        }
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t).expect("same degree"),
        });
    }
    acc.unwrap()
}

/// Iterated resultant certificate on `P^2`: for some elimination order
/// `(i, j, l)` and pair choice, `Res_j(Res_i(F_a, F_b), Res_i(F_a, F_c))`
/// is nonzero and the coordinate point `e_i` is not a common zero.
fn certify_plane(comps: &[HomPoly]) -> Option<String> {
    let d = comps[0].degree();
    let mut rng = ChaCha8Rng::seed_from_u64(0xce27);
    let mut pairs: Vec<[HomPoly; 3]> = (0..3)
        .map(|a| {
            [
                comps[a].clone(),
                comps[(a + 1) % 3].clone(),
                comps[(a + 2) % 3].clone(),
            ]
        })
        .collect();
    for _ in 0..3 {
        let mut r = || Rational::from_integer(BigInt::from(rng.gen_range(-9i64..=9)));
        let g0 = comps[0].clone();
        let g1 = comps[1].add(&comps[2].scale(&r())).ok()?;
        let g2 = comps[2].add(&comps[0].scale(&r())).ok()?.add(&comps[1].scale(&r())).ok()?;
        pairs.push([g0, g1, g2]);
    }
    for i in 0..3 {
        let e_i: Vec<Rational> = (0..3)
            .map(|t| if t == i { Rational::one() } else { Rational::zero() })
            .collect();
        if comps.iter().all(|c| c.eval(&e_i).is_zero()) {
            return None;
        }
        for (pi, [fa, fb, fc]) in pairs.iter().enumerate() {
            if fa.is_zero() || fb.is_zero() || fc.is_zero() {
                continue;
            }
            let r1 = sylvester_resultant(fa.as_mpoly(), fb.as_mpoly(), i, d, d);
            let r2 = sylvester_resultant(fa.as_mpoly(), fc.as_mpoly(), i, d, d);
            if r1.is_zero() || r2.is_zero() {
                continue;
            }
            let j = (i + 1) % 3;
            let dd = d * d;
            let r = sylvester_resultant(&r1, &r2, j, dd, dd);
            if !r.is_zero() {
                return Some(format!(
                    "nonzero iterated resultant (eliminating x{i} then x{j}, pair set {pi})"
                ));
            }
        }
    }
    None
}

/// Numerical search for a common zero of `k` or more forms on `P^k`,
/// `k` in `{1, 2}`.
fn find_common_zero(forms: &[HomPoly], k: usize) -> Result<Option<DegenerateWitness>> {
    let prec = 192;
    let n = k + 1;
    let live: Vec<&HomPoly> = forms.iter().filter(|f| !f.is_zero()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xdead_0b);
    let check = |p: &[Cx]| -> bool {
        live.iter().all(|f| {
            let v = f.numeric(prec).eval(p).max_abs();
            let s = f.numeric(prec).coefficient_norm();
            v.log2_abs() - s.log2_abs() < -(prec as f64) / 3.0
        })
    };
    if live.is_empty() {
        let mut p = vec![Rational::zero(); n];
        p[n - 1] = Rational::one();
        return Ok(Some(witness_exact(&p, "every form vanishes")));
    }
    // random combinations keep the common zeros and are generically coprime
    let combo = |rng: &mut ChaCha8Rng| -> HomPoly {
        let mut acc = live[0].clone();
        for f in &live[1..] {
            let c = Rational::from_integer(BigInt::from(rng.gen_range(1i64..=17)));
            acc = acc.add(&f.scale(&c)).expect("same degree");
        }
        acc
    };
    for _attempt in 0..4 {
        let mut found: Vec<Vec<Cx>> = Vec::new();
        match k {
            1 => {
                let g = combo(&mut rng);
                // roots in the chart x1 = 1, plus the point (1:0)
                let coeffs: Vec<Cx> = g
                    .as_mpoly()
                    .eval_var(1, &Rational::one())
                    .coeffs_in(0)
                    .iter()
                    .map(|c| Cx::from_rational(&c.constant_value().unwrap_or_default(), prec))
                    .collect();
                if coeffs.iter().any(|c| !c.is_zero()) {
                    for r in roots::poly_roots(&coeffs, prec)? {
                        found.push(vec![r, Cx::one(prec)]);
                    }
                }
                found.push(vec![Cx::one(prec), Cx::zero(prec)]);
            }
            2 => {
                let g0 = combo(&mut rng);
                let g1 = combo(&mut rng);
                for c in 0..3 {
                    let others: Vec<usize> = (0..3).filter(|&t| t != c).collect();
                    let dehom = |h: &HomPoly| -> MPoly {
                        let mut map = vec![None; 3];
                        map[others[0]] = Some(0);
                        map[others[1]] = Some(1);
                        h.as_mpoly().eval_var(c, &Rational::one()).remap(2, &map)
                    };
                    let (a, b) = (dehom(&g0), dehom(&g1));
                    if a.is_zero() || b.is_zero() || a.is_constant() || b.is_constant() {
                        continue;
                    }
                    let Ok(sols) = roots::solve_planar(&a, &b, prec) else {
                        continue;
                    };
                    for s in sols {
                        let mut p = vec![Cx::one(prec); 3];
                        p[others[0]] = s.point[0].clone();
                        p[others[1]] = s.point[1].clone();
                        found.push(p);
                    }
                }
                for c in 0..3 {
                    let mut p = vec![Cx::zero(prec); 3];
                    p[c] = Cx::one(prec);
                    found.push(p);
                }
            }
            _ => return Err(Error::Unsupported(format!("common zeros on P^{k}"))),
        }
        for p in found {
            if check(&p) {
                if let Some(q) = rationalize_point(&p) {
                    if live.iter().all(|f| f.eval(&q).is_zero()) {
                        return Ok(Some(witness_exact(&q, "common zero of all components")));
                    }
                }
                let norm = normalize_max(&p).unwrap_or(p);
                return Ok(Some(DegenerateWitness {
                    point: norm.iter().map(|c| c.to_string()).collect(),
                    exact: false,
                    detail: format!("approximate common zero at {prec} bits"),
                }));
            }
        }
        if k == 1 {
            break;
        }
    }
    Ok(None)
}

fn witness_exact(p: &[Rational], detail: &str) -> DegenerateWitness {
    DegenerateWitness {
        point: linalg::normalize_point(p)
            .iter()
            .map(|x| x.to_string())
            .collect(),
        exact: true,
        detail: detail.into(),
    }
}

/// Best rational approximation with a small denominator, by continued
/// fractions.
pub fn rationalize(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e12 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Tries to read a numerically computed projective point as a rational one.
pub fn rationalize_point(p: &[Cx]) -> Option<Vec<Rational>> {
    let p = normalize_max(p)?;
    let mut out = Vec::with_capacity(p.len());
    for c in &p {
        let z = c.to_c64();
        if z.im.abs() > 1e-30 {
            return None;
        }
        let q = rationalize(z.re, 10_000)?;
        if (q.to_f64()? - z.re).abs() > 1e-30_f64.max(z.re.abs() * 1e-15) {
            return None;
        }
        out.push(q);
    }
    Some(out)
}

/// Scales a projective point so its largest-modulus coordinate is exactly 1.
pub fn normalize_max(p: &[Cx]) -> Option<Vec<Cx>> {
    let (idx, best) = p
        .iter()
        .map(|c| c.max_abs())
        .enumerate()
        .fold(None::<(usize, BigFloat)>, |acc, (i, m)| match acc {
            Some((j, b)) if b >= m => Some((j, b)),
            _ => Some((i, m)),
        })?;
    if best.is_zero() {
        return None;
    }
    let prec = p[0].prec();
    let s = &Cx::one(prec) / &p[idx];
    let mut out: Vec<Cx> = p.iter().map(|c| c * &s).collect();
    out[idx] = Cx::one(prec);
    Some(out)
}

/// Scale-invariant distance `max |a_i b_j - a_j b_i|` between two points
/// normalized by [`normalize_max`].
pub fn projective_distance(a: &[Cx], b: &[Cx]) -> BigFloat {
    let prec = a[0].prec();
    let mut worst = BigFloat::zero(prec);
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let v = (&(&a[i] * &b[j]) - &(&a[j] * &b[i])).max_abs();
            if v > worst {
                worst = v;
            }
        }
    }
    worst
}

/// High-precision evaluator for a map.
#[derive(Clone, Debug)]
pub struct NumMap {
    prec: u32,
    forms: Vec<NumForm>,
}

impl NumMap {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn eval(&self, p: &[Cx]) -> Vec<Cx> {
        self.forms.iter().map(|f| f.eval(p)).collect()
    }

    /// Image of a point normalized to max modulus 1; fails when every
    /// coordinate of the image falls below the precision floor.
    pub fn push(&self, p: &[Cx]) -> Result<Vec<Cx>> {
        let p = normalize_max(p).ok_or(Error::Indeterminate(self.prec))?;
        let img = self.eval(&p);
        let scale = self
            .forms
            .iter()
            .map(|f| f.coefficient_norm().log2_abs())
            .fold(f64::NEG_INFINITY, f64::max);
        let top = img
            .iter()
            .map(|c| c.max_abs().log2_abs())
            .fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() || top < scale - self.prec as f64 + 8.0 {
            return Err(Error::Indeterminate(self.prec));
        }
        normalize_max(&img).ok_or(Error::Indeterminate(self.prec))
    }
}

/// `(k+1) x (r+1)` rational matrix of full column rank whose column space
/// is a linear subspace of `P^k`.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct LinearEmbedding {
    #[serde(serialize_with = "serialize_matrix")]
    matrix: RatMatrix,
}

fn serialize_matrix<S: serde::Serializer>(
    m: &RatMatrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Vec<String>> = m
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    strs.serialize(s)
}

impl LinearEmbedding {
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        let cols = matrix.first().map_or(0, |r| r.len());
        if cols == 0 || matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("ragged or empty embedding matrix".into()));
        }
        if linalg::rank(&matrix) != cols {
            return Err(Error::Invalid("embedding matrix is not of full column rank".into()));
        }
        Ok(LinearEmbedding { matrix })
    }

    pub fn identity(n: usize) -> Self {
        LinearEmbedding {
            matrix: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    /// The hyperplane `a . x = 0`.
    pub fn hyperplane(a: &[Rational]) -> Self {
        let basis = linalg::hyperplane_basis(a);
        LinearEmbedding {
            matrix: linalg::transpose(&basis),
        }
    }

    /// A single point of `P^k`.
    pub fn point(p: &[Rational]) -> Self {
        LinearEmbedding {
            matrix: p.iter().map(|x| vec![x.clone()]).collect(),
        }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.len() - 1
    }

    /// Projective dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.matrix[0].len() - 1
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    /// `self ∘ inner`: embeds a subspace of the source of `self`.
    pub fn compose(&self, inner: &LinearEmbedding) -> LinearEmbedding {
        LinearEmbedding {
            matrix: linalg::mat_mul(&self.matrix, &inner.matrix),
        }
    }

    pub fn apply(&self, s: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.matrix, s)
    }

    pub fn apply_numeric(&self, s: &[Cx]) -> Vec<Cx> {
        let prec = s[0].prec();
        self.matrix
            .iter()
            .map(|row| {
                row.iter().zip(s).fold(Cx::zero(prec), |acc, (a, x)| {
                    &acc + &x.scale(&BigFloat::from_rational(a, prec))
                })
            })
            .collect()
    }

    /// Ambient coordinates as linear forms in the subspace coordinates.
    pub fn coordinate_forms(&self) -> Vec<HomPoly> {
        self.matrix.iter().map(|row| HomPoly::linear(row)).collect()
    }

    /// Linear forms cutting out the subspace.
    pub fn equations(&self) -> Vec<HomPoly> {
        linalg::kernel(&linalg::transpose(&self.matrix))
            .iter()
            .map(|v| HomPoly::linear(v).normalized())
            .collect()
    }

    /// Canonical identity of the column space.
    pub fn span_key(&self) -> RatMatrix {
        let mut t = linalg::transpose(&self.matrix);
        linalg::rref(&mut t);
        t
    }

    pub fn same_span(&self, other: &LinearEmbedding) -> bool {
        self.rows() == other.rows() && self.span_key() == other.span_key()
    }

    /// Columns as projective points when the subspace is a point.
    pub fn as_point(&self) -> Option<Vec<Rational>> {
        (self.dim() == 0).then(|| linalg::normalize_point(&self.apply(&[Rational::one()])))
    }
}

impl fmt::Debug for LinearEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Formats a rational projective point as `(a:b:c)`.
pub fn format_point(p: &[Rational]) -> String {
    let s: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(":"))
}

impl fmt::Display for ProjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", s.join(" : "))
    }
}

impl fmt::Debug for ProjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjectiveMap[P^{}, d={}]{}", self.k, self.d, self)
    }
}

impl Serialize for ProjectiveMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ProjectiveMap", 3)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("degree", &self.d)?;
        st.serialize_field("components", &self.comps)?;
        st.end()
    }
}

/// Parses a small integer matrix, for tests and catalog data.
pub fn int_matrix(rows: &[&[i64]]) -> RatMatrix {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|&x| Rational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect()
}

#[allow(dead_code)]
fn to_i64(q: &Rational) -> Option<i64> {
    q.is_integer().then(|| q.to_integer().to_i64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn sq2() -> ProjectiveMap {
        let v = |i| HomPoly::var(3, i).pow(2);
        ProjectiveMap::new(vec![v(0), v(1), v(2)]).unwrap()
    }

    fn sq1() -> ProjectiveMap {
        let v = |i| HomPoly::var(2, i).pow(2);
        ProjectiveMap::new(vec![v(0), v(1)]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let v = |i| HomPoly::var(3, i);
        let x = v(0);
        let y = v(1);
        let bad = vec![x.pow(2), x.mul(&y).unwrap(), y.pow(2)];
        match ProjectiveMap::validate(bad).unwrap() {
            Validation::Degenerate(w) => {
                assert!(w.exact);
                assert_eq!(w.point, vec!["0", "0", "1"]);
            }
            other => panic!("expected degenerate, got {other:?}"),
        }
        let s = HomPoly::var(2, 0);
        let t = HomPoly::var(2, 1);
        match ProjectiveMap::validate(vec![s.pow(2), s.mul(&t).unwrap()]).unwrap() {
            Validation::WellDefined {
                map, removed_factor, ..
            } => {
                assert_eq!(map.degree(), 1);
                assert_eq!(removed_factor, Some(s.clone()));
                assert_eq!(map.comps(), &[s.clone(), t.clone()]);
                assert!(matches!(map.require_degree_two(), Err(Error::LowDegree(1))));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ProjectiveMap::validate(vec![v(0).pow(2), v(1).pow(2), v(2).pow(2)]).unwrap(),
            Validation::WellDefined { .. }
        ));
    }

    #[test]
    fn degenerate_with_irrational_witness() {
        // x^2 + y^2 - 2z^2 ... all share the points where x^2 = y^2 = z^2... use
        // forms vanishing on (1:i:0)
        let v = |i| HomPoly::var(3, i);
        let q = v(0).pow(2).add(&v(1).pow(2)).unwrap();
        let comps = vec![
            q.clone(),
            v(2).pow(2),
            v(2).mul(&v(0)).unwrap(),
        ];
        match ProjectiveMap::validate(comps).unwrap() {
            Validation::Degenerate(w) => assert!(!w.exact),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn iterate_and_jacobian() {
        let f = sq2();
        let f2 = f.iterate(2).unwrap();
        let v = |i| HomPoly::var(3, i).pow(4);
        assert_eq!(f2.comps(), &[v(0), v(1), v(2)]);
        assert_eq!(f.iterate(1).unwrap(), f);
        let j = f.jacobian_det();
        assert_eq!(j.to_string(), "8*x*y*z");
        assert_eq!(j.degree(), 3);
        assert_eq!(sq1().jacobian_det().to_string(), "4*s*t");
        assert!(matches!(
            f.iterate(13),
            Err(Error::DegreeCap { needed: 8192, cap: 4096 })
        ));
    }

    #[test]
    fn restriction_examples() {
        let f = sq2();
        let a = LinearEmbedding::hyperplane(&[rat(0), rat(0), rat(1)]);
        let g = f.restrict(&a, &a).unwrap();
        assert_eq!(g, sq1());
        let a = LinearEmbedding::hyperplane(&[rat(1), rat(-1), rat(0)]);
        assert_eq!(f.restrict(&a, &a).unwrap(), sq1());
        let a = LinearEmbedding::hyperplane(&[rat(1), rat(1), rat(1)]);
        assert!(matches!(f.restrict(&a, &a), Err(Error::NotInvariant(_))));
        assert_eq!(f.iterate(3).unwrap().restrict(&a.clone(), &LinearEmbedding::hyperplane(&[rat(0), rat(0), rat(1)])).is_err(), true);
    }

    #[test]
    fn pushforward_examples() {
        let p = 128;
        let f = sq2();
        let pt = vec![
            Cx::from_f64(1.0, 0.0, p),
            Cx::from_f64(2.0, 0.0, p),
            Cx::from_f64(3.0, 0.0, p),
        ];
        let img = f.pushforward_point(&pt, p).unwrap();
        assert_eq!(img[2], Cx::one(p));
        let ninth = Cx::from_rational(&Rational::new(1.into(), 9.into()), p);
        assert!((&img[0] - &ninth).max_abs().log2_abs() < -120.0);
        let g = sq1();
        let img = g
            .pushforward_point(&[Cx::zero(p), Cx::one(p)], p)
            .unwrap();
        assert!(img[0].is_zero() && img[1] == Cx::one(p));
    }

    #[test]
    fn conjugation_roundtrip() {
        let f = sq2();
        let m = int_matrix(&[&[1, 1, 0], &[0, 1, 0], &[0, 2, 1]]);
        let g = f.conjugate(&m).unwrap();
        assert_eq!(g.degree(), 2);
        let minv = {
            // inverse of m
            int_matrix(&[&[1, -1, 0], &[0, 1, 0], &[0, -2, 1]])
        };
        assert_eq!(g.conjugate(&minv).unwrap(), f);
    }

    #[test]
    fn rationalize_values() {
        assert_eq!(rationalize(0.5, 100), Some(Rational::new(1.into(), 2.into())));
        assert_eq!(rationalize(-3.0, 100), Some(rat(-3)));
    }
}
