//! Exact homogeneous polynomials over the rationals.

use std::cmp::Ordering;
use std::fmt;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::bigfloat::{BigFloat, Cx};
use crate::error::{Error, Result};
use crate::mpoly::{self, MPoly, Monomial, Rational};

/// Default height bound for the rational linear factor search.
pub const DEFAULT_LINEAR_HEIGHT: u32 = 20;

/// Homogeneous polynomial with rational coefficients.
///
/// The zero polynomial keeps an explicit degree so that degree arithmetic
/// through composition and differentiation never becomes undefined.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomPoly {
    poly: MPoly,
    degree: u32,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl HomPoly {
    pub fn new(poly: MPoly, degree: u32) -> Result<Self> {
        for (e, _) in poly.terms() {
            let s: u32 = e.iter().sum();
            if s != degree {
                return Err(Error::NotHomogeneous(format!(
                    "term with exponents {e:?} has degree {s}, expected {degree}"
                )));
            }
        }
        Ok(HomPoly { poly, degree })
    }

    /// Wraps a nonzero homogeneous polynomial, reading the degree off it.
    pub fn from_mpoly(poly: MPoly) -> Result<Self> {
        let d = poly
            .total_degree()
            .ok_or(Error::ZeroPolynomial("degree of zero polynomial is not determined"))?;
        Self::new(poly, d)
    }

    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomPoly {
            poly: MPoly::zero(nvars),
            degree,
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        HomPoly {
            poly: MPoly::constant(nvars, c),
            degree: 0,
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        HomPoly {
            poly: MPoly::var(nvars, i),
            degree: 1,
        }
    }

    pub fn from_terms(
        nvars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let mut v = Vec::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::VarCountMismatch(e.len(), nvars));
            }
            v.push((e, c));
        }
        Self::new(MPoly::from_terms(nvars, v), degree)
    }

    /// Linear form `sum coeffs[i] * x_i`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let terms = coeffs.iter().enumerate().map(|(i, c)| {
            let mut e = vec![0; n];
            e[i] = 1;
            (e, c.clone())
        });
        HomPoly {
            poly: MPoly::from_terms(n, terms),
            degree: 1,
        }
    }

    pub fn linear_int(coeffs: &[i64]) -> Self {
        Self::linear(&coeffs.iter().map(|&c| rat(c)).collect::<Vec<_>>())
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0 || self.is_zero()
    }

    pub fn is_linear(&self) -> bool {
        self.degree == 1 && !self.is_zero()
    }

    pub fn as_mpoly(&self) -> &MPoly {
        &self.poly
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.poly.terms()
    }

    pub fn num_terms(&self) -> usize {
        self.poly.num_terms()
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.poly.coefficient(e)
    }

    /// Coefficients of a linear form, indexed by variable.
    pub fn linear_coeffs(&self) -> Option<Vec<Rational>> {
        if self.degree != 1 {
            return None;
        }
        let n = self.nvars();
        Some(
            (0..n)
                .map(|i| {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    self.coefficient(&e)
                })
                .collect(),
        )
    }

    fn check_nvars(&self, other: &Self) -> Result<()> {
        if self.nvars() != other.nvars() {
            return Err(Error::VarCountMismatch(self.nvars(), other.nvars()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_nvars(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "cannot add degree {} and degree {}",
                self.degree, other.degree
            )));
        }
        Ok(HomPoly {
            poly: self.poly.add(&other.poly),
            degree: self.degree,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        HomPoly {
            poly: self.poly.neg(),
            degree: self.degree,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        HomPoly {
            poly: self.poly.scale(c),
            degree: self.degree,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_nvars(other)?;
        Ok(HomPoly {
            poly: self.poly.mul(&other.poly),
            degree: self.degree + other.degree,
        })
    }

    pub fn pow(&self, n: u32) -> Self {
        HomPoly {
            poly: self.poly.pow(n),
            degree: self.degree * n,
        }
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes must share
    /// their variable count and degree.
    pub fn compose(&self, subs: &[HomPoly]) -> Result<Self> {
        if subs.len() != self.nvars() {
            return Err(Error::VarCountMismatch(subs.len(), self.nvars()));
        }
        let first = subs
            .first()
            .ok_or_else(|| Error::Invalid("empty substitution".into()))?;
        for s in subs {
            if s.nvars() != first.nvars() {
                return Err(Error::VarCountMismatch(s.nvars(), first.nvars()));
            }
            if s.degree != first.degree {
                return Err(Error::DegreeMismatch(format!(
                    "substitutes of degree {} and {}",
                    first.degree, s.degree
                )));
            }
        }
        let polys: Vec<MPoly> = subs.iter().map(|s| s.poly.clone()).collect();
        Ok(HomPoly {
            poly: self.poly.substitute(&polys),
            degree: self.degree * first.degree,
        })
    }

    pub fn partial(&self, i: usize) -> Result<Self> {
        if i >= self.nvars() {
            return Err(Error::VarIndex {
                index: i,
                nvars: self.nvars(),
            });
        }
        Ok(HomPoly {
            poly: self.poly.derivative(i),
            degree: self.degree.saturating_sub(1),
        })
    }

    /// `Some(q)` with `self = q * b`, or `None` if `b` does not divide.
    pub fn exact_divide(&self, b: &Self) -> Result<Option<Self>> {
        self.check_nvars(b)?;
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(HomPoly::zero(
                self.nvars(),
                self.degree.saturating_sub(b.degree),
            )));
        }
        if b.degree > self.degree {
            return Ok(None);
        }
        Ok(self.poly.div_exact(&b.poly).map(|q| HomPoly {
            poly: q,
            degree: self.degree - b.degree,
        }))
    }

    /// Primitive integer representative with positive lex-leading
    /// coefficient.
    pub fn normalized(&self) -> Self {
        HomPoly {
            poly: self.poly.normalized(),
            degree: self.degree,
        }
    }

    pub fn is_normalized(&self) -> bool {
        *self == self.normalized()
    }

    fn last_var_valuation(&self) -> u32 {
        let v = self.nvars() - 1;
        self.poly.min_degree_in(v).unwrap_or(0)
    }

    /// Sets the last variable to 1.
    fn dehomogenize_last(&self) -> MPoly {
        let v = self.nvars() - 1;
        self.poly.eval_var(v, &Rational::one())
    }

    fn homogenize_last(p: &MPoly, degree: u32) -> Self {
        let v = p.nvars() - 1;
        let terms = p.terms().map(|(e, c)| {
            let mut e2 = e.clone();
            e2[v] = degree - e.iter().sum::<u32>();
            (e2, c.clone())
        });
        HomPoly {
            poly: MPoly::from_terms(p.nvars(), terms.collect::<Vec<_>>()),
            degree,
        }
    }

    /// Greatest common divisor: primitive and sign-normalized.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.check_nvars(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroPolynomial("gcd of two zero polynomials"));
        }
        if self.is_zero() {
            return Ok(other.normalized());
        }
        if other.is_zero() {
            return Ok(self.normalized());
        }
        let n = self.nvars();
        if n == 1 {
            let k = self.degree.min(other.degree);
            return Ok(HomPoly::var(1, 0).pow(k));
        }
        // split off powers of the last variable and work in the affine chart
        let va = self.last_var_valuation();
        let vb = other.last_var_valuation();
        let g = self.dehomogenize_last().gcd(&other.dehomogenize_last());
        let gdeg = g.total_degree().unwrap_or(0);
        let gh = Self::homogenize_last(&g, gdeg);
        let zpow = HomPoly::var(n, n - 1).pow(va.min(vb));
        Ok(gh.mul(&zpow)?.normalized())
    }

    /// Product of the distinct irreducible factors, primitive and
    /// sign-normalized.
    pub fn squarefree_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("square-free part of zero"));
        }
        if self.degree == 0 {
            return Ok(HomPoly::one(self.nvars()));
        }
        let mut g = self.clone();
        for i in 0..self.nvars() {
            let d = self.partial(i)?;
            if d.is_zero() {
                continue;
            }
            g = g.gcd(&d)?;
            if g.degree == 0 {
                break;
            }
        }
        let q = self
            .exact_divide(&g)?
            .expect("gcd with derivatives divides the polynomial");
        Ok(q.normalized())
    }

    /// Sylvester resultant with respect to variable `i`, as a form in the
    /// remaining variables.
    pub fn resultant_wrt(&self, other: &Self, i: usize) -> Result<Self> {
        self.check_nvars(other)?;
        let n = self.nvars();
        if i >= n {
            return Err(Error::VarIndex { index: i, nvars: n });
        }
        let p = self.poly.degree_in(i).unwrap_or(0);
        let q = other.poly.degree_in(i).unwrap_or(0);
        if p == 0 {
            return Err(Error::NotInVariable(i));
        }
        if q == 0 {
            return Err(Error::NotInVariable(i));
        }
        let r = mpoly::sylvester_resultant(&self.poly, &other.poly, i, p, q);
        let map: Vec<Option<usize>> = (0..n)
            .map(|j| match j.cmp(&i) {
                Ordering::Less => Some(j),
                Ordering::Equal => None,
                Ordering::Greater => Some(j - 1),
            })
            .collect();
        let degree = self.degree * q + other.degree * p - p * q;
        HomPoly::new(r.remap(n - 1, &map), degree)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.poly.eval(point)
    }

    /// Integer coefficients of the primitive representative; `None` for
    /// the zero polynomial.
    fn integer_terms(&self) -> Vec<(Monomial, BigInt)> {
        let p = self.poly.normalized();
        p.terms()
            .map(|(e, c)| {
                debug_assert!(c.is_integer());
                (e.clone(), c.to_integer())
            })
            .collect()
    }

    /// Rational linear factors with multiplicities plus the cofactor.
    ///
    /// Candidates are every primitive integer linear form of height at most
    /// `height`, followed by `extra`. A candidate passes a modular
    /// vanishing filter on its hyperplane before exact division confirms it.
    pub fn linear_factors(&self, height: u32, extra: &[HomPoly]) -> Result<LinearFactorization> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("linear factors of zero"));
        }
        let n = self.nvars();
        let mut search = FactorSearch {
            residual: self.normalized(),
            terms: Vec::new(),
            factors: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(0x5eed_1f4c),
        };
        search.reduce_terms();
        for cand in height_enumeration(n, height).iter() {
            if search.residual.degree == 0 {
                break;
            }
            let m: Vec<u64> = cand.iter().map(|&c| i64_mod(c)).collect();
            search.try_candidate(&m, || HomPoly::linear_int(cand));
        }
        for e in extra {
            if e.nvars() != n || !e.is_linear() {
                continue;
            }
            let e = e.normalized();
            let m: Vec<u64> = e
                .linear_coeffs()
                .unwrap()
                .iter()
                .map(|c| to_mod(&c.to_integer()))
                .collect();
            search.try_candidate(&m, || e.clone());
        }
        let FactorSearch {
            residual,
            mut factors,
            ..
        } = search;
        factors.sort_by(|a, b| linear_order(&a.0, &b.0));
        let residual = residual.normalized();
        let unverified = residual.degree > 0;
        Ok(LinearFactorization {
            factors,
            residual,
            residual_unverified: unverified,
            height,
        })
    }

    /// Floating evaluator for repeated high-precision evaluation.
    pub fn numeric(&self, prec: u32) -> NumForm {
        NumForm::from_mpoly(&self.poly, prec)
    }

    /// Double precision evaluator.
    pub fn numeric_f64(&self) -> F64Form {
        F64Form {
            terms: self
                .terms()
                .map(|(e, c)| (e.clone(), c.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }
}

/// Ordering used for reporting linear factors: earlier leading variable
/// first, then ascending coefficient vectors.
pub fn linear_order(a: &HomPoly, b: &HomPoly) -> Ordering {
    let ca = a.linear_coeffs().unwrap_or_default();
    let cb = b.linear_coeffs().unwrap_or_default();
    let lead = |c: &Vec<Rational>| c.iter().position(|x| !x.is_zero()).unwrap_or(usize::MAX);
    lead(&ca).cmp(&lead(&cb)).then_with(|| ca.cmp(&cb))
}

/// Result of [`HomPoly::linear_factors`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFactorization {
    pub factors: Vec<(HomPoly, u32)>,
    /// Cofactor with no rational linear factor of height at most `height`.
    pub residual: HomPoly,
    /// Set when the residual is nonconstant: it may or may not be
    /// irreducible.
    pub residual_unverified: bool,
    pub height: u32,
}

impl LinearFactorization {
    /// Product of the factors with multiplicity times the residual.
    pub fn product(&self) -> HomPoly {
        let mut acc = self.residual.clone();
        for (f, m) in &self.factors {
            acc = acc.mul(&f.pow(*m)).expect("same nvars");
        }
        acc
    }
}

struct FactorSearch {
    residual: HomPoly,
    /// Residual terms reduced modulo the prime.
    terms: Vec<(Monomial, u64)>,
    factors: Vec<(HomPoly, u32)>,
    rng: ChaCha8Rng,
}

impl FactorSearch {
    fn reduce_terms(&mut self) {
        self.terms = self
            .residual
            .integer_terms()
            .into_iter()
            .map(|(e, c)| (e, to_mod(&c)))
            .collect();
    }

    /// Tries the linear form with the given coefficients modulo the prime;
    /// `make` builds the exact form once the modular filter passes.
    fn try_candidate(&mut self, coeffs: &[u64], make: impl FnOnce() -> HomPoly) {
        if self.residual.degree == 0 {
            return;
        }
        if coeffs.iter().any(|&c| c != 0) {
            for _ in 0..3 {
                if !vanishes_mod_p_on_hyperplane(&self.terms, coeffs, &mut self.rng) {
                    return;
                }
            }
        }
        let cand = make();
        if self.factors.iter().any(|(f, _)| *f == cand) {
            return;
        }
        let mut mult = 0;
        while self.residual.degree > 0 {
            match self.residual.exact_divide(&cand).expect("same nvars") {
                Some(q) => {
                    self.residual = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            self.residual = self.residual.normalized();
            self.reduce_terms();
            self.factors.push((cand, mult));
        }
    }
}

/// Primitive, sign-normalized integer vectors of height `<= h` in `n`
/// entries, by increasing height; cached per `(n, h)`.
fn height_enumeration(n: usize, h: u32) -> Arc<Vec<Vec<i64>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Vec<Vec<i64>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(n, h)) {
        return v.clone();
    }
    let hh = h as i64;
    let mut out: Vec<(i64, Vec<i64>)> = Vec::new();
    let mut v = vec![-hh; n];
    'outer: loop {
        if let Some(f) = v.iter().position(|&c| c != 0) {
            if v[f] > 0 && v.iter().fold(0i64, |acc, &c| acc.gcd(&c)) == 1 {
                let height = v.iter().map(|c| c.abs()).max().unwrap();
                out.push((height, v.clone()));
            }
        }
        // odometer increment
        let mut i = n;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if v[i] < hh {
                v[i] += 1;
                break;
            }
            v[i] = -hh;
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let list = Arc::new(out.into_iter().map(|(_, c)| c).collect::<Vec<_>>());
    cache.lock().unwrap().insert((n, h), list.clone());
    list
}

fn i64_mod(x: i64) -> u64 {
    if x >= 0 {
        x as u64 % MOD_P
    } else {
        MOD_P - ((-x) as u64 % MOD_P)
    }
}

const MOD_P: u64 = (1u64 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    let z = a as u128 * b as u128;
    let r = (z as u64 & MOD_P) + (z >> 61) as u64;
    if r >= MOD_P {
        r - MOD_P
    } else {
        r
    }
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(x: &BigInt) -> u64 {
    let m = BigInt::from(MOD_P);
    let r = x.mod_floor(&m);
    r.to_u64().unwrap()
}

fn rat_mod(x: &Rational) -> Option<u64> {
    let d = to_mod(x.denom());
    (d != 0).then(|| mulmod(to_mod(x.numer()), powmod(d, MOD_P - 2)))
}

/// Remainder of `a` by `b` modulo the prime; both ascending and trimmed.
fn rem_mod(mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let lb = *b.last().unwrap();
    let inv = powmod(lb, MOD_P - 2);
    while a.len() >= b.len() {
        let lead = *a.last().unwrap();
        if lead != 0 {
            let f = mulmod(lead, inv);
            let shift = a.len() - b.len();
            for (i, &c) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + MOD_P - mulmod(f, c)) % MOD_P;
            }
        }
        a.pop();
        while a.last() == Some(&0) {
            a.pop();
        }
    }
    a
}

fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    while !b.is_empty() {
        let r = rem_mod(a, &b);
        a = b;
        b = r;
    }
    a
}

/// Sufficient test that forms share no common factor of positive degree.
///
/// The forms are restricted to a fixed line; a common factor would
/// restrict to a common factor of the binary forms, which survives
/// reduction modulo a large prime whenever a leading coefficient does.
/// `false` means undecided.
pub fn certainly_coprime(forms: &[HomPoly]) -> bool {
    let Some(first) = forms.first() else {
        return false;
    };
    let n = first.nvars();
    if n < 2 || forms.iter().any(|f| f.is_zero() || f.nvars() != n) {
        return false;
    }
    if forms.iter().any(|f| f.degree() == 0) {
        return true;
    }
    let subs: Vec<HomPoly> = (0..n as i64)
        .map(|i| HomPoly::linear_int(&[1 + 2 * i, 3 - 5 * i + i * i]))
        .collect();
    let mut restricted = Vec::with_capacity(forms.len());
    for f in forms {
        let Ok(r) = f.compose(&subs) else {
            return false;
        };
        if r.is_zero() {
            return false;
        }
        // ascending in s with t = 1, formal degree r.degree()
        let deg = r.degree() as usize;
        let mut c = vec![Rational::zero(); deg + 1];
        for (e, q) in r.terms() {
            c[e[0] as usize] = q.clone();
        }
        restricted.push(c);
    }
    // a common factor t shows as vanishing top coefficients everywhere
    if restricted.iter().all(|c| c.last().unwrap().is_zero()) {
        return false;
    }
    let mut g: Option<Vec<u64>> = None;
    let mut kept_degree = false;
    for c in &restricted {
        let Some(mut m) = c.iter().map(rat_mod).collect::<Option<Vec<u64>>>() else {
            return false;
        };
        if !c.last().unwrap().is_zero() && *m.last().unwrap() != 0 {
            kept_degree = true;
        }
        while m.last() == Some(&0) {
            m.pop();
        }
        if m.is_empty() {
            return false;
        }
        g = Some(match g {
            None => m,
            Some(g) => gcd_mod(g, m),
        });
    }
    kept_degree && g.is_some_and(|g| g.len() == 1)
}

/// Evaluates the integer polynomial at a random point of the hyperplane
/// `coeffs . x = 0` modulo a Mersenne prime.
fn vanishes_mod_p_on_hyperplane(
    terms: &[(Monomial, u64)],
    coeffs: &[u64],
    rng: &mut ChaCha8Rng,
) -> bool {
    let n = coeffs.len();
    let pivot = coeffs.iter().rposition(|&c| c != 0).unwrap();
    // the point (c_p r_i, ..., -sum_{i != p} c_i r_i) lies on the hyperplane
    let mut pt = vec![0u64; n];
    let mut acc = 0u64;
    for i in 0..n {
        if i == pivot {
            continue;
        }
        let r = rng.gen_range(1..MOD_P);
        acc = (acc + mulmod(coeffs[i], r)) % MOD_P;
        pt[i] = mulmod(coeffs[pivot], r);
    }
    pt[pivot] = (MOD_P - acc) % MOD_P;
    let mut sum = 0u64;
    for (e, c) in terms {
        let mut t = *c;
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                t = mulmod(t, powmod(pt[i], k as u64));
            }
        }
        sum = (sum + t) % MOD_P;
    }
    sum == 0
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        mpoly::format_terms(self.nvars(), self.terms(), f)
    }
}

impl fmt::Debug for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomPoly[{}; deg {}]({})", self.nvars(), self.degree, self)
    }
}

impl Serialize for HomPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// High-precision floating evaluator of a form.
#[derive(Clone, Debug)]
pub struct NumForm {
    nvars: usize,
    degree: u32,
    terms: Vec<(Monomial, BigFloat)>,
}

impl NumForm {
    /// Evaluator for any polynomial, homogeneous or not.
    pub fn from_mpoly(p: &MPoly, prec: u32) -> Self {
        NumForm {
            nvars: p.nvars(),
            degree: p.total_degree().unwrap_or(0),
            terms: p
                .terms()
                .map(|(e, c)| (e.clone(), BigFloat::from_rational(c, prec)))
                .collect(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, x: &[Cx]) -> Cx {
        assert_eq!(x.len(), self.nvars);
        let prec = x.iter().map(|c| c.prec()).max().unwrap_or(64);
        let maxdeg = self
            .terms
            .iter()
            .flat_map(|(e, _)| e.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let pows: Vec<Vec<Cx>> = x
            .iter()
            .map(|xi| {
                let mut v = Vec::with_capacity(maxdeg + 1);
                v.push(Cx::one(prec));
                for k in 1..=maxdeg {
                    let next = &v[k - 1] * xi;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Cx::zero(prec);
        for (e, c) in &self.terms {
            let mut t = Cx::new(c.clone(), BigFloat::zero(prec));
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &pows[i][k as usize];
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Sum of absolute values of the coefficients.
    pub fn coefficient_norm(&self) -> BigFloat {
        let prec = self.terms.first().map(|t| t.1.prec()).unwrap_or(64);
        self.terms
            .iter()
            .fold(BigFloat::zero(prec), |acc, (_, c)| &acc + &c.abs())
    }
}

/// Double precision evaluator of a form.
#[derive(Clone, Debug)]
pub struct F64Form {
    terms: Vec<(Monomial, f64)>,
}

impl F64Form {
    pub fn eval(&self, x: &[num_complex::Complex64]) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = num_complex::Complex64::new(*c, 0.0);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[i].powu(k);
                }
            }
            acc += t;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> HomPoly {
        HomPoly::var(3, 0)
    }
    fn y() -> HomPoly {
        HomPoly::var(3, 1)
    }
    fn z() -> HomPoly {
        HomPoly::var(3, 2)
    }

    fn add(a: &HomPoly, b: &HomPoly) -> HomPoly {
        a.add(b).unwrap()
    }
    fn sub(a: &HomPoly, b: &HomPoly) -> HomPoly {
        a.sub(b).unwrap()
    }
    fn mul(a: &HomPoly, b: &HomPoly) -> HomPoly {
        a.mul(b).unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(mul(&add(&x(), &y()), &sub(&x(), &y())), sub(&x().pow(2), &y().pow(2)));
        let zero3 = HomPoly::zero(3, 3);
        let r = mul(&x(), &zero3);
        assert!(r.is_zero());
        assert_eq!(r.degree(), 4);
        let s = add(&add(&x(), &y()), &z()).pow(2);
        let two = rat(2);
        let expected = [
            x().pow(2),
            y().pow(2),
            z().pow(2),
            mul(&x(), &y()).scale(&two),
            mul(&x(), &z()).scale(&two),
            mul(&y(), &z()).scale(&two),
        ]
        .iter()
        .fold(HomPoly::zero(3, 2), |a, b| add(&a, b));
        assert_eq!(s, expected);
    }

    #[test]
    fn mismatched_nvars_is_an_error() {
        let a = HomPoly::var(2, 0);
        assert!(matches!(a.mul(&x()), Err(Error::VarCountMismatch(2, 3))));
        assert!(matches!(x().add(&x().pow(2)), Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn compose_examples() {
        let p = sub(&x().pow(2), &mul(&y(), &z()));
        let sq = [x().pow(2), y().pow(2), z().pow(2)];
        let r = p.compose(&sq).unwrap();
        assert_eq!(r, sub(&x().pow(4), &mul(&y().pow(2), &z().pow(2))));
        assert_eq!(x().compose(&sq).unwrap(), sq[0]);
        let s = HomPoly::var(2, 0);
        let t = HomPoly::var(2, 1);
        let xy = add(&HomPoly::var(2, 0), &HomPoly::var(2, 1));
        assert_eq!(xy.compose(&[s.pow(2), t.pow(2)]).unwrap(), add(&s.pow(2), &t.pow(2)));
        assert!(matches!(
            x().compose(&[s.pow(2), t.pow(3), s.pow(2)]),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn partial_examples() {
        let p = mul(&x().pow(2), &y());
        assert_eq!(p.partial(0).unwrap(), mul(&x(), &y()).scale(&rat(2)));
        let dz = p.partial(2).unwrap();
        assert!(dz.is_zero());
        assert_eq!(dz.degree(), 2);
        let q = add(&x().pow(3), &mul(&x(), &z().pow(2)).scale(&rat(3)));
        assert_eq!(q.partial(0).unwrap(), add(&x().pow(2), &z().pow(2)).scale(&rat(3)));
        assert!(matches!(p.partial(3), Err(Error::VarIndex { .. })));
    }

    #[test]
    fn exact_divide_examples() {
        let a = mul(&x().pow(2), &y());
        assert_eq!(a.exact_divide(&x()).unwrap(), Some(mul(&x(), &y())));
        let d = sub(&x().pow(2), &y().pow(2));
        assert_eq!(d.exact_divide(&add(&x(), &y())).unwrap(), Some(sub(&x(), &y())));
        let e = add(&x().pow(2), &y().pow(2));
        assert_eq!(e.exact_divide(&x()).unwrap(), None);
        assert!(matches!(e.exact_divide(&HomPoly::zero(3, 1)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn gcd_examples() {
        let a = mul(&x().pow(2), &y());
        let b = mul(&x(), &y().pow(2));
        assert_eq!(a.gcd(&b).unwrap(), mul(&x(), &y()));
        assert_eq!(add(&x(), &y()).gcd(&sub(&x(), &y())).unwrap(), HomPoly::one(3));
        let s = add(&x(), &y());
        let a = mul(&s.pow(2), &z());
        let b = mul(&s, &z().pow(2));
        assert_eq!(a.gcd(&b).unwrap(), mul(&s, &z()));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(mul(&x().pow(2), &y()).squarefree_part().unwrap(), mul(&x(), &y()));
        let s = add(&x(), &y());
        let d = sub(&x(), &y());
        assert_eq!(
            mul(&s.pow(3), &d).squarefree_part().unwrap(),
            sub(&x().pow(2), &y().pow(2))
        );
        let xyz = mul(&mul(&x(), &y()), &z());
        assert_eq!(xyz.squarefree_part().unwrap(), xyz);
        assert!(HomPoly::zero(3, 2).squarefree_part().is_err());
    }

    #[test]
    fn resultant_examples() {
        let r = sub(&x(), &y()).resultant_wrt(&sub(&x(), &z()), 0).unwrap();
        let yz = sub(&HomPoly::var(2, 0), &HomPoly::var(2, 1));
        assert!(r == yz || r == yz.neg());
        let r = x().pow(2).resultant_wrt(&sub(&x(), &y()), 0).unwrap();
        assert_eq!(r, HomPoly::var(2, 0).pow(2));
        let r = sub(&x().pow(2), &y().pow(2))
            .resultant_wrt(&sub(&x(), &y()), 0)
            .unwrap();
        assert!(r.is_zero());
        assert!(matches!(y().resultant_wrt(&x(), 0), Err(Error::NotInVariable(0))));
    }

    #[test]
    fn linear_factor_examples() {
        let xyz = mul(&mul(&x(), &y()), &z()).scale(&rat(8));
        let lf = xyz.linear_factors(DEFAULT_LINEAR_HEIGHT, &[]).unwrap();
        assert_eq!(lf.factors, vec![(x(), 1), (y(), 1), (z(), 1)]);
        assert!(lf.residual.is_constant());
        assert!(!lf.residual_unverified);

        let s = HomPoly::var(2, 0);
        let t = HomPoly::var(2, 1);
        let d = sub(&s.pow(2), &t.pow(2));
        let lf = d.linear_factors(DEFAULT_LINEAR_HEIGHT, &[]).unwrap();
        assert_eq!(lf.factors, vec![(sub(&s, &t), 1), (add(&s, &t), 1)]);
    }

    #[test]
    fn conic_image_has_no_linear_factor() {
        // (z - x - y)^2 - 4xy: exhaustive height-20 search finds nothing
        let l = sub(&sub(&z(), &x()), &y());
        let conic = sub(&l.pow(2), &mul(&x(), &y()).scale(&rat(4)));
        let lf = conic.linear_factors(20, &[]).unwrap();
        assert!(lf.factors.is_empty());
        assert_eq!(lf.residual, conic.normalized());
        assert!(lf.residual_unverified);
    }

    #[test]
    fn linear_factor_multiplicity_and_extra_candidates() {
        // (x - 25 y)^2 * z is out of the default height; supply it
        let l = sub(&x(), &y().scale(&rat(25)));
        let p = mul(&l.pow(2), &z());
        let lf = p.linear_factors(20, &[]).unwrap();
        assert_eq!(lf.factors, vec![(z(), 1)]);
        assert_eq!(lf.residual, l.pow(2).normalized());
        let lf = p.linear_factors(20, &[l.clone()]).unwrap();
        assert_eq!(lf.factors, vec![(l, 2), (z(), 1)]);
        assert!(lf.residual.is_constant());
    }

    #[test]
    fn numeric_evaluation() {
        let p = sub(&x().pow(2), &mul(&y(), &z()));
        let v = p.numeric(128).eval(&[
            Cx::from_f64(1.0, 1.0, 128),
            Cx::from_f64(2.0, 0.0, 128),
            Cx::from_f64(0.5, 0.0, 128),
        ]);
        // (1+i)^2 - 1 = 2i - 1
        assert_eq!(v.to_c64(), num_complex::Complex64::new(-1.0, 2.0));
    }
}
