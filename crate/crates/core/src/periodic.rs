//! Periodic points of small period, their multipliers, and the audits run
//! on the resulting spectra.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bigfloat::{BigFloat, Cx};
use crate::error::{Error, Result};
use crate::mpoly::{MPoly, Rational};
use crate::poly::{HomPoly, NumForm};
use crate::projmap::{normalize_max, projective_distance, NumMap, ProjectiveMap};
use crate::roots;

/// Largest elimination size `(d^l + 1)^k` attempted by [`find_periodic`].
pub const DEFAULT_ELIMINATION_BUDGET: u64 = 400;

/// Decision thresholds of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassifyTol {
    pub eps_zero: f64,
    pub eps_neutral: f64,
    pub eps_root: f64,
    pub q_max: u32,
}

impl Default for ClassifyTol {
    fn default() -> Self {
        ClassifyTol {
            eps_zero: 1e-10,
            eps_neutral: 1e-8,
            eps_root: 1e-8,
            q_max: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenClass {
    Zero,
    AttractingNonzero,
    Repelling,
    Parabolic(u32),
    NeutralIrrationalCandidate,
}

/// Classifies a multiplier by modulus and, on the unit circle, by the
/// least order `q <= q_max` with `|λ^q - 1| < eps_root`.
pub fn classify(lambda: &Cx, tol: &ClassifyTol) -> EigenClass {
    let r = lambda.abs().to_f64();
    if r < tol.eps_zero {
        return EigenClass::Zero;
    }
    if (r - 1.0).abs() < tol.eps_neutral {
        let one = Cx::one(lambda.prec());
        let mut pw = lambda.clone();
        for q in 1..=tol.q_max {
            if (&pw - &one).abs().to_f64() < tol.eps_root {
                return EigenClass::Parabolic(q);
            }
            pw = &pw * lambda;
        }
        return EigenClass::NeutralIrrationalCandidate;
    }
    if r < 1.0 {
        EigenClass::AttractingNonzero
    } else {
        EigenClass::Repelling
    }
}

#[derive(Clone, Debug)]
pub struct PeriodicPoint {
    /// Max-modulus coordinate equal to 1.
    pub coords: Vec<Cx>,
    /// Minimal period.
    pub period: u32,
    /// Exponent the point was solved for.
    pub searched_exponent: u32,
    /// `max_i |F_i(p)/F_c(p) - p_i|` for `F = f^l` in the best chart `c`.
    pub residual: BigFloat,
    pub multipliers: Vec<Cx>,
    pub classes: Vec<EigenClass>,
    pub multiplicity_suspect: bool,
    /// Multiplicity used for counting.
    pub multiplicity: u32,
}

impl PeriodicPoint {
    pub fn coords_f64(&self) -> Vec<num_complex::Complex64> {
        self.coords.iter().map(|c| c.to_c64()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct PeriodicSearch {
    pub exponent: u32,
    pub points: Vec<PeriodicPoint>,
    pub diagnostics: Vec<String>,
}

/// Checks the elimination budget `(d^l + 1)^k <= budget`.
pub fn check_budget(m: &ProjectiveMap, l: u32, budget: u64) -> Result<()> {
    let big = (m.degree() as u64)
        .checked_pow(l)
        .and_then(|x| x.checked_add(1))
        .and_then(|x| x.checked_pow(m.k() as u32))
        .unwrap_or(u64::MAX);
    if big > budget {
        return Err(Error::Resource(format!(
            "period {l} needs an elimination of size {big}, above the budget {budget}"
        )));
    }
    Ok(())
}

/// All points with `f^l(p) = p`, with minimal periods, residuals and
/// multipliers.
pub fn find_periodic(
    m: &ProjectiveMap,
    l: u32,
    prec: u32,
    budget: u64,
    tol: &ClassifyTol,
) -> Result<PeriodicSearch> {
    if l == 0 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    check_budget(m, l, budget)?;
    let f_l = m.iterate(l)?;
    let mut diagnostics = Vec::new();
    // (point, chart it was solved in, eliminant multiplicity, siblings)
    let raw: Vec<(Vec<Cx>, usize, u32, u32)> = match m.k() {
        1 => solve_p1(&f_l, prec)?,
        2 => solve_p2(&f_l, prec, &mut diagnostics)?,
        k => return Err(Error::Unsupported(format!("periodic points on P^{k}"))),
    };
    let dedupe_bits = prec as f64 / 8.0 * std::f64::consts::LOG2_10;
    let mut kept: Vec<(Vec<Cx>, usize, u32, u32)> = Vec::new();
    for (p, chart, mult, sib) in raw {
        let p = normalize_max(&p).ok_or_else(|| Error::Precision("zero point".into()))?;
        let best = max_index(&p);
        if let Some(q) = kept
            .iter_mut()
            .find(|q| projective_distance(&q.0, &p).log2_abs() < -dedupe_bits)
        {
            // keep the copy solved in the chart of its largest coordinate
            if chart == best && q.1 != max_index(&q.0) {
                *q = (p, chart, mult, sib);
            }
            continue;
        }
        kept.push((p, chart, mult, sib));
    }
    let num_l = f_l.numeric(prec);
    let num = m.numeric(prec);
    let jac = NumJacobian::new(m, prec);
    let mut points = Vec::new();
    for (p, _chart, mult, sib) in kept {
        let residual = chart_residual(&num_l, &p);
        if residual.log2_abs() > -(prec as f64) / 3.0 {
            diagnostics.push(format!(
                "dropped point with residual {} after refinement",
                residual.to_sci_string(6)
            ));
            continue;
        }
        let period = minimal_period(&num, &p, l, prec);
        let multipliers = match multipliers_in_chart(&num, &jac, &p, period, max_index(&p)) {
            Ok(mu) => mu,
            Err(e) => {
                diagnostics.push(format!("multipliers unavailable: {e}"));
                continue;
            }
        };
        let classes = multipliers.iter().map(|x| classify(x, tol)).collect();
        let suspect = mult > sib;
        let multiplicity = if suspect { (mult / sib.max(1)).max(1) } else { 1 };
        points.push(PeriodicPoint {
            coords: p,
            period,
            searched_exponent: l,
            residual,
            multipliers,
            classes,
            multiplicity_suspect: suspect,
            multiplicity,
        });
    }
    points.sort_by(|a, b| {
        let ka = rounded_key(&a.coords);
        let kb = rounded_key(&b.coords);
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(PeriodicSearch {
        exponent: l,
        points,
        diagnostics,
    })
}

fn rounded_key(p: &[Cx]) -> Vec<f64> {
    p.iter()
        .flat_map(|c| {
            let z = c.to_c64();
            [round12(z.re), round12(z.im)]
        })
        .collect()
}

fn round12(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub(crate) fn max_index(p: &[Cx]) -> usize {
    let mut best = 0;
    for i in 1..p.len() {
        if p[i].max_abs() > p[best].max_abs() {
            best = i;
        }
    }
    best
}

/// Fixed points of a map on `P^1` from `x_1 F_0 - x_0 F_1`, with exact
/// multiplicities from a square-free decomposition.
fn solve_p1(f: &ProjectiveMap, prec: u32) -> Result<Vec<(Vec<Cx>, usize, u32, u32)>> {
    let x0 = HomPoly::var(2, 0);
    let x1 = HomPoly::var(2, 1);
    let p = x1.mul(&f.comps()[0])?.sub(&x0.mul(&f.comps()[1])?)?;
    if p.is_zero() {
        return Err(Error::Invalid("every point is fixed".into()));
    }
    let total = p.degree();
    let affine = p.as_mpoly().eval_var(1, &Rational::one());
    let affine_deg = affine.degree_in(0).unwrap_or(0);
    let mut out = Vec::new();
    for (factor, mult) in roots::squarefree_decomposition(&affine, 0) {
        for r in roots::rational_poly_roots(&factor, 0, prec)? {
            out.push((vec![r, Cx::one(prec)], 1, mult, 1));
        }
    }
    if total > affine_deg {
        out.push((vec![Cx::one(prec), Cx::zero(prec)], 0, total - affine_deg, 1));
    }
    Ok(out)
}

/// Fixed points on `P^2`: in each chart `x_c = 1`, solve
/// `F_i - x_i F_c = 0` for the two indices `i != c`.
fn solve_p2(
    f: &ProjectiveMap,
    prec: u32,
    diagnostics: &mut Vec<String>,
) -> Result<Vec<(Vec<Cx>, usize, u32, u32)>> {
    let mut out = Vec::new();
    let mut solved_any = false;
    for c in [2usize, 1, 0] {
        let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
        let mut map = vec![None; 3];
        map[others[0]] = Some(0);
        map[others[1]] = Some(1);
        let dehom = |h: &MPoly| h.eval_var(c, &Rational::one()).remap(2, &map);
        let fc = f.comps()[c].as_mpoly();
        let eqs: Vec<MPoly> = others
            .iter()
            .map(|&i| {
                let xi = MPoly::var(3, i);
                dehom(&f.comps()[i].as_mpoly().sub(&xi.mul(fc)))
            })
            .collect();
        match roots::solve_planar(&eqs[0], &eqs[1], prec) {
            Ok(sols) => {
                solved_any = true;
                for s in sols {
                    let mut p = vec![Cx::one(prec); 3];
                    p[others[0]] = s.point[0].clone();
                    p[others[1]] = s.point[1].clone();
                    out.push((p, c, s.eliminant_multiplicity, s.siblings));
                }
            }
            Err(e) => diagnostics.push(format!("chart {c}: {e}")),
        }
    }
    if !solved_any {
        return Err(Error::Invalid(format!(
            "periodic point system is not zero-dimensional: {}",
            diagnostics.join("; ")
        )));
    }
    Ok(out)
}

/// `max_i |F_i(p) / F_c(p) - p_i|` in the chart `c` of the largest
/// coordinate of `p`.
fn chart_residual(num: &NumMap, p: &[Cx]) -> BigFloat {
    let c = max_index(p);
    let q = normalize_at(p, c);
    let img = num.eval(&q);
    let prec = p[0].prec();
    if img[c].is_zero() {
        return BigFloat::from_f64(f64::MAX, prec);
    }
    let mut worst = BigFloat::zero(prec);
    for i in 0..q.len() {
        let r = (&(&img[i] / &img[c]) - &q[i]).max_abs();
        if r > worst {
            worst = r;
        }
    }
    worst
}

fn normalize_at(p: &[Cx], c: usize) -> Vec<Cx> {
    let prec = p[0].prec();
    let s = &Cx::one(prec) / &p[c];
    let mut q: Vec<Cx> = p.iter().map(|x| x * &s).collect();
    q[c] = Cx::one(prec);
    q
}

fn minimal_period(num: &NumMap, p: &[Cx], l: u32, prec: u32) -> u32 {
    let tol_bits = prec as f64 / 4.0;
    let mut orbit = vec![p.to_vec()];
    for _ in 1..l {
        match num.push(orbit.last().unwrap()) {
            Ok(q) => orbit.push(q),
            Err(_) => return l,
        }
    }
    for q in 1..l {
        if l % q != 0 {
            continue;
        }
        let Ok(img) = num.push(&orbit[(q - 1) as usize]) else {
            continue;
        };
        if projective_distance(&img, p).log2_abs() < -tol_bits {
            return q;
        }
    }
    l
}

/// High-precision evaluator for the partial derivatives of a map.
pub struct NumJacobian {
    partials: Vec<Vec<NumForm>>,
}

impl NumJacobian {
    pub fn new(m: &ProjectiveMap, prec: u32) -> Self {
        NumJacobian {
            partials: m
                .jacobian_matrix()
                .iter()
                .map(|row| row.iter().map(|h| h.numeric(prec)).collect())
                .collect(),
        }
    }
}

/// Jacobian of `x -> f(x)` read in affine charts: source chart `src` at the
/// point `x` (with `x_src = 1`) and target chart `dst`.
fn chart_jacobian(
    num: &NumMap,
    jac: &NumJacobian,
    x: &[Cx],
    src: usize,
    dst: usize,
) -> Result<Vec<Vec<Cx>>> {
    let prec = x[0].prec();
    let fx = num.eval(x);
    let fc = &fx[dst];
    if fc.max_abs().log2_abs() < -(prec as f64) / 2.0 {
        return Err(Error::Precision(
            "orbit point too close to the hyperplane at infinity of the chart".into(),
        ));
    }
    let fc2 = fc * fc;
    let n = x.len();
    let rows: Vec<usize> = (0..n).filter(|&i| i != dst).collect();
    let cols: Vec<usize> = (0..n).filter(|&a| a != src).collect();
    Ok(rows
        .iter()
        .map(|&i| {
            cols.iter()
                .map(|&a| {
                    let dfi = jac.partials[i][a].eval(x);
                    let dfc = jac.partials[dst][a].eval(x);
                    &(&(&dfi * fc) - &(&fx[i] * &dfc)) / &fc2
                })
                .collect()
        })
        .collect())
}

fn mat_mul(a: &[Vec<Cx>], b: &[Vec<Cx>]) -> Vec<Vec<Cx>> {
    let prec = a[0][0].prec();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| {
                    (0..b.len()).fold(Cx::zero(prec), |acc, t| &acc + &(&a[i][t] * &b[t][j]))
                })
                .collect()
        })
        .collect()
}

/// Eigenvalues of `D f^period` at `p`, chaining affine Jacobians along the
/// orbit; each orbit point uses the chart of its largest coordinate and the
/// cycle starts and ends in `chart`.
pub fn multipliers_in_chart(
    num: &NumMap,
    jac: &NumJacobian,
    p: &[Cx],
    period: u32,
    chart: usize,
) -> Result<Vec<Cx>> {
    if p[chart].max_abs().log2_abs() < -(p[0].prec() as f64) / 4.0 {
        return Err(Error::Precision(format!("point lies on the boundary of chart {chart}")));
    }
    let mut x = normalize_at(p, chart);
    let mut src = chart;
    let mut acc: Option<Vec<Vec<Cx>>> = None;
    for step in 0..period {
        let next = num.push(&x)?;
        let dst = if step + 1 == period { chart } else { max_index(&next) };
        let j = chart_jacobian(num, jac, &x, src, dst)?;
        acc = Some(match acc {
            None => j,
            Some(a) => mat_mul(&j, &a),
        });
        x = normalize_at(&next, dst);
        src = dst;
    }
    Ok(eigenvalues(&acc.unwrap()))
}

/// Multipliers of a periodic point of the given period.
pub fn multipliers(m: &ProjectiveMap, p: &[Cx], period: u32, prec: u32) -> Result<Vec<Cx>> {
    let p = normalize_max(p).ok_or(Error::Indeterminate(prec))?;
    let num = m.numeric(prec);
    let jac = NumJacobian::new(m, prec);
    multipliers_in_chart(&num, &jac, &p, period, max_index(&p))
}

/// Eigenvalues sorted by decreasing modulus: closed form up to size 2,
/// characteristic polynomial roots beyond.
pub fn eigenvalues(a: &[Vec<Cx>]) -> Vec<Cx> {
    let n = a.len();
    let prec = a[0][0].prec();
    let mut ev = match n {
        1 => vec![a[0][0].clone()],
        2 => {
            let tr = &a[0][0] + &a[1][1];
            let det = &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]);
            let four = Cx::from_f64(4.0, 0.0, prec);
            let disc = (&(&tr * &tr) - &(&four * &det)).sqrt();
            let half = BigFloat::from_f64(0.5, prec);
            vec![(&tr + &disc).scale(&half), (&tr - &disc).scale(&half)]
        }
        _ => {
            let cp = charpoly(a);
            roots::poly_roots(&cp, prec).unwrap_or_default()
        }
    };
    ev.sort_by(|x, y| {
        y.abs()
            .partial_cmp(&x.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                let (xa, ya) = (x.to_c64().arg(), y.to_c64().arg());
                xa.partial_cmp(&ya).unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    ev
}

/// Characteristic polynomial `det(t I - A)` by Faddeev–LeVerrier, in
/// ascending coefficients.
fn charpoly(a: &[Vec<Cx>]) -> Vec<Cx> {
    let n = a.len();
    let prec = a[0][0].prec();
    let ident: Vec<Vec<Cx>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Cx::one(prec) } else { Cx::zero(prec) })
                .collect()
        })
        .collect();
    let mut coeffs = vec![Cx::zero(prec); n + 1];
    coeffs[n] = Cx::one(prec);
    let mut mk = vec![vec![Cx::zero(prec); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let am = mat_mul(a, &mk);
        mk = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| &am[i][j] + &(&ident[i][j] * &coeffs[n - k + 1]))
                    .collect()
            })
            .collect();
        let amk = mat_mul(a, &mk);
        let tr = (0..n).fold(Cx::zero(prec), |acc, i| &acc + &amk[i][i]);
        let kk = BigFloat::from_i64(-(k as i64), prec);
        coeffs[n - k] = Cx::new(&tr.re / &kk, &tr.im / &kk);
    }
    coeffs
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditedPoint {
    pub coords: Vec<[String; 2]>,
    pub period: u32,
    pub residual: String,
    pub multipliers: Vec<[String; 2]>,
    pub classes: Vec<EigenClass>,
    pub multiplicity_suspect: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueAudit {
    pub points: Vec<AuditedPoint>,
    pub violations: Vec<String>,
    /// Neutral multipliers that are not roots of unity within tolerance;
    /// reported, never counted as violations.
    pub findings: Vec<String>,
    pub tolerances: ClassifyTol,
}

fn describe(p: &PeriodicPoint) -> String {
    let c: Vec<String> = p.coords.iter().map(|z| format!("{z:.10}")).collect();
    format!("({}) of period {}", c.join(" : "), p.period)
}

fn audited(p: &PeriodicPoint, digits: usize) -> AuditedPoint {
    AuditedPoint {
        coords: p.coords.iter().map(|z| z.to_strings(digits)).collect(),
        period: p.period,
        residual: p.residual.to_sci_string(6),
        multipliers: p.multipliers.iter().map(|z| z.to_strings(digits)).collect(),
        classes: p.classes.clone(),
        multiplicity_suspect: p.multiplicity_suspect,
    }
}

/// Applies the eigenvalue dichotomy to every listed point: no attracting
/// nonzero or parabolic multiplier, and a repelling multiplier whenever the
/// spectrum is not entirely zero.
pub fn eigenvalue_audit(points: &[PeriodicPoint], tol: &ClassifyTol) -> EigenvalueAudit {
    let mut violations = Vec::new();
    let mut findings = Vec::new();
    for p in points {
        let d = describe(p);
        for (lam, cl) in p.multipliers.iter().zip(&p.classes) {
            match cl {
                EigenClass::AttractingNonzero => {
                    violations.push(format!("{d}: attracting nonzero multiplier {lam:.12}"))
                }
                EigenClass::Parabolic(q) => {
                    violations.push(format!("{d}: parabolic multiplier {lam:.12} of order {q}"))
                }
                EigenClass::NeutralIrrationalCandidate => {
                    findings.push(format!("{d}: neutral multiplier {lam:.12} not a root of unity"))
                }
                _ => {}
            }
        }
        let repelling = p.classes.iter().any(|c| *c == EigenClass::Repelling);
        let nonzero_classified = p
            .classes
            .iter()
            .any(|c| matches!(c, EigenClass::AttractingNonzero | EigenClass::Parabolic(_)));
        let only_zero_or_neutral = p
            .classes
            .iter()
            .all(|c| matches!(c, EigenClass::Zero | EigenClass::NeutralIrrationalCandidate));
        let nilpotent = p.classes.iter().all(|c| *c == EigenClass::Zero);
        if !repelling && !nilpotent {
            if nonzero_classified || !only_zero_or_neutral {
                violations.push(format!(
                    "{d}: spectrum is neither nilpotent nor contains a repelling multiplier"
                ));
            } else {
                findings.push(format!(
                    "{d}: no repelling multiplier; the non-zero ones are neutral candidates"
                ));
            }
        }
    }
    EigenvalueAudit {
        points: points.iter().map(|p| audited(p, 30)).collect(),
        violations,
        findings,
        tolerances: *tol,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BezoutReport {
    pub exponent: u32,
    pub expected: u64,
    pub found: u64,
    pub pass: bool,
    pub warning: Option<String>,
}

/// `(D^{k+1} - 1)/(D - 1)` with `D = d^l`: the number of fixed points of
/// `f^l` counted with multiplicity.
pub fn bezout_number(k: usize, d: u32, l: u32) -> u64 {
    let big_d = (d as u64).pow(l);
    (0..=k as u32).map(|i| big_d.pow(i)).sum()
}

/// Compares the multiplicity-weighted count of the points of a search with
/// the classical fixed-point count.
pub fn bezout_audit(m: &ProjectiveMap, search: &PeriodicSearch) -> BezoutReport {
    let expected = bezout_number(m.k(), m.degree(), search.exponent);
    let found: u64 = search.points.iter().map(|p| p.multiplicity as u64).sum();
    let pass = found == expected;
    BezoutReport {
        exponent: search.exponent,
        expected,
        found,
        pass,
        warning: (!pass).then(|| {
            format!("solver may be incomplete: found {found} of {expected} fixed points of f^{}", search.exponent)
        }),
    }
}

/// Points of minimal period `l` for every `l <= max_period`, with the
/// per-exponent searches used for the Bezout checks.
pub fn periodic_table(
    m: &ProjectiveMap,
    max_period: u32,
    prec: u32,
    budget: u64,
    tol: &ClassifyTol,
) -> Result<(Vec<PeriodicPoint>, Vec<PeriodicSearch>)> {
    check_budget(m, max_period, budget)?;
    let mut all = Vec::new();
    let mut searches = Vec::new();
    for l in 1..=max_period {
        let s = find_periodic(m, l, prec, budget, tol)?;
        all.extend(s.points.iter().filter(|p| p.period == l).cloned());
        searches.push(s);
    }
    Ok((all, searches))
}

#[allow(dead_code)]
fn is_zero_rational(q: &Rational) -> bool {
    q.is_zero()
}
