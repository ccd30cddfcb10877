//! Forward images of components by elimination.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{lift_chart, split_components, Component};
use crate::bigfloat::{BigFloat, Cx, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::mpoly::{sylvester_resultant, MPoly, Rational};
use crate::poly::HomPoly;
use crate::projmap::{LinearEmbedding, NumMap, ProjectiveMap};
use crate::roots;

/// Membership tolerance for pruning extraneous factors, in bits below the
/// coefficient scale (about 1e-25).
const PRUNE_BITS: f64 = 83.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageMethod {
    /// Binary resultant on P^1.
    BinaryResultant,
    /// A known candidate `M` with `c | M ∘ f`.
    Candidate,
    /// Implicitization of a parametrized line.
    Parametrization,
    /// Double resultant across source charts.
    DoubleResultant,
}

#[derive(Clone, Debug)]
pub struct ImageResult {
    /// Square-free defining form of the image.
    pub form: HomPoly,
    pub components: Vec<Component>,
    pub method: ImageMethod,
}

/// The set-theoretic image `f({c = 0})`.
///
/// On `P^2`, linear candidates are tried first; a line is otherwise
/// implicitized through its parametrization and a curve of higher degree
/// by double resultants.
pub fn image_of_component(
    m: &ProjectiveMap,
    c: &Component,
    candidates: &[Component],
) -> Result<ImageResult> {
    if c.form().nvars() != m.nvars() {
        return Err(Error::VarCountMismatch(c.form().nvars(), m.nvars()));
    }
    let extra: Vec<HomPoly> = candidates
        .iter()
        .filter(|x| x.is_linear())
        .map(|x| x.form().clone())
        .collect();
    let (form, method) = match m.k() {
        1 => (image_binary(m, c.form())?, ImageMethod::BinaryResultant),
        2 => {
            if let Some(f) = image_by_candidates(m, c, candidates)? {
                (f, ImageMethod::Candidate)
            } else if c.is_linear() {
                (
                    image_by_parametrization(m, &c.linear_coeffs().unwrap(), &extra)?,
                    ImageMethod::Parametrization,
                )
            } else {
                (
                    image_by_double_resultant(m, c.form(), &extra)?,
                    ImageMethod::DoubleResultant,
                )
            }
        }
        k => return Err(Error::Unsupported(format!("images on P^{k}"))),
    };
    let mut components = split_components(&form, &extra)?;
    components.sort_by(super::component_order);
    Ok(ImageResult {
        form,
        components,
        method,
    })
}

/// `Res_{x0}(c(x0, 1), Y1 f0(x0, 1) - Y0 f1(x0, 1))` with formal degrees,
/// which is the homogeneous resultant in the source.
fn image_binary(m: &ProjectiveMap, c: &HomPoly) -> Result<HomPoly> {
    let d = m.degree();
    let e = c.degree();
    let targets = [Some(0), None];
    let cc = lift_chart(c, Some(1), &targets, 3);
    let f0 = lift_chart(&m.comps()[0], Some(1), &targets, 3);
    let f1 = lift_chart(&m.comps()[1], Some(1), &targets, 3);
    let y0 = MPoly::var(3, 1);
    let y1 = MPoly::var(3, 2);
    let eq = y1.mul(&f0).sub(&y0.mul(&f1));
    let r = sylvester_resultant(&cc, &eq, 0, e, d);
    if r.is_zero() {
        return Err(Error::ImageFailed(format!(
            "binary resultant vanishes for component {c}"
        )));
    }
    let r = r.remap(2, &[None, Some(0), Some(1)]);
    HomPoly::new(r, e)?.squarefree_part()
}

/// Accepts the first candidate `M` of matching degree with `c | M ∘ f`
/// that also vanishes at a pushed sample point of `{c = 0}`.
fn image_by_candidates(
    m: &ProjectiveMap,
    c: &Component,
    candidates: &[Component],
) -> Result<Option<HomPoly>> {
    for cand in candidates {
        if !cand.is_linear() {
            continue;
        }
        let pulled = cand.form().compose(m.comps())?;
        if pulled.exact_divide(c.form())?.is_none() {
            continue;
        }
        if let Some(coeffs) = c.linear_coeffs() {
            let a = LinearEmbedding::hyperplane(&coeffs);
            let s = [Rational::from_integer(3.into()), Rational::from_integer(7.into())];
            let img = m.eval_rational(&a.apply(&s));
            if !cand.form().eval(&img).is_zero() {
                continue;
            }
        }
        return Ok(Some(cand.form().clone()));
    }
    Ok(None)
}

/// Image of the line `a . x = 0`: with `g = f ∘ A` for a parametrization
/// `A`, eliminate the parameter from `Y_p g_i - Y_i g_p` for the two
/// indices `i != p`, then drop factors that miss exactly pushed samples.
pub fn image_by_parametrization(
    m: &ProjectiveMap,
    a: &[Rational],
    extra: &[HomPoly],
) -> Result<HomPoly> {
    if m.k() != 2 {
        return Err(Error::Unsupported("parametrized images need P^2".into()));
    }
    let d = m.degree();
    let emb = LinearEmbedding::hyperplane(a);
    let subs = emb.coordinate_forms();
    let g: Vec<HomPoly> = m
        .comps()
        .iter()
        .map(|c| c.compose(&subs))
        .collect::<Result<_>>()?;
    let mut pivots: Vec<usize> = (0..3).filter(|&p| !g[p].is_zero()).collect();
    pivots.sort_by_key(|&p| std::cmp::Reverse(g[p].num_terms()));
    for p in pivots {
        let others: Vec<usize> = (0..3).filter(|&i| i != p).collect();
        // ring (s, Y0, Y1, Y2) with t = 1
        let lift = |h: &HomPoly| lift_chart(h, Some(1), &[Some(0), None], 4);
        let gp = lift(&g[p]);
        let eqs: Vec<MPoly> = others
            .iter()
            .map(|&i| {
                MPoly::var(4, 1 + p)
                    .mul(&lift(&g[i]))
                    .sub(&MPoly::var(4, 1 + i).mul(&gp))
            })
            .collect();
        let r = sylvester_resultant(&eqs[0], &eqs[1], 0, d, d);
        if r.is_zero() {
            continue;
        }
        let r = HomPoly::new(r.remap(3, &[None, Some(0), Some(1), Some(2)]), 2 * d)?;
        let samples = exact_line_samples(m, &emb, 2 * d as usize + 4);
        return prune_exact(&r, &samples, extra);
    }
    Err(Error::ImageFailed(format!(
        "parametric elimination degenerate for the line with coefficients {a:?}"
    )))
}

fn exact_line_samples(m: &ProjectiveMap, emb: &LinearEmbedding, n: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(m.eval_rational(&emb.apply(&[Rational::one(), Rational::zero()])));
    let mut k: i64 = 0;
    while out.len() < n + 1 {
        let s = Rational::from_integer(BigInt::from(k));
        out.push(m.eval_rational(&emb.apply(&[s, Rational::one()])));
        k = if k <= 0 { 1 - k } else { -k };
    }
    out
}

/// Keeps the square-free factors of `r` that vanish at every sample.
fn prune_exact(r: &HomPoly, samples: &[Vec<Rational>], extra: &[HomPoly]) -> Result<HomPoly> {
    let parts = split_components(r, extra)?;
    let kept: Vec<&Component> = parts
        .iter()
        .filter(|c| samples.iter().all(|p| c.form().eval(p).is_zero()))
        .collect();
    product_of(&kept, r.nvars())
}

fn product_of(parts: &[&Component], nvars: usize) -> Result<HomPoly> {
    if parts.is_empty() {
        return Err(Error::ImageFailed(
            "no eliminant factor vanishes on the pushed samples".into(),
        ));
    }
    let mut acc = HomPoly::one(nvars);
    for c in parts {
        acc = acc.mul(c.form())?;
    }
    Ok(acc.normalized())
}

/// One elimination route: source chart, order of the two affine source
/// variables, and the pivot image coordinate.
#[derive(Clone, Copy, Debug)]
struct Route {
    chart: usize,
    first: usize,
    second: usize,
    pivot: usize,
}

fn routes_for(c: &HomPoly) -> Vec<Route> {
    let mut out = Vec::new();
    for chart in [2, 0, 1] {
        let rest: Vec<usize> = (0..3).filter(|&i| i != chart).collect();
        for (first, second) in [(rest[0], rest[1]), (rest[1], rest[0])] {
            // the first eliminated variable must occur in c on the chart
            let cc = c.as_mpoly().eval_var(chart, &Rational::one());
            if cc.degree_in(first).unwrap_or(0) == 0 {
                continue;
            }
            for pivot in 0..3 {
                out.push(Route {
                    chart,
                    first,
                    second,
                    pivot,
                });
            }
        }
    }
    out
}

fn eliminate(m: &ProjectiveMap, c: &HomPoly, route: Route) -> Result<Option<HomPoly>> {
    // ring (u, w, Y0, Y1, Y2) where u, w are the first and second variables
    let mut targets = vec![None; 3];
    targets[route.first] = Some(0);
    targets[route.second] = Some(1);
    let lift = |h: &HomPoly| lift_chart(h, Some(route.chart), &targets, 5);
    let cc = lift(c);
    let fp = lift(&m.comps()[route.pivot]);
    let eqs: Vec<MPoly> = (0..3)
        .filter(|&i| i != route.pivot)
        .map(|i| {
            MPoly::var(5, 2 + route.pivot)
                .mul(&lift(&m.comps()[i]))
                .sub(&MPoly::var(5, 2 + i).mul(&fp))
        })
        .collect();
    let dc = cc.degree_in(0).unwrap_or(0);
    let mut rs = Vec::new();
    for e in &eqs {
        let de = e.degree_in(0).unwrap_or(0);
        if de == 0 {
            // the equation does not involve u: it passes through unchanged
            rs.push(e.pow(dc));
            continue;
        }
        rs.push(sylvester_resultant(&cc, e, 0, dc, de));
    }
    if rs.iter().any(|r| r.is_zero()) {
        return Ok(None);
    }
    let d0 = rs[0].degree_in(1).unwrap_or(0);
    let d1 = rs[1].degree_in(1).unwrap_or(0);
    if d0 == 0 && d1 == 0 {
        return Ok(None);
    }
    let r = sylvester_resultant(&rs[0], &rs[1], 1, d0, d1);
    if r.is_zero() {
        return Ok(None);
    }
    let r = r.remap(3, &[None, None, Some(0), Some(1), Some(2)]);
    let deg = r.total_degree().unwrap_or(0);
    let h = HomPoly::new(r, deg)?;
    if h.degree() == 0 {
        return Ok(None);
    }
    Ok(Some(h))
}

/// General elimination for any curve on `P^2`: double resultants over
/// several routes, their gcd, square-free reduction, then numerical pruning
/// of factors that miss pushed sample points.
pub fn image_by_double_resultant(
    m: &ProjectiveMap,
    c: &HomPoly,
    extra: &[HomPoly],
) -> Result<HomPoly> {
    if m.k() != 2 {
        return Err(Error::Unsupported("double resultants need P^2".into()));
    }
    let mut acc: Option<HomPoly> = None;
    let mut used = 0;
    let mut diagnostics = Vec::new();
    for route in routes_for(c) {
        match eliminate(m, c, route)? {
            Some(h) => {
                let h = h.squarefree_part()?;
                acc = Some(match acc {
                    None => h,
                    Some(a) => a.gcd(&h)?,
                });
                used += 1;
                if used >= 3 {
                    break;
                }
            }
            None => diagnostics.push(format!("{route:?} degenerate")),
        }
    }
    let Some(r) = acc else {
        return Err(Error::ImageFailed(format!(
            "elimination degenerate in all charts for {c}: {}",
            diagnostics.join("; ")
        )));
    };
    let samples = numeric_curve_samples(m, c, 12, DEFAULT_PRECISION)?;
    let parts = split_components(&r, extra)?;
    let kept: Vec<&Component> = parts
        .iter()
        .filter(|comp| samples.iter().all(|p| vanishes_at(comp.form(), p)))
        .collect();
    product_of(&kept, 3)
}

/// `|h(p)|` relative to the coefficient size, for `p` with max modulus 1.
pub(crate) fn vanishes_at(h: &HomPoly, p: &[Cx]) -> bool {
    let prec = p[0].prec();
    let nf = h.numeric(prec);
    let v = nf.eval(p).max_abs();
    v.log2_abs() - nf.coefficient_norm().log2_abs() < -PRUNE_BITS
}

/// Points of `f({c = 0})`: points of the curve found by solving `c` along
/// random rational vertical lines of a chart, pushed forward.
pub(crate) fn numeric_curve_samples(
    m: &ProjectiveMap,
    c: &HomPoly,
    count: usize,
    prec: u32,
) -> Result<Vec<Vec<Cx>>> {
    let num: NumMap = m.numeric(prec);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a3b1e);
    let mut out = Vec::new();
    let chart = 2;
    let cc = c.as_mpoly().eval_var(chart, &Rational::one());
    // solve for the variable with the larger degree
    let (solve_var, fix_var) = if cc.degree_in(0).unwrap_or(0) >= cc.degree_in(1).unwrap_or(0) {
        (0, 1)
    } else {
        (1, 0)
    };
    let mut attempts = 0;
    while out.len() < count && attempts < 10 * count {
        attempts += 1;
        let val = Rational::new(
            BigInt::from(rng.gen_range(-40i64..=40)),
            BigInt::from(rng.gen_range(1i64..=9)),
        );
        let uni = cc.eval_var(fix_var, &val);
        if uni.degree_in(solve_var).unwrap_or(0) == 0 {
            continue;
        }
        let coeffs: Vec<Cx> = uni
            .coeffs_in(solve_var)
            .iter()
            .map(|q| Cx::from_rational(&q.constant_value().unwrap_or_else(Rational::zero), prec))
            .collect();
        for r in roots::poly_roots(&coeffs, prec)? {
            let mut p = vec![Cx::one(prec); 3];
            p[solve_var] = r;
            p[fix_var] = Cx::from_rational(&val, prec);
            if let Ok(img) = num.push(&p) {
                out.push(img);
            }
        }
    }
    if out.len() < count.min(10) {
        return Err(Error::ImageFailed(format!(
            "could not sample the curve {c}"
        )));
    }
    let _ = BigFloat::zero(prec);
    Ok(out)
}
