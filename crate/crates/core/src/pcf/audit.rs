//! Structural audits: weak transversality of component arrangements,
//! containment of restricted critical points, and topological degrees.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::image::vanishes_at;
use super::{split_components, Component, TowerLevel};
use crate::bigfloat::{BigFloat, Cx};
use crate::error::{Error, Result};
use crate::linalg;
use crate::mpoly::{MPoly, Rational};
use crate::poly::HomPoly;
use crate::projmap::{format_point, normalize_max, projective_distance, rationalize_point, ProjectiveMap};
use crate::roots;

/// Relative tolerance for numerical ranks of gradient matrices.
const RANK_TOL: f64 = 1e-20;
/// Offset of the nearby samples used for the generic rank.
const NEARBY: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transversality {
    WeaklyTransverse,
    /// Numerical check on sampled neighbourhoods.
    #[serde(rename = "weakly-transverse (sampled)")]
    WeaklyTransverseSampled,
    #[serde(rename = "not-weakly-transverse")]
    NotWeaklyTransverse {
        witness: String,
        rank_at_point: usize,
        generic_rank: usize,
    },
    Inconclusive(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionEvidence {
    pub point: String,
    pub exact: bool,
    /// Indices of the components through the point.
    pub incident: Vec<usize>,
    pub rank_at_point: usize,
    pub generic_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransversalityReport {
    pub verdict: Transversality,
    pub intersections: Vec<IntersectionEvidence>,
    pub rank_tolerance: f64,
}

fn cross(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// Weak transversality of a component arrangement on `P^2` (vacuous on
/// `P^1`): exact for lines, sampled otherwise.
pub fn weak_transversality(components: &[Component], prec: u32) -> Result<TransversalityReport> {
    let n = components.first().map_or(3, |c| c.form().nvars());
    if n == 2 || components.len() < 2 {
        return Ok(TransversalityReport {
            verdict: Transversality::WeaklyTransverse,
            intersections: Vec::new(),
            rank_tolerance: RANK_TOL,
        });
    }
    if n != 3 {
        return Err(Error::Unsupported(format!("transversality on P^{}", n - 1)));
    }
    if components.iter().all(|c| c.is_linear()) {
        return Ok(linear_transversality(components));
    }
    sampled_transversality(components, prec)
}

fn linear_transversality(components: &[Component]) -> TransversalityReport {
    let coeffs: Vec<Vec<Rational>> = components.iter().map(|c| c.linear_coeffs().unwrap()).collect();
    let mut points: Vec<Vec<Rational>> = Vec::new();
    for i in 0..coeffs.len() {
        for j in (i + 1)..coeffs.len() {
            let p = linalg::normalize_point(&cross(&coeffs[i], &coeffs[j]));
            if !points.contains(&p) {
                points.push(p);
            }
        }
    }
    let intersections = points
        .iter()
        .map(|p| {
            let incident: Vec<usize> = (0..coeffs.len())
                .filter(|&i| components[i].form().eval(p).is_zero())
                .collect();
            let rows: linalg::RatMatrix = incident.iter().map(|&i| coeffs[i].clone()).collect();
            let r = linalg::rank(&rows);
            IntersectionEvidence {
                point: format_point(p),
                exact: true,
                incident,
                rank_at_point: r,
                generic_rank: r,
            }
        })
        .collect();
    TransversalityReport {
        verdict: Transversality::WeaklyTransverse,
        intersections,
        rank_tolerance: RANK_TOL,
    }
}

/// Dehomogenizes at `chart` into two variables in index order.
fn chart_poly(h: &HomPoly, chart: usize) -> MPoly {
    let mut map = vec![None; 3];
    let mut k = 0;
    for (i, slot) in map.iter_mut().enumerate() {
        if i != chart {
            *slot = Some(k);
            k += 1;
        }
    }
    h.as_mpoly()
        .eval_var(chart, &Rational::from_integer(1.into()))
        .remap(2, &map)
}

fn max_index(p: &[Cx]) -> usize {
    let mut best = 0;
    for i in 1..p.len() {
        if p[i].max_abs() > p[best].max_abs() {
            best = i;
        }
    }
    best
}

/// Affine gradients in the chart of the largest coordinate.
fn chart_gradients(forms: &[&HomPoly], p: &[Cx], chart: usize) -> Vec<Vec<Cx>> {
    let prec = p[0].prec();
    let mut q = p.to_vec();
    let s = &Cx::one(prec) / &p[chart];
    for x in q.iter_mut() {
        *x = &*x * &s;
    }
    forms
        .iter()
        .map(|h| {
            (0..3)
                .filter(|&a| a != chart)
                .map(|a| h.partial(a).unwrap().numeric(prec).eval(&q))
                .collect()
        })
        .collect()
}

fn sampled_transversality(components: &[Component], prec: u32) -> Result<TransversalityReport> {
    let mut points: Vec<Vec<Cx>> = Vec::new();
    let tol_bits = prec as f64 / 4.0;
    for i in 0..components.len() {
        for j in (i + 1)..components.len() {
            for chart in 0..3 {
                let a = chart_poly(components[i].form(), chart);
                let b = chart_poly(components[j].form(), chart);
                if a.is_constant() || b.is_constant() {
                    continue;
                }
                let sols = match roots::solve_planar(&a, &b, prec) {
                    Ok(s) => s,
                    Err(e) => {
                        return Ok(TransversalityReport {
                            verdict: Transversality::Inconclusive(format!(
                                "intersection of {} and {}: {e}",
                                components[i], components[j]
                            )),
                            intersections: Vec::new(),
                            rank_tolerance: RANK_TOL,
                        })
                    }
                };
                for s in sols {
                    let mut p = vec![Cx::one(prec); 3];
                    let others: Vec<usize> = (0..3).filter(|&t| t != chart).collect();
                    p[others[0]] = s.point[0].clone();
                    p[others[1]] = s.point[1].clone();
                    let p = normalize_max(&p).unwrap();
                    if !points
                        .iter()
                        .any(|q| projective_distance(q, &p).log2_abs() < -tol_bits)
                    {
                        points.push(p);
                    }
                }
            }
        }
    }
    let tol = BigFloat::from_f64(RANK_TOL, prec);
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a5e);
    let mut evidence = Vec::new();
    let mut verdict = Transversality::WeaklyTransverseSampled;
    for p in &points {
        let incident: Vec<usize> = (0..components.len())
            .filter(|&i| vanishes_at(components[i].form(), p))
            .collect();
        let forms: Vec<&HomPoly> = incident.iter().map(|&i| components[i].form()).collect();
        let chart = max_index(p);
        let r0 = linalg::numeric_rank(&chart_gradients(&forms, p, chart), &tol);
        let mut generic = 0;
        for _ in 0..4 {
            let q: Vec<Cx> = p
                .iter()
                .enumerate()
                .map(|(a, x)| {
                    if a == chart {
                        x.clone()
                    } else {
                        let d = Cx::from_f64(
                            NEARBY * rng.gen_range(-1.0..1.0),
                            NEARBY * rng.gen_range(-1.0..1.0),
                            prec,
                        );
                        x + &d
                    }
                })
                .collect();
            generic = generic.max(linalg::numeric_rank(&chart_gradients(&forms, &q, chart), &tol));
        }
        let (label, exact) = match rationalize_point(p) {
            Some(q) if incident.iter().all(|&i| components[i].form().eval(&q).is_zero()) => {
                (format_point(&linalg::normalize_point(&q)), true)
            }
            _ => (
                format!(
                    "({})",
                    p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")
                ),
                false,
            ),
        };
        if r0 < generic && matches!(verdict, Transversality::WeaklyTransverseSampled) {
            verdict = Transversality::NotWeaklyTransverse {
                witness: label.clone(),
                rank_at_point: r0,
                generic_rank: generic,
            };
        }
        evidence.push(IntersectionEvidence {
            point: label,
            exact,
            incident,
            rank_at_point: r0,
            generic_rank: generic,
        });
    }
    Ok(TransversalityReport {
        verdict,
        intersections: evidence,
        rank_tolerance: RANK_TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCheck {
    pub point: String,
    pub exact: bool,
    /// Ambient critical forms (of the iterate) other than the line that
    /// vanish at the point.
    pub on: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentEntry {
    pub entry: usize,
    pub line: String,
    pub critical_points: Vec<PointCheck>,
    /// Intersections with the other critical lines, when the first-return
    /// exponent is 1 and the critical set is a line arrangement.
    pub intersections: Option<Vec<String>>,
    pub equal_to_intersections: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub entries: Vec<ContainmentEntry>,
    pub pass: bool,
}

/// Checks that every critical point of each `P^1` restriction of a tower
/// level lies on an ambient critical component of `f^{k_m}` other than the
/// entry's own line.
pub fn restricted_critical_containment(
    m: &ProjectiveMap,
    level: &TowerLevel,
    ambient_crit: &[Component],
    prec: u32,
) -> Result<ContainmentReport> {
    let k1 = level.cumulative_exponent;
    let mut iterates = vec![None];
    for j in 1..k1 {
        iterates.push(Some(m.iterate(j)?));
    }
    let mut entries = Vec::new();
    for (idx, e) in level.entries.iter().enumerate() {
        let (Some(g), Some(emb)) = (&e.restricted_map, &e.embedding) else {
            continue;
        };
        if g.k() != 1 || m.k() != 2 {
            continue;
        }
        let line = emb.equations().remove(0);
        let mut others: Vec<HomPoly> = Vec::new();
        for c in ambient_crit {
            for it in &iterates {
                let mut h = match it {
                    None => c.form().clone(),
                    Some(fj) => c.form().compose(fj.comps())?,
                };
                while let Some(q) = h.exact_divide(&line)? {
                    if q.degree() == h.degree() {
                        break;
                    }
                    h = q;
                }
                if h.degree() > 0 && !others.contains(&h) {
                    others.push(h);
                }
            }
        }
        let crit = split_components(&g.jacobian_det(), &[])?;
        let mut checks = Vec::new();
        let mut exact_points: Vec<Vec<Rational>> = Vec::new();
        for c in &crit {
            if let Some(a) = c.linear_coeffs() {
                // the root of a*s + b*t is (-b : a)
                let s = vec![-a[1].clone(), a[0].clone()];
                let p = linalg::normalize_point(&emb.apply(&s));
                let on: Vec<String> = others
                    .iter()
                    .filter(|h| h.eval(&p).is_zero())
                    .map(|h| h.to_string())
                    .collect();
                checks.push(PointCheck {
                    point: format_point(&p),
                    exact: true,
                    pass: !on.is_empty(),
                    on,
                });
                exact_points.push(p);
            } else {
                let coeffs: Vec<Cx> = c
                    .form()
                    .as_mpoly()
                    .eval_var(1, &Rational::from_integer(1.into()))
                    .coeffs_in(0)
                    .iter()
                    .map(|q| Cx::from_rational(&q.constant_value().unwrap_or_default(), prec))
                    .collect();
                for r in roots::poly_roots(&coeffs, prec)? {
                    let p = normalize_max(&emb.apply_numeric(&[r, Cx::one(prec)])).unwrap();
                    let on: Vec<String> = others
                        .iter()
                        .filter(|h| vanishes_at(h, &p))
                        .map(|h| h.to_string())
                        .collect();
                    checks.push(PointCheck {
                        point: format!(
                            "({})",
                            p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")
                        ),
                        exact: false,
                        pass: !on.is_empty(),
                        on,
                    });
                }
            }
        }
        let (intersections, equal) = if k1 == 1 && ambient_crit.iter().all(|c| c.is_linear()) {
            let lc = line.linear_coeffs().unwrap();
            let mut pts: Vec<Vec<Rational>> = Vec::new();
            for c in ambient_crit {
                let cc = c.linear_coeffs().unwrap();
                let x = cross(&lc, &cc);
                if x.iter().all(|v| v.is_zero()) {
                    continue;
                }
                let p = linalg::normalize_point(&x);
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
            let all_exact = checks.iter().all(|c| c.exact);
            let equal = all_exact
                && pts.len() == exact_points.len()
                && pts.iter().all(|p| exact_points.contains(p));
            (
                Some(pts.iter().map(|p| format_point(p)).collect()),
                Some(equal),
            )
        } else {
            (None, None)
        };
        let pass = checks.iter().all(|c| c.pass);
        entries.push(ContainmentEntry {
            entry: idx,
            line: line.to_string(),
            critical_points: checks,
            intersections,
            equal_to_intersections: equal,
            pass,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(ContainmentReport { entries, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct TopDegEntry {
    pub level: usize,
    pub entry: usize,
    pub degree: u32,
    pub expected: u64,
    pub pass: bool,
}

/// Compares the degree of each `P^1` restriction with `d^{k}` where `k`
/// is the level's cumulative first-return exponent.
pub fn topdeg_check(level: &TowerLevel, d: u32) -> Vec<TopDegEntry> {
    level
        .entries
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let g = e.restricted_map.as_ref()?;
            if g.k() != 1 {
                return None;
            }
            let expected = (d as u64).saturating_pow(level.cumulative_exponent);
            let degree = g.p1_degree();
            Some(TopDegEntry {
                level: level.m,
                entry: i,
                degree,
                expected,
                pass: degree as u64 == expected,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcf::{build_tower, critical_components, postcritical_graph, Bounds};

    fn v(i: usize) -> HomPoly {
        HomPoly::var(3, i)
    }

    #[test]
    fn coordinate_lines_are_transverse() {
        let comps: Vec<Component> = (0..3).map(|i| Component::new(&v(i))).collect();
        let r = weak_transversality(&comps, 256).unwrap();
        assert_eq!(r.verdict, Transversality::WeaklyTransverse);
        assert_eq!(r.intersections.len(), 3);
        assert!(r.intersections.iter().all(|e| e.rank_at_point == 2));
    }

    #[test]
    fn tangent_conic_and_line() {
        let conic = v(0).mul(&v(2)).unwrap().sub(&v(1).pow(2)).unwrap();
        let comps = vec![Component::new(&conic), Component::new(&v(2))];
        let r = weak_transversality(&comps, 256).unwrap();
        assert_eq!(
            r.verdict,
            Transversality::NotWeaklyTransverse {
                witness: "(1:0:0)".into(),
                rank_at_point: 1,
                generic_rank: 2
            }
        );
    }

    #[test]
    fn squaring_containment_and_degree() {
        let f = ProjectiveMap::new(vec![v(0).pow(2), v(1).pow(2), v(2).pow(2)]).unwrap();
        let (g, verdict) = postcritical_graph(&f, Bounds::default()).unwrap();
        let t = build_tower(&f, &g, &verdict, Bounds::default()).unwrap();
        let crit = critical_components(&f).unwrap();
        let r = restricted_critical_containment(&f, &t.levels[0], &crit, 256).unwrap();
        assert!(r.pass);
        assert_eq!(r.entries.len(), 3);
        assert!(r.entries.iter().all(|e| e.equal_to_intersections == Some(true)));
        let td = topdeg_check(&t.levels[0], 2);
        assert_eq!(td.len(), 3);
        assert!(td.iter().all(|e| e.pass && e.degree == 2));
    }
}
