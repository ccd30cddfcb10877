//! Acceptance criteria 1 to 11, one report line each.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use pcflab::{analyze, load_input};
use pcflab_core::bigfloat::{BigFloat, Cx};
use pcflab_core::catalog::{lookup, CATALOG};
use pcflab_core::fatou::{basin_summary, scan, superattracting_candidates, BasinStatus, Label, ScanConfig};
use pcflab_core::linalg::kernel;
use pcflab_core::mpoly::Rational;
use pcflab_core::pcf::{
    build_tower, image_of_component, postcritical_graph, restricted_critical_containment,
    weak_transversality, Bounds, Component, EntryVerdict, PcfStatus, Transversality,
};
use pcflab_core::periodic::{
    find_periodic, multipliers_in_chart, periodic_table, eigenvalue_audit, ClassifyTol, EigenClass,
    NumJacobian, DEFAULT_ELIMINATION_BUDGET,
};
use pcflab_core::poly::HomPoly;
use pcflab_core::projmap::{format_point, normalize_max, ProjectiveMap, Validation};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREC: u32 = 256;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("{what} took {e:?}, limit {limit:?}"))
}

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn var(n: usize, i: usize) -> HomPoly {
    HomPoly::var(n, i)
}

fn catalog(name: &str) -> ProjectiveMap {
    lookup(name).expect("catalog entry").map()
}

fn log10_abs(x: &BigFloat) -> f64 {
    x.log2_abs() * std::f64::consts::LOG10_2
}

/// `0` for exact zeros, otherwise the power of ten.
fn magnitude(log10: f64) -> String {
    if log10.is_finite() {
        format!("1e{log10:.0}")
    } else {
        "0".into()
    }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let input = load_input("catalog:squaring-p2").map_err(|e| e.to_string())?;
    let report = analyze(&input, Bounds::default(), PREC, None).map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(1), "analyze")?;
    let pcf = report.pcf.as_ref().unwrap();
    ensure(pcf.verdict.status == PcfStatus::Pcf, || format!("status {:?}", pcf.verdict.status))?;
    let forms: BTreeSet<String> = pcf.graph.nodes.iter().map(|n| n.component.to_string()).collect();
    let expected: BTreeSet<String> = ["x", "y", "z"].map(String::from).into();
    ensure(forms == expected, || format!("components {forms:?}"))?;
    for (i, n) in pcf.graph.nodes.iter().enumerate() {
        ensure(n.successors == vec![i] && n.period == Some(1), || {
            format!("{} is not fixed", n.component)
        })?;
    }
    let tower = report.tower.as_ref().ok_or("no tower")?;
    ensure(tower.levels.len() == 2, || format!("{} levels", tower.levels.len()))?;
    let square = ProjectiveMap::new(vec![var(2, 0).pow(2), var(2, 1).pow(2)]).unwrap();
    let lines = &tower.levels[0].entries;
    ensure(lines.len() == 3, || format!("{} level-1 entries", lines.len()))?;
    for e in lines {
        ensure(e.restricted_map.as_ref() == Some(&square), || {
            format!("{} carries {:?}", e.locus, e.restricted_map)
        })?;
        ensure(e.verdict == EntryVerdict::Pcf, || format!("{} verdict {:?}", e.locus, e.verdict))?;
    }
    let points: BTreeSet<String> = tower.levels[1]
        .entries
        .iter()
        .filter_map(|e| e.embedding.as_ref()?.as_point())
        .map(|p| format_point(&p))
        .collect();
    let expected: BTreeSet<String> = ["(1:0:0)", "(0:1:0)", "(0:0:1)"].map(String::from).into();
    ensure(points == expected && tower.levels[1].entries.len() == 3, || {
        format!("level 2 points {points:?}")
    })?;
    Ok(format!("3 fixed lines carrying (s^2 : t^2), 3 terminal points, {:?}", t.elapsed()))
}

fn criterion_2() -> Outcome {
    let mut checked = Vec::new();
    for e in CATALOG {
        let t = Instant::now();
        let m = e.map();
        let (g, v) = postcritical_graph(&m, Bounds::default()).map_err(|x| x.to_string())?;
        ensure(v.status == PcfStatus::Pcf, || format!("{}: {:?}", e.name, v.reason))?;
        if !g.postcritical().iter().all(|c| c.is_linear()) {
            continue;
        }
        let tower = build_tower(&m, &g, &v, Bounds::default()).map_err(|x| x.to_string())?;
        for entry in tower.all_entries() {
            let ok = if entry.dim > 0 {
                entry.verdict == EntryVerdict::Pcf
            } else {
                entry.verdict == EntryVerdict::Terminal
            };
            ensure(ok, || format!("{}: {} has verdict {:?}", e.name, entry.locus, entry.verdict))?;
        }
        within(t, Duration::from_secs(30), e.name)?;
        checked.push(e.name);
    }
    ensure(checked.len() >= 3, || format!("only {} line-arrangement maps", checked.len()))?;
    Ok(format!("{} maps, every level PCF down to points", checked.len()))
}

/// Distance between complex numbers as a decimal exponent.
fn log10_dist(a: &Cx, b: &Cx) -> f64 {
    log10_abs(&(a - b).abs())
}

fn criterion_3() -> Outcome {
    let m = catalog("squaring-p2");
    let s = find_periodic(&m, 1, PREC, DEFAULT_ELIMINATION_BUDGET, &ClassifyTol::default())
        .map_err(|e| e.to_string())?;
    ensure(s.points.len() == 7, || format!("{} fixed points", s.points.len()))?;
    // oracle: a fixed point of the squaring map has coordinates in {0, 1};
    // in a chart at a coordinate equal to 1 each other unit coordinate
    // contributes the multiplier 2 and each zero coordinate 0
    let mut patterns = Vec::new();
    for bits in 1u32..8 {
        let p: Vec<i64> = (0..3).map(|i| (bits >> i & 1) as i64).collect();
        let ones = p.iter().sum::<i64>() as usize;
        let mut spec = vec![2.0; ones - 1];
        spec.resize(2, 0.0);
        patterns.push((p, spec));
    }
    let mut used = vec![false; 7];
    let mut worst_res: f64 = f64::NEG_INFINITY;
    let mut worst_mu: f64 = f64::NEG_INFINITY;
    for pt in &s.points {
        let r = log10_abs(&pt.residual);
        worst_res = worst_res.max(r);
        ensure(r < -40.0, || format!("residual 1e{r:.1}"))?;
        let j = (0..7)
            .find(|&j| {
                !used[j]
                    && patterns[j].0.iter().zip(&pt.coords).all(|(&c, z)| {
                        log10_dist(z, &Cx::from_rational(&q(c), PREC)) < -30.0
                    })
            })
            .ok_or_else(|| format!("unexpected fixed point {:?}", pt.coords_f64()))?;
        used[j] = true;
        let mut rest: Vec<&Cx> = pt.multipliers.iter().collect();
        for &want in &patterns[j].1 {
            let w = Cx::from_f64(want, 0.0, PREC);
            let k = (0..rest.len())
                .min_by(|&a, &b| log10_dist(rest[a], &w).total_cmp(&log10_dist(rest[b], &w)))
                .unwrap();
            let d = log10_dist(rest[k], &w);
            worst_mu = worst_mu.max(d);
            ensure(d < -30.0, || format!("multiplier {} vs {want}", rest[k]))?;
            rest.remove(k);
        }
    }
    Ok(format!(
        "7 points matching the coordinate patterns, max residual {}, max spectrum error {}",
        magnitude(worst_res),
        magnitude(worst_mu)
    ))
}

fn criterion_4() -> Outcome {
    let tol = ClassifyTol::default();
    let mut total = 0;
    for (name, l) in [("squaring-p2", 2), ("squaring-p1", 3)] {
        let m = catalog(name);
        let (points, _) = periodic_table(&m, l, PREC, DEFAULT_ELIMINATION_BUDGET, &tol)
            .map_err(|e| e.to_string())?;
        let audit = eigenvalue_audit(&points, &tol);
        ensure(audit.violations.is_empty(), || format!("{name}: {:?}", audit.violations))?;
        for p in &points {
            let bad = p
                .classes
                .iter()
                .any(|c| matches!(c, EigenClass::AttractingNonzero | EigenClass::Parabolic(_)));
            let nilpotent = p.classes.iter().all(|c| *c == EigenClass::Zero);
            let repelling = p.classes.contains(&EigenClass::Repelling);
            ensure(!bad && (nilpotent || repelling), || format!("{name}: classes {:?}", p.classes))?;
        }
        total += points.len();
    }
    Ok(format!("{total} periodic points audited, zero violations"))
}

fn criterion_5() -> Outcome {
    let tol = ClassifyTol::default();
    let mut parts = Vec::new();
    for (name, l, want) in [("squaring-p1", 1, 3u64), ("squaring-p1", 2, 5), ("squaring-p2", 1, 7)] {
        let m = catalog(name);
        let big_d = (m.degree() as u64).pow(l);
        let formula = (big_d.pow(m.k() as u32 + 1) - 1) / (big_d - 1);
        ensure(formula == want, || format!("formula gives {formula}"))?;
        let s = find_periodic(&m, l, PREC, DEFAULT_ELIMINATION_BUDGET, &tol).map_err(|e| e.to_string())?;
        let found = s.points.len() as u64;
        ensure(found == want, || format!("{name} l={l}: {found} points, expected {want}"))?;
        parts.push(format!("{name} l={l}: {found}"));
    }
    Ok(parts.join(", "))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=4)))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tol = BigFloat::from_f64(1e-25, PREC);
    let mut worst = f64::NEG_INFINITY;
    let mut maps = 0;
    for e in CATALOG {
        let m = e.map();
        if m.k() != 2 {
            continue;
        }
        maps += 1;
        let mut lines = 0;
        while lines < 20 {
            let a: Vec<Rational> = (0..3).map(|_| random_rational(&mut rng)).collect();
            if a.iter().all(|x| *x == q(0)) {
                continue;
            }
            lines += 1;
            let line = Component::new(&HomPoly::linear(&a));
            let img = image_of_component(&m, &line, &[]).map_err(|x| format!("{}: {x}", e.name))?;
            let f = img.form.numeric(PREC);
            let basis = kernel(&vec![a.clone()]);
            for _ in 0..50 {
                let s = Cx::from_f64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), PREC);
                let u = Cx::from_f64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), PREC);
                let p: Vec<Cx> = (0..3)
                    .map(|i| {
                        let x = &s * &Cx::from_rational(&basis[0][i], PREC);
                        let y = &u * &Cx::from_rational(&basis[1][i], PREC);
                        &x + &y
                    })
                    .collect();
                let Ok(fp) = m.pushforward_point(&p, PREC) else {
                    return Err(format!("{}: push of a sample point failed", e.name));
                };
                let fp = normalize_max(&fp).ok_or("zero image point")?;
                let v = f.eval(&fp).abs();
                worst = worst.max(log10_abs(&v));
                ensure(v < tol, || {
                    format!("{}: image {} of {} misses a sample by {}", e.name, img.form, line, v.to_sci_string(3))
                })?;
            }
        }
    }
    let m = catalog("squaring-p2");
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    let line = Component::new(&x.add(&y).unwrap().add(&z).unwrap());
    let img = image_of_component(&m, &line, &[]).map_err(|e| e.to_string())?;
    let w = z.sub(&x).unwrap().sub(&y).unwrap();
    let conic = w.pow(2).sub(&x.mul(&y).unwrap().scale(&q(4))).unwrap();
    ensure(img.form == conic.normalized(), || format!("image of x+y+z is {}", img.form))?;
    within(t, Duration::from_secs(60), "elimination checks")?;
    Ok(format!(
        "{maps} maps x 20 lines x 50 samples, max |value| {}; image of x+y+z = {}; {:?}",
        magnitude(worst),
        img.form,
        t.elapsed()
    ))
}

fn criterion_7() -> Outcome {
    let m = catalog("squaring-p2");
    let (g, v) = postcritical_graph(&m, Bounds::default()).map_err(|e| e.to_string())?;
    let tower = build_tower(&m, &g, &v, Bounds::default()).map_err(|e| e.to_string())?;
    let crit: Vec<Component> = g.nodes.iter().filter(|n| n.critical).map(|n| n.component.clone()).collect();
    let r = restricted_critical_containment(&m, &tower.levels[0], &crit, PREC).map_err(|e| e.to_string())?;
    ensure(r.entries.len() == 3, || format!("{} entries", r.entries.len()))?;
    for e in &r.entries {
        // oracle: the line {x_i = 0} meets the other coordinate lines at the
        // two coordinate points with a zero in position i
        let i = ["x", "y", "z"].iter().position(|&s| s == e.line).ok_or_else(|| format!("line {}", e.line))?;
        let want: BTreeSet<String> = (0..3)
            .filter(|&j| j != i)
            .map(|j| {
                let p: Vec<Rational> = (0..3).map(|c| q((c != i && c != j) as i64)).collect();
                format_point(&p)
            })
            .collect();
        let got: BTreeSet<String> = e.critical_points.iter().map(|c| c.point.clone()).collect();
        ensure(e.critical_points.iter().all(|c| c.exact && c.pass), || format!("{}: inexact or failing point", e.line))?;
        ensure(got == want, || format!("{}: critical points {got:?}, intersections {want:?}", e.line))?;
        ensure(e.equal_to_intersections == Some(true), || format!("{}: report disagrees", e.line))?;
    }
    Ok("each line's critical points are exactly its intersections with the other two".into())
}

fn criterion_8() -> Outcome {
    let mut entries = 0;
    for e in CATALOG {
        let m = e.map();
        let d = m.degree() as u64;
        let (g, v) = postcritical_graph(&m, Bounds::default()).map_err(|x| x.to_string())?;
        let tower = build_tower(&m, &g, &v, Bounds::default()).map_err(|x| x.to_string())?;
        let level = &tower.levels[0];
        for entry in &level.entries {
            let Some(r) = &entry.restricted_map else { continue };
            if r.k() != 1 {
                continue;
            }
            let want = d.pow(level.cumulative_exponent);
            ensure(r.p1_degree() as u64 == want, || {
                format!("{} {}: degree {} vs {want}", e.name, entry.locus, r.p1_degree())
            })?;
            entries += 1;
        }
        for n in 1..=4u32 {
            let f = m.iterate(n).map_err(|x| x.to_string())?;
            ensure(f.degree() as u64 == d.pow(n), || format!("{}: deg f^{n} = {}", e.name, f.degree()))?;
        }
    }
    Ok(format!("{entries} level-1 restrictions of degree d^k1; deg f^n = d^n for n <= 4 on {} maps", CATALOG.len()))
}

fn criterion_9() -> Outcome {
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    let lines: Vec<Component> = [&x, &y, &z].iter().map(|f| Component::new(f)).collect();
    let r = weak_transversality(&lines, PREC).map_err(|e| e.to_string())?;
    ensure(r.verdict == Transversality::WeaklyTransverse, || format!("lines: {:?}", r.verdict))?;
    let conic = x.mul(&z).unwrap().sub(&y.pow(2)).unwrap();
    let r = weak_transversality(&[Component::new(&conic), Component::new(&z)], PREC).map_err(|e| e.to_string())?;
    match &r.verdict {
        Transversality::NotWeaklyTransverse { witness, rank_at_point: 1, generic_rank: 2 } if witness == "(1:0:0)" => {}
        other => return Err(format!("tangent pair: {other:?}")),
    }
    Ok("coordinate lines weakly transverse; {xz - y^2, z} fails at (1:0:0) with rank 2 -> 1".into())
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let m = catalog("squaring-p2");
    let (g, _) = postcritical_graph(&m, Bounds::default()).map_err(|e| e.to_string())?;
    let search = superattracting_candidates(&m, &g, PREC, &ClassifyTol::default()).map_err(|e| e.to_string())?;
    let names: Vec<String> = search.candidates.iter().map(|c| format_point(&c.point)).collect();
    let mut parts = Vec::new();
    for (center, radius, target) in [((0.0, 0.0), 0.9, "(0:0:1)"), ((2.0, 0.5), 0.2, "(1:0:0)")] {
        let mut cfg = ScanConfig::new(2, vec![Complex64::new(center.0, 0.0), Complex64::new(center.1, 0.0)], radius, 64);
        cfg.max_iters = 60;
        cfg.candidates = search.candidates.iter().map(|c| c.cycle_f64()).collect();
        let grid = scan(&m, &cfg).map_err(|e| e.to_string())?;
        let s = basin_summary(&grid, &names);
        let j = names.iter().position(|n| n == target).ok_or("target missing from candidates")?;
        let all = grid.labels.iter().zip(&grid.iters).all(|(l, &it)| *l == Label::Candidate(j) && it <= 60);
        ensure(all, || format!("window at {center:?}: not every pixel reaches {target}"))?;
        ensure(s.status == BasinStatus::Consistent, || format!("window at {center:?}: {}", s.statement))?;
        let decay = s.derivative_decay_fraction.unwrap_or(0.0);
        ensure(decay >= 0.99, || format!("derivative decay on {:.3}", decay))?;
        parts.push(format!("{center:?} r={radius}: 100% {target}, decay {:.1}%", 100.0 * decay));
    }
    within(t, Duration::from_secs(30), "scans")?;
    Ok(format!("{}; CONSISTENT; {:?}", parts.join("; "), t.elapsed()))
}

// Criterion 11: property families at 500 cases each.

fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .rev()
        .flat_map(|a| {
            monomials(n - 1, d - a).into_iter().map(move |mut r| {
                r.insert(0, a);
                r
            })
        })
        .collect()
}

fn form(n: usize, d: u32) -> impl Strategy<Value = HomPoly> {
    let monos = monomials(n, d);
    let count = monos.len();
    prop::collection::btree_map(0..count, -4i64..=4, 1..=4).prop_map(move |ts| {
        HomPoly::from_terms(n, d, ts.into_iter().map(|(i, c)| (monos[i].clone(), q(c)))).unwrap()
    })
}

fn nonzero(n: usize, lo: u32, hi: u32) -> impl Strategy<Value = HomPoly> {
    (lo..=hi).prop_flat_map(move |d| form(n, d)).prop_filter("nonzero", |f| !f.is_zero())
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<String, String> {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 500, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))?;
    Ok(format!("{name} 500/500"))
}

fn criterion_11() -> Outcome {
    let t = Instant::now();
    let mut parts = Vec::new();
    parts.push(run_property(
        "ring axioms",
        (nonzero(3, 0, 2), nonzero(3, 0, 2), (0u32..=2).prop_flat_map(|d| (form(3, d), form(3, d)))),
        |(a, b, (c, e))| {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            let lhs = a.mul(&c.add(&e).unwrap()).unwrap();
            prop_assert_eq!(lhs, a.mul(&c).unwrap().add(&a.mul(&e).unwrap()).unwrap());
            Ok(())
        },
    )?);
    parts.push(run_property(
        "gcd and square-free laws",
        (nonzero(3, 0, 2), nonzero(3, 0, 2), nonzero(3, 1, 2)),
        |(a, b, g)| {
            let (ag, bg) = (a.mul(&g).unwrap(), b.mul(&g).unwrap());
            let h = ag.gcd(&bg).unwrap();
            prop_assert!(h.exact_divide(&g).unwrap().is_some());
            prop_assert!(ag.exact_divide(&h).unwrap().is_some());
            let s = ag.squarefree_part().unwrap();
            prop_assert!(ag.exact_divide(&s).unwrap().is_some());
            prop_assert_eq!(ag.pow(2).squarefree_part().unwrap().normalized(), s.normalized());
            Ok(())
        },
    )?);
    let leading = |f: &HomPoly| f.coefficient(&[f.degree(), 0]) != q(0);
    parts.push(run_property(
        "resultant vanishes iff common factor",
        (nonzero(2, 1, 3), nonzero(2, 1, 3), prop::option::of(nonzero(2, 1, 1)))
            .prop_map(|(a, b, g)| match g {
                Some(g) => (a.mul(&g).unwrap(), b.mul(&g).unwrap()),
                None => (a, b),
            })
            .prop_filter("leading coefficients", move |(a, b)| leading(a) && leading(b)),
        |(a, b)| {
            let r = a.resultant_wrt(&b, 0).unwrap();
            prop_assert_eq!(r.is_zero(), a.gcd(&b).unwrap().degree() > 0);
            Ok(())
        },
    )?);
    let p1_map = prop::collection::vec(nonzero(2, 2, 2), 2).prop_filter_map("degenerate", |comps| {
        match ProjectiveMap::validate(comps).ok()? {
            Validation::WellDefined { map, removed_factor: None, .. } if map.degree() == 2 => Some(map),
            _ => None,
        }
    });
    parts.push(run_property("multipliers are chart invariant", p1_map, |m| {
        let tol = ClassifyTol::default();
        let Ok(s) = find_periodic(&m, 1, PREC, DEFAULT_ELIMINATION_BUDGET, &tol) else {
            return Ok(());
        };
        let num = m.numeric(PREC);
        let jac = NumJacobian::new(&m, PREC);
        for p in s.points.iter().filter(|p| !p.multiplicity_suspect) {
            for c in 0..2 {
                if p.coords[c].abs().to_f64() < 0.1 {
                    continue;
                }
                let mu = multipliers_in_chart(&num, &jac, &p.coords, p.period, c).unwrap();
                let scale = p.multipliers[0].abs().to_f64().max(1.0);
                let d = (&mu[0] - &p.multipliers[0]).abs().to_f64() / scale;
                prop_assert!(d < 1e-30, "chart {} differs by {}", c, d);
            }
        }
        Ok(())
    })?);
    let maps = [catalog("squaring-p2"), catalog("basilica-squaring-p2"), catalog("chebyshev-p1")];
    parts.push(run_property(
        "scans are deterministic",
        (0usize..3, -2.0..2.0f64, -2.0..2.0f64, 0.01..2.0f64),
        |(i, a, b, r)| {
            let m = &maps[i];
            let center = if m.k() == 1 {
                vec![Complex64::new(a, b)]
            } else {
                vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
            };
            let mut cfg = ScanConfig::new(m.k(), center, r, 6);
            cfg.max_iters = 30;
            let origin: Vec<Complex64> = (0..=m.k()).map(|j| Complex64::new((j == m.k()) as u8 as f64, 0.0)).collect();
            cfg.candidates = vec![vec![origin]];
            prop_assert_eq!(scan(m, &cfg).unwrap(), scan(m, &cfg).unwrap());
            Ok(())
        },
    )?);
    Ok(format!("{}; {:?}", parts.join(", "), t.elapsed()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("squaring-map tower", criterion_1),
        ("line-arrangement towers", criterion_2),
        ("fixed-point completeness", criterion_3),
        ("eigenvalue audit", criterion_4),
        ("Bezout counts", criterion_5),
        ("elimination oracle", criterion_6),
        ("restricted critical containment", criterion_7),
        ("degree audits", criterion_8),
        ("weak transversality", criterion_9),
        ("basin scan", criterion_10),
        ("property suites", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
