//! Super-attracting candidates at intersections of post-critical
//! components, and window scans of orbit convergence.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::bigfloat::Cx;
use crate::error::{Error, Result};
use crate::linalg::{kernel, normalize_point};
use crate::mpoly::Rational;
use crate::pcf::PostCriticalGraph;
use crate::periodic::{classify, multipliers, ClassifyTol, EigenClass};
use crate::poly::F64Form;
use crate::projmap::{format_point, ProjectiveMap};

/// Longest orbit followed when testing an intersection point for
/// periodicity.
pub const MAX_CANDIDATE_PERIOD: usize = 64;

/// Coordinate size, in bits, beyond which an exact orbit is abandoned.
const MAX_ORBIT_BITS: u64 = 1 << 14;

/// Consecutive in-tolerance iterations required before a pixel is labeled.
pub const CONSECUTIVE_HITS: u32 = 5;

/// Threshold on the chained Jacobian norm for the derivative-decay flag.
pub const DERIVATIVE_DECAY: f64 = 1e-6;

/// A periodic point with nilpotent multiplier spectrum, together with its
/// cycle.
#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    #[serde(serialize_with = "ser_point")]
    pub point: Vec<Rational>,
    pub period: u32,
    #[serde(serialize_with = "ser_points")]
    pub cycle: Vec<Vec<Rational>>,
    pub multipliers: Vec<[String; 2]>,
}

fn ser_point<S: serde::Serializer>(p: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_point(p))
}

fn ser_points<S: serde::Serializer>(
    p: &[Vec<Rational>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(p.len()))?;
    for q in p {
        seq.serialize_element(&format_point(q))?;
    }
    seq.end()
}

impl Candidate {
    /// The cycle as max-modulus normalized double precision points.
    pub fn cycle_f64(&self) -> Vec<Vec<Complex64>> {
        self.cycle.iter().map(|p| rational_point_f64(p)).collect()
    }
}

fn rational_point_f64(p: &[Rational]) -> Vec<Complex64> {
    let v: Vec<Complex64> = p
        .iter()
        .map(|x| Complex64::new(x.to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    normalize_max_f64(&v).unwrap_or(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateSearch {
    pub candidates: Vec<Candidate>,
    /// Intersection points examined, in order.
    pub intersections: Vec<String>,
    pub diagnostics: Vec<String>,
}

/// Zero-dimensional intersections of the linear post-critical components
/// that are periodic with an entirely zero multiplier spectrum. Each cycle
/// is reported once, by its first point in intersection order.
pub fn superattracting_candidates(
    m: &ProjectiveMap,
    graph: &PostCriticalGraph,
    prec: u32,
    tol: &ClassifyTol,
) -> Result<CandidateSearch> {
    let k = m.k();
    let lines: Vec<Vec<Rational>> = graph
        .postcritical()
        .iter()
        .filter_map(|c| c.linear_coeffs())
        .collect();
    let mut diagnostics = Vec::new();
    let nonlinear = graph.postcritical().iter().filter(|c| !c.is_linear()).count();
    if nonlinear > 0 {
        diagnostics.push(format!(
            "{nonlinear} non-linear post-critical components skipped"
        ));
    }
    let mut points: Vec<Vec<Rational>> = Vec::new();
    for subset in subsets(lines.len(), k) {
        let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| lines[i].clone()).collect();
        let ker = kernel(&rows);
        if ker.len() != 1 {
            continue;
        }
        let p = normalize_point(&ker[0]);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for p in &points {
        if candidates.iter().any(|c| c.cycle.contains(p)) {
            continue;
        }
        let Some(cycle) = exact_cycle(m, p) else {
            continue;
        };
        let coords: Vec<Cx> = p.iter().map(|x| Cx::from_rational(x, prec)).collect();
        let mu = match multipliers(m, &coords, cycle.len() as u32, prec) {
            Ok(mu) => mu,
            Err(e) => {
                diagnostics.push(format!("{}: multipliers unavailable: {e}", format_point(p)));
                continue;
            }
        };
        if mu.iter().all(|x| classify(x, tol) == EigenClass::Zero) {
            candidates.push(Candidate {
                point: p.clone(),
                period: cycle.len() as u32,
                cycle,
                multipliers: mu.iter().map(|x| x.to_strings(20)).collect(),
            });
        }
    }
    Ok(CandidateSearch {
        candidates,
        intersections: points.iter().map(|p| format_point(p)).collect(),
        diagnostics,
    })
}

/// A user-supplied target: the exact cycle through `p` and its multipliers.
/// Errors if `p` is not periodic within `MAX_CANDIDATE_PERIOD` steps.
pub fn candidate_at(m: &ProjectiveMap, p: &[Rational], prec: u32) -> Result<Candidate> {
    if p.len() != m.nvars() || p.iter().all(|x| x.is_zero()) {
        return Err(Error::Invalid(format!(
            "candidate {} is not a point of P^{}",
            format_point(p),
            m.k()
        )));
    }
    let p = normalize_point(p);
    let cycle = exact_cycle(m, &p).ok_or_else(|| {
        Error::Invalid(format!(
            "candidate {} is not periodic within {MAX_CANDIDATE_PERIOD} steps and the height bound",
            format_point(&p)
        ))
    })?;
    let coords: Vec<Cx> = p.iter().map(|x| Cx::from_rational(x, prec)).collect();
    let mu = multipliers(m, &coords, cycle.len() as u32, prec)?;
    Ok(Candidate {
        point: p,
        period: cycle.len() as u32,
        cycle,
        multipliers: mu.iter().map(|x| x.to_strings(20)).collect(),
    })
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// The exact forward orbit of `p` if it returns to `p`.
fn exact_cycle(m: &ProjectiveMap, p: &[Rational]) -> Option<Vec<Vec<Rational>>> {
    let mut orbit = vec![p.to_vec()];
    let mut x = p.to_vec();
    for _ in 0..MAX_CANDIDATE_PERIOD {
        let y = m.eval_rational(&x);
        if y.iter().all(|c| c.is_zero()) {
            return None;
        }
        let y = normalize_point(&y);
        let bits: u64 = y.iter().map(|c| c.numer().bits() + c.denom().bits()).sum();
        if bits > MAX_ORBIT_BITS {
            return None;
        }
        if y == p {
            return Some(orbit);
        }
        if orbit.contains(&y) {
            // strictly preperiodic
            return None;
        }
        orbit.push(y.clone());
        x = y;
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanConfig {
    /// Affine chart `x_chart = 1` holding the window.
    pub chart: usize,
    /// Window center in the chart's affine coordinates.
    pub center: Vec<Complex64>,
    pub radius: f64,
    /// Pixels per side.
    pub resolution: usize,
    pub max_iters: u32,
    pub tolerance: f64,
    /// Target cycles, each max-modulus normalized.
    pub candidates: Vec<Vec<Vec<Complex64>>>,
    pub derivative_check: bool,
}

impl ScanConfig {
    pub fn new(chart: usize, center: Vec<Complex64>, radius: f64, resolution: usize) -> Self {
        ScanConfig {
            chart,
            center,
            radius,
            resolution,
            max_iters: 60,
            tolerance: 1e-8,
            candidates: Vec::new(),
            derivative_check: true,
        }
    }

    fn check(&self, k: usize) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::Invalid("scan resolution must be at least 2".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Invalid("scan tolerance must be positive".into()));
        }
        if self.chart > k {
            return Err(Error::Invalid(format!("chart {} out of range", self.chart)));
        }
        if self.center.len() != k {
            return Err(Error::Invalid(format!(
                "window center needs {k} coordinates, got {}",
                self.center.len()
            )));
        }
        if !(self.radius >= 0.0) {
            return Err(Error::Invalid("window radius must be non-negative".into()));
        }
        if self.candidates.iter().flatten().any(|p| p.len() != k + 1) {
            return Err(Error::Invalid("candidate of the wrong dimension".into()));
        }
        Ok(())
    }

    /// Projective point of a pixel. On `P^1` the window is a square in the
    /// complex plane; otherwise the real slice through the center spanned
    /// by the first two affine coordinates.
    pub fn pixel_point(&self, row: usize, col: usize) -> Vec<Complex64> {
        let n = self.resolution;
        let step = |i: usize| -self.radius + 2.0 * self.radius * i as f64 / (n - 1) as f64;
        let (a, b) = (step(col), -step(row));
        let mut affine = self.center.clone();
        if affine.len() == 1 {
            affine[0] += Complex64::new(a, b);
        } else {
            affine[0] += a;
            affine[1] += b;
        }
        let mut p = Vec::with_capacity(affine.len() + 1);
        let mut it = affine.into_iter();
        for i in 0..=self.center.len() {
            if i == self.chart {
                p.push(Complex64::new(1.0, 0.0));
            } else {
                p.push(it.next().unwrap());
            }
        }
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Candidate(usize),
    /// Attracting limit cycle not in the candidate list.
    OffList(usize),
    NonConverged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OffListLimit {
    pub cycle: Vec<Vec<Complex64>>,
    /// Spectral radius of the derivative along the cycle.
    pub contraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasinGrid {
    pub resolution: usize,
    /// Row-major labels.
    pub labels: Vec<Label>,
    /// Iteration at which the label was assigned, or `max_iters`.
    pub iters: Vec<u32>,
    pub decay: Option<Vec<bool>>,
    pub off_list: Vec<OffListLimit>,
    pub precision_failures: usize,
    pub candidate_count: usize,
}

impl BasinGrid {
    /// Numeric label: candidate index, then off-list limits after the
    /// candidates, `-1` for non-converged pixels.
    pub fn label_code(&self, i: usize) -> i64 {
        match self.labels[i] {
            Label::Candidate(j) => j as i64,
            Label::OffList(j) => (self.candidate_count + j) as i64,
            Label::NonConverged => -1,
        }
    }

    /// `row,col,label,iters` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,label,iters\n");
        for i in 0..self.labels.len() {
            let (r, c) = (i / self.resolution, i % self.resolution);
            s.push_str(&format!("{r},{c},{},{}\n", self.label_code(i), self.iters[i]));
        }
        s
    }

    /// Binary PGM, labels on evenly spaced gray levels and non-converged
    /// pixels black.
    pub fn to_pgm(&self) -> Vec<u8> {
        let n = self.resolution;
        let levels = (self.candidate_count + self.off_list.len()).max(1);
        let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
        for i in 0..self.labels.len() {
            let code = self.label_code(i);
            out.push(if code < 0 {
                0
            } else {
                (255 * (code as usize + 1) / levels) as u8
            });
        }
        out
    }
}

struct F64Map {
    forms: Vec<F64Form>,
    partials: Vec<Vec<F64Form>>,
}

impl F64Map {
    fn new(m: &ProjectiveMap) -> Self {
        F64Map {
            forms: m.comps().iter().map(|h| h.numeric_f64()).collect(),
            partials: m
                .jacobian_matrix()
                .iter()
                .map(|row| row.iter().map(|h| h.numeric_f64()).collect())
                .collect(),
        }
    }

    fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.forms.iter().map(|f| f.eval(x)).collect()
    }

    /// Affine Jacobian from chart `src` (with `x_src = 1`) to chart `dst`.
    fn chart_jacobian(
        &self,
        x: &[Complex64],
        fx: &[Complex64],
        src: usize,
        dst: usize,
    ) -> Vec<Vec<Complex64>> {
        let n = x.len();
        let fc = fx[dst];
        let fc2 = fc * fc;
        (0..n)
            .filter(|&i| i != dst)
            .map(|i| {
                (0..n)
                    .filter(|&a| a != src)
                    .map(|a| {
                        let dfi = self.partials[i][a].eval(x);
                        let dfc = self.partials[dst][a].eval(x);
                        (dfi * fc - fx[i] * dfc) / fc2
                    })
                    .collect()
            })
            .collect()
    }
}

fn argmax(p: &[Complex64]) -> usize {
    let mut best = 0;
    for i in 1..p.len() {
        if p[i].norm() > p[best].norm() {
            best = i;
        }
    }
    best
}

pub fn normalize_max_f64(p: &[Complex64]) -> Option<Vec<Complex64>> {
    let i = argmax(p);
    normalize_at(p, i)
}

fn normalize_at(p: &[Complex64], i: usize) -> Option<Vec<Complex64>> {
    let s = p[i];
    if s.norm() == 0.0 || !s.is_finite() {
        return None;
    }
    let mut q: Vec<Complex64> = p.iter().map(|x| x / s).collect();
    q[i] = Complex64::new(1.0, 0.0);
    q.iter().all(|z| z.is_finite()).then_some(q)
}

/// `max |a_i b_j - a_j b_i|` on max-modulus normalized points.
pub fn projective_distance_f64(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            worst = worst.max((a[i] * b[j] - a[j] * b[i]).norm());
        }
    }
    worst
}

fn mat_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| (0..b.len()).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

fn mat_norm(a: &[Vec<Complex64>]) -> f64 {
    a.iter().flatten().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn spectral_radius(a: &[Vec<Complex64>]) -> f64 {
    match a.len() {
        1 => a[0][0].norm(),
        2 => {
            let tr = a[0][0] + a[1][1];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            let disc = (tr * tr - 4.0 * det).sqrt();
            ((tr + disc) / 2.0).norm().max(((tr - disc) / 2.0).norm())
        }
        _ => {
            // Gelfand estimate from a few squarings
            let mut p = a.to_vec();
            let mut e = 1.0;
            for _ in 0..6 {
                p = mat_mul(&p, &p);
                e *= 2.0;
            }
            mat_norm(&p).powf(1.0 / e)
        }
    }
}

/// Result of following one pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub label: Label,
    pub iters: u32,
    pub decayed: bool,
    /// Max-modulus normalized final point.
    pub last: Vec<Complex64>,
    /// Set when the orbit left the representable range.
    pub failed: bool,
    /// Attracting limit cycle found when no candidate was reached.
    pub limit: Option<OffListLimit>,
}

const HISTORY: usize = 8;

/// Iterates a point up to `max_iters` times, labeling it by the first
/// candidate cycle it stays within tolerance of for
/// [`CONSECUTIVE_HITS`] iterations.
pub fn follow_orbit(m: &ProjectiveMap, config: &ScanConfig, start: &[Complex64]) -> Orbit {
    follow(&F64Map::new(m), config, start)
}

fn follow(f: &F64Map, config: &ScanConfig, start: &[Complex64]) -> Orbit {
    let mut src = argmax(start);
    let Some(mut x) = normalize_at(start, src) else {
        return failed_orbit(start);
    };
    let mut acc: Option<Vec<Vec<Complex64>>> = None;
    let mut hits = 0u32;
    let mut current: Option<usize> = None;
    let mut history: Vec<(Vec<Complex64>, Vec<Vec<Complex64>>)> = Vec::new();
    for it in 1..=config.max_iters {
        let fx = f.eval(&x);
        let dst = argmax(&fx);
        let Some(next) = normalize_at(&fx, dst) else {
            return Orbit {
                failed: true,
                ..failed_orbit(&x)
            };
        };
        let step_jac = f.chart_jacobian(&x, &fx, src, dst);
        if config.derivative_check {
            acc = Some(match acc {
                None => step_jac.clone(),
                Some(a) => {
                    let p = mat_mul(&step_jac, &a);
                    if mat_norm(&p) > 1e250 {
                        a
                    } else {
                        p
                    }
                }
            });
        }
        history.push((x.clone(), step_jac));
        if history.len() > HISTORY * (CONSECUTIVE_HITS as usize + 1) {
            history.remove(0);
        }
        x = next;
        src = dst;
        let hit = config.candidates.iter().position(|cyc| {
            cyc.iter()
                .any(|c| projective_distance_f64(c, &x) < config.tolerance)
        });
        match hit {
            Some(j) if current == Some(j) => hits += 1,
            Some(j) => {
                current = Some(j);
                hits = 1;
            }
            None => {
                current = None;
                hits = 0;
            }
        }
        if hits >= CONSECUTIVE_HITS {
            let decayed = acc
                .as_ref()
                .is_some_and(|a| mat_norm(a) < DERIVATIVE_DECAY);
            return Orbit {
                label: Label::Candidate(current.unwrap()),
                iters: it,
                decayed,
                last: x,
                failed: false,
                limit: None,
            };
        }
    }
    let limit = attracting_limit(&history, &x, config.tolerance);
    Orbit {
        label: Label::NonConverged,
        iters: config.max_iters,
        decayed: false,
        last: x,
        failed: false,
        limit,
    }
}

fn failed_orbit(x: &[Complex64]) -> Orbit {
    Orbit {
        label: Label::NonConverged,
        iters: 0,
        decayed: false,
        last: x.to_vec(),
        failed: true,
        limit: None,
    }
}

/// Detects an attracting cycle of period at most [`HISTORY`] at the end of
/// an orbit: the last points repeat with period `q` for
/// [`CONSECUTIVE_HITS`] rounds and the derivative along one round
/// contracts.
fn attracting_limit(
    history: &[(Vec<Complex64>, Vec<Vec<Complex64>>)],
    last: &[Complex64],
    tol: f64,
) -> Option<OffListLimit> {
    let mut pts: Vec<&[Complex64]> = history.iter().map(|h| h.0.as_slice()).collect();
    pts.push(last);
    let n = pts.len();
    for q in 1..=HISTORY {
        let need = q + CONSECUTIVE_HITS as usize;
        if n < need || history.len() < q {
            continue;
        }
        let repeats = (n - CONSECUTIVE_HITS as usize..n)
            .all(|i| projective_distance_f64(pts[i], pts[i - q]) < tol);
        if !repeats {
            continue;
        }
        let jacs = &history[history.len() - q..];
        let mut prod = jacs[0].1.clone();
        for j in &jacs[1..] {
            prod = mat_mul(&j.1, &prod);
        }
        let rho = spectral_radius(&prod);
        if rho < 1.0 {
            return Some(OffListLimit {
                cycle: pts[n - q..].iter().map(|p| p.to_vec()).collect(),
                contraction: rho,
            });
        }
        return None;
    }
    None
}

/// `n` further max-modulus normalized orbit points after `start`.
pub fn orbit_points(m: &ProjectiveMap, start: &[Complex64], n: usize) -> Vec<Vec<Complex64>> {
    let f = F64Map::new(m);
    let mut out = Vec::with_capacity(n);
    let mut x = start.to_vec();
    for _ in 0..n {
        match normalize_max_f64(&f.eval(&x)) {
            Some(y) => {
                out.push(y.clone());
                x = y;
            }
            None => break,
        }
    }
    out
}

/// Scans the window of `config`, row-major.
pub fn scan(m: &ProjectiveMap, config: &ScanConfig) -> Result<BasinGrid> {
    config.check(m.k())?;
    let f = F64Map::new(m);
    let n = config.resolution;
    let mut labels = Vec::with_capacity(n * n);
    let mut iters = Vec::with_capacity(n * n);
    let mut decay = Vec::with_capacity(n * n);
    let mut off_list: Vec<OffListLimit> = Vec::new();
    let mut failures = 0;
    for row in 0..n {
        for col in 0..n {
            let o = follow(&f, config, &config.pixel_point(row, col));
            if o.failed {
                failures += 1;
            }
            let label = match (&o.label, o.limit) {
                (Label::NonConverged, Some(lim)) => {
                    let found = off_list.iter().position(|l| {
                        l.cycle.iter().any(|p| {
                            lim.cycle
                                .iter()
                                .any(|q| projective_distance_f64(p, q) < 1e3 * config.tolerance)
                        })
                    });
                    Label::OffList(found.unwrap_or_else(|| {
                        off_list.push(lim);
                        off_list.len() - 1
                    }))
                }
                (l, _) => *l,
            };
            labels.push(label);
            iters.push(o.iters);
            decay.push(o.decayed);
        }
    }
    Ok(BasinGrid {
        resolution: n,
        labels,
        iters,
        decay: config.derivative_check.then_some(decay),
        off_list,
        precision_failures: failures,
        candidate_count: config.candidates.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BasinStatus {
    Consistent,
    Finding,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasinShare {
    pub label: String,
    pub pixels: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasinSummary {
    pub status: BasinStatus,
    pub statement: String,
    pub basins: Vec<BasinShare>,
    pub off_list: Vec<BasinShare>,
    pub non_converged_fraction: f64,
    /// Share of labeled pixels whose chained derivative decayed.
    pub derivative_decay_fraction: Option<f64>,
    pub precision_failures: usize,
    pub pixels: usize,
}

/// Pixel fractions per basin and the consistency flag: a pixel converging
/// to a limit outside the candidate list is a finding.
pub fn basin_summary(grid: &BasinGrid, candidate_names: &[String]) -> BasinSummary {
    let total = grid.labels.len();
    let frac = |c: usize| if total == 0 { 0.0 } else { c as f64 / total as f64 };
    let count = |l: Label| grid.labels.iter().filter(|&&x| x == l).count();
    let basins = (0..grid.candidate_count)
        .map(|j| {
            let c = count(Label::Candidate(j));
            BasinShare {
                label: candidate_names
                    .get(j)
                    .cloned()
                    .unwrap_or_else(|| format!("candidate {j}")),
                pixels: c,
                fraction: frac(c),
            }
        })
        .collect();
    let off_list: Vec<BasinShare> = grid
        .off_list
        .iter()
        .enumerate()
        .map(|(j, lim)| {
            let c = count(Label::OffList(j));
            let pts: Vec<String> = lim
                .cycle
                .iter()
                .map(|p| {
                    let s: Vec<String> = p.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
                    format!("({})", s.join(" : "))
                })
                .collect();
            BasinShare {
                label: format!("cycle {}", pts.join(" -> ")),
                pixels: c,
                fraction: frac(c),
            }
        })
        .collect();
    let labeled: Vec<usize> = (0..total)
        .filter(|&i| matches!(grid.labels[i], Label::Candidate(_)))
        .collect();
    let derivative_decay_fraction = grid.decay.as_ref().map(|d| {
        if labeled.is_empty() {
            1.0
        } else {
            labeled.iter().filter(|&&i| d[i]).count() as f64 / labeled.len() as f64
        }
    });
    let status = if off_list.is_empty() {
        BasinStatus::Consistent
    } else {
        BasinStatus::Finding
    };
    let statement = match status {
        BasinStatus::Consistent => {
            "every converged pixel reaches a listed super-attracting cycle; consistent with the \
             Fatou set being a finite union of super-attracting basins (numerical evidence only)"
                .to_string()
        }
        BasinStatus::Finding => format!(
            "{} attracting limit cycle(s) outside the candidate list",
            grid.off_list.len()
        ),
    };
    BasinSummary {
        status,
        statement,
        basins,
        off_list,
        non_converged_fraction: frac(count(Label::NonConverged)),
        derivative_decay_fraction,
        precision_failures: grid.precision_failures,
        pixels: total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcf::{postcritical_graph, Bounds};
    use crate::poly::HomPoly;

    fn sq2() -> ProjectiveMap {
        let v = |i| HomPoly::var(3, i).pow(2);
        ProjectiveMap::new(vec![v(0), v(1), v(2)]).unwrap()
    }

    fn candidates_of(m: &ProjectiveMap) -> Vec<Candidate> {
        let (g, _) = postcritical_graph(m, Bounds::default()).unwrap();
        superattracting_candidates(m, &g, 128, &ClassifyTol::default())
            .unwrap()
            .candidates
    }

    #[test]
    fn squaring_candidates() {
        let c = candidates_of(&sq2());
        let mut pts: Vec<String> = c.iter().map(|c| format_point(&c.point)).collect();
        pts.sort();
        assert_eq!(pts, vec!["(0:0:1)", "(0:1:0)", "(1:0:0)"]);
        let v = |i| HomPoly::var(2, i).pow(2);
        let c = candidates_of(&ProjectiveMap::new(vec![v(0), v(1)]).unwrap());
        let mut pts: Vec<String> = c.iter().map(|c| format_point(&c.point)).collect();
        pts.sort();
        assert_eq!(pts, vec!["(0:1)", "(1:0)"]);
    }

    fn config(center: [f64; 2], radius: f64) -> ScanConfig {
        let mut c = ScanConfig::new(
            2,
            vec![Complex64::new(center[0], 0.0), Complex64::new(center[1], 0.0)],
            radius,
            16,
        );
        c.candidates = candidates_of(&sq2()).iter().map(|c| c.cycle_f64()).collect();
        c
    }

    fn index_of(cands: &[Candidate], p: &str) -> usize {
        cands.iter().position(|c| format_point(&c.point) == p).unwrap()
    }

    #[test]
    fn contraction_window() {
        let cfg = config([0.0, 0.0], 0.9);
        let g = scan(&sq2(), &cfg).unwrap();
        let j = index_of(&candidates_of(&sq2()), "(0:0:1)");
        assert!(g.labels.iter().all(|l| *l == Label::Candidate(j)));
        assert!(g.decay.as_ref().unwrap().iter().all(|&d| d));
        let s = basin_summary(&g, &[]);
        assert_eq!(s.status, BasinStatus::Consistent);
    }

    #[test]
    fn window_near_first_coordinate_point() {
        let cfg = config([2.0, 0.5], 0.2);
        let g = scan(&sq2(), &cfg).unwrap();
        let j = index_of(&candidates_of(&sq2()), "(1:0:0)");
        assert!(g.labels.iter().all(|l| *l == Label::Candidate(j)));
    }

    #[test]
    fn unit_torus_pixel_does_not_converge() {
        let cfg = config([1.0, 1.0], 0.0);
        let o = follow_orbit(&sq2(), &cfg, &cfg.pixel_point(0, 0));
        assert_eq!(o.label, Label::NonConverged);
        assert!(o.limit.is_none());
    }

    #[test]
    fn attracting_fixed_point_off_list_is_a_finding() {
        // (x^2 + xz/4 : y^2 : z^2) fixes (0:0:1) with multipliers 1/4 and 0
        let x = HomPoly::var(3, 0);
        let y = HomPoly::var(3, 1);
        let z = HomPoly::var(3, 2);
        let quarter = Rational::new(1.into(), 4.into());
        let f0 = x.pow(2).add(&x.mul(&z).unwrap().scale(&quarter)).unwrap();
        let m = ProjectiveMap::new(vec![f0, y.pow(2), z.pow(2)]).unwrap();
        let mut cfg = ScanConfig::new(2, vec![Complex64::zero(), Complex64::zero()], 0.1, 4);
        cfg.max_iters = 80;
        let g = scan(&m, &cfg).unwrap();
        assert_eq!(g.off_list.len(), 1);
        let s = basin_summary(&g, &[]);
        assert_eq!(s.status, BasinStatus::Finding);
        let empty = ScanConfig::new(2, vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)], 0.0, 2);
        let s = basin_summary(&scan(&sq2(), &empty).unwrap(), &[]);
        assert_eq!(s.status, BasinStatus::Consistent);
    }

    #[test]
    fn exports() {
        let g = scan(&sq2(), &config([0.0, 0.0], 0.5)).unwrap();
        let csv = g.to_csv();
        assert!(csv.starts_with("row,col,label,iters\n"));
        assert_eq!(csv.lines().count(), 1 + 16 * 16);
        let pgm = g.to_pgm();
        assert!(pgm.starts_with(b"P5\n16 16\n255\n"));
        assert_eq!(pgm.len(), b"P5\n16 16\n255\n".len() + 256);
    }
}
