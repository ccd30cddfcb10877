//! High-precision polynomial root finding.
//!
//! Univariate roots come from Aberth–Ehrlich simultaneous iteration run
//! first at a modest precision and then continued at the working precision.
//! Planar systems of two equations are reduced to one variable by an exact
//! resultant, solved, and back-substituted with Newton refinement.

use num_traits::{Signed, Zero};

use crate::bigfloat::{BigFloat, Cx};
use crate::error::{Error, Result};
use crate::mpoly::{sylvester_resultant, MPoly, Rational};
use crate::poly::NumForm;

const STAGE_ONE_PREC: u32 = 96;

/// Evaluates `p` (ascending coefficients) and its derivative by Horner.
fn horner_with_derivative(p: &[Cx], z: &Cx) -> (Cx, Cx) {
    let prec = z.prec();
    let mut val = Cx::zero(prec);
    let mut der = Cx::zero(prec);
    for c in p.iter().rev() {
        der = &(&der * z) + &val;
        val = &(&val * z) + c;
    }
    (val, der)
}

pub fn horner(p: &[Cx], z: &Cx) -> Cx {
    let mut val = Cx::zero(z.prec());
    for c in p.iter().rev() {
        val = &(&val * z) + c;
    }
    val
}

fn initial_guesses(p: &[Cx]) -> Vec<Cx> {
    let n = p.len() - 1;
    let prec = p[0].prec();
    let lead = p[n].abs().log2_abs();
    // radius from the geometric mean of |a_0 / a_n|, clamped to a Cauchy-like bound
    let low = p[0].abs().log2_abs();
    let mut log_r = if low.is_finite() {
        (low - lead) / n as f64
    } else {
        0.0
    };
    let cauchy = p[..n]
        .iter()
        .map(|c| c.abs().log2_abs() - lead)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0)
        + 1.0;
    log_r = log_r.min(cauchy).max(-60.0);
    let r = 2f64.powf(log_r);
    (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Cx::from_f64(r * th.cos(), r * th.sin(), prec)
        })
        .collect()
}

fn aberth_iterate(p: &[Cx], roots: &mut [Cx], max_iter: usize, stop_bits: f64) -> bool {
    let n = roots.len();
    let prec = roots[0].prec();
    let dp: Vec<Cx> = p.to_vec();
    let moduli: Vec<Cx> = p
        .iter()
        .map(|c| Cx::new(c.abs(), BigFloat::zero(prec)))
        .collect();
    for _ in 0..max_iter {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..n {
            let (v, d) = horner_with_derivative(&dp, &roots[k]);
            if v.is_zero() {
                continue;
            }
            // at the rounding floor of the evaluation the root is as good as
            // this precision allows
            let r = Cx::new(roots[k].abs(), BigFloat::zero(prec));
            let floor = horner(&moduli, &r).max_abs().log2_abs() - prec as f64 + 4.0;
            if v.max_abs().log2_abs() < floor {
                continue;
            }
            let mut sum = Cx::zero(prec);
            for j in 0..n {
                if j != k {
                    let diff = &roots[k] - &roots[j];
                    if !diff.is_zero() {
                        sum = &sum + &(&Cx::one(prec) / &diff);
                    }
                }
            }
            let w = if d.is_zero() {
                // stationary point: nudge off it
                Cx::from_f64(1e-3, 1e-3, prec)
            } else {
                let ratio = &v / &d;
                let den = &Cx::one(prec) - &(&ratio * &sum);
                if den.is_zero() {
                    ratio
                } else {
                    &ratio / &den
                }
            };
            let scale = roots[k].max_abs().log2_abs().max(0.0);
            worst = worst.max(w.max_abs().log2_abs() - scale);
            roots[k] = &roots[k] - &w;
        }
        if worst < -stop_bits {
            return true;
        }
    }
    false
}

/// All complex roots of a polynomial given by ascending coefficients.
/// Leading zero coefficients are dropped; the input should be square-free
/// for full accuracy.
pub fn poly_roots(coeffs: &[Cx], prec: u32) -> Result<Vec<Cx>> {
    let mut p: Vec<Cx> = coeffs.iter().map(|c| c.with_prec(prec)).collect();
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        return Err(Error::Invalid("roots of the zero polynomial".into()));
    }
    let mut zeros = 0;
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        zeros += 1;
    }
    let n = p.len() - 1;
    let mut out = vec![Cx::zero(prec); zeros];
    if n == 0 {
        return Ok(out);
    }
    if n == 1 {
        out.push(-(&p[0] / &p[1]));
        return Ok(out);
    }
    let low_prec = prec.min(STAGE_ONE_PREC);
    let p_low: Vec<Cx> = p.iter().map(|c| c.with_prec(low_prec)).collect();
    let mut roots = initial_guesses(&p_low);
    aberth_iterate(&p_low, &mut roots, 2000, low_prec as f64 - 16.0);
    let mut roots: Vec<Cx> = roots.iter().map(|r| r.with_prec(prec)).collect();
    let ok = aberth_iterate(&p, &mut roots, 200, prec as f64 - 12.0);
    if !ok {
        return Err(Error::Precision(format!(
            "Aberth iteration did not converge for degree {n} at {prec} bits"
        )));
    }
    out.extend(roots);
    Ok(out)
}

/// Roots of a univariate polynomial with rational coefficients in variable
/// `v` of `p` (no other variable may occur).
pub fn rational_poly_roots(p: &MPoly, v: usize, prec: u32) -> Result<Vec<Cx>> {
    let coeffs: Vec<Cx> = p
        .coeffs_in(v)
        .iter()
        .map(|c| Cx::from_rational(&c.constant_value().expect("univariate input"), prec))
        .collect();
    poly_roots(&coeffs, prec)
}

/// Yun square-free decomposition of a univariate polynomial in `x_v`:
/// returns `(g_i, i)` with `p = c * prod g_i^i`, each `g_i` square-free.
pub fn squarefree_decomposition(p: &MPoly, v: usize) -> Vec<(MPoly, u32)> {
    let mut out = Vec::new();
    if p.degree_in(v).unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative(v);
    let b = p.gcd(&dp);
    let mut c = p.div_exact(&b).unwrap();
    let mut d = dp.div_exact(&b).unwrap().sub(&c.derivative(v));
    let mut i = 1;
    while c.degree_in(v).unwrap_or(0) > 0 {
        let a = c.gcd(&d);
        if a.degree_in(v).unwrap_or(0) > 0 {
            out.push((a.normalized(), i));
        }
        c = c.div_exact(&a).unwrap();
        d = d.div_exact(&a).unwrap().sub(&c.derivative(v));
        i += 1;
    }
    out
}

/// A solution of a planar affine system.
#[derive(Clone, Debug)]
pub struct PlanarSolution {
    pub point: [Cx; 2],
    /// Multiplicity of the eliminant root this point sits over.
    pub eliminant_multiplicity: u32,
    /// Number of distinct solutions found over the same eliminant root.
    pub siblings: u32,
    /// Largest scaled residual after refinement.
    pub residual: BigFloat,
}

/// Jacobian-based Newton refinement of `e0 = e1 = 0` in two unknowns.
struct PlanarNewton {
    f: [NumForm; 2],
    jac: [[NumForm; 2]; 2],
    scale: [BigFloat; 2],
}

impl PlanarNewton {
    fn new(e0: &MPoly, e1: &MPoly, prec: u32) -> Self {
        let nf = |p: &MPoly| NumForm::from_mpoly(p, prec);
        let f0 = nf(e0);
        let f1 = nf(e1);
        let scale = [f0.coefficient_norm(), f1.coefficient_norm()];
        PlanarNewton {
            jac: [
                [nf(&e0.derivative(0)), nf(&e0.derivative(1))],
                [nf(&e1.derivative(0)), nf(&e1.derivative(1))],
            ],
            f: [f0, f1],
            scale,
        }
    }

    /// Residual scaled by coefficient size and point magnitude.
    fn residual(&self, p: &[Cx; 2]) -> BigFloat {
        let prec = p[0].prec();
        let mag = {
            let a = p[0].max_abs();
            let b = p[1].max_abs();
            let m = if a > b { a } else { b };
            let one = BigFloat::one(prec);
            if m > one {
                m
            } else {
                one
            }
        };
        let mut worst = BigFloat::zero(prec);
        for i in 0..2 {
            let v = self.f[i].eval(p).max_abs();
            let deg = self.f[i].degree() as u64;
            let mut denom = self.scale[i].clone();
            for _ in 0..deg {
                denom = &denom * &mag;
            }
            if denom.is_zero() {
                continue;
            }
            let r = &v / &denom;
            if r > worst {
                worst = r;
            }
        }
        worst
    }

    fn refine(&self, start: [Cx; 2], steps: usize) -> [Cx; 2] {
        let mut p = start;
        let prec = p[0].prec();
        for _ in 0..steps {
            let f0 = self.f[0].eval(&p);
            let f1 = self.f[1].eval(&p);
            let a = self.jac[0][0].eval(&p);
            let b = self.jac[0][1].eval(&p);
            let c = self.jac[1][0].eval(&p);
            let d = self.jac[1][1].eval(&p);
            let det = &(&a * &d) - &(&b * &c);
            if det.is_zero() {
                break;
            }
            let du = &(&(&d * &f0) - &(&b * &f1)) / &det;
            let dv = &(&(&a * &f1) - &(&c * &f0)) / &det;
            p = [&p[0] - &du, &p[1] - &dv];
            let step = {
                let x = du.max_abs();
                let y = dv.max_abs();
                if x > y {
                    x
                } else {
                    y
                }
            };
            if step.log2_abs() < -(prec as f64) + 4.0 {
                break;
            }
        }
        p
    }
}

fn trimmed(coeffs: Vec<Cx>, rel_bits: f64) -> Vec<Cx> {
    let top = coeffs
        .iter()
        .map(|c| c.max_abs().log2_abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut v = coeffs;
    while v
        .last()
        .is_some_and(|c| c.is_zero() || c.max_abs().log2_abs() < top - rel_bits)
    {
        v.pop();
    }
    v
}

/// Numerical coefficients in `x_0` after substituting `x_1 = v1`;
/// coefficients lost to cancellation below `rel_bits` of their term scale
/// are set to zero.
fn specialize(p: &MPoly, v1: &Cx, rel_bits: f64) -> Vec<Cx> {
    let prec = v1.prec();
    let r = Cx::new(v1.abs(), BigFloat::zero(prec));
    p.coeffs_in(0)
        .iter()
        .map(|c| {
            // c is univariate in x_1
            let qs: Vec<Rational> = c
                .coeffs_in(1)
                .iter()
                .map(|q| q.constant_value().unwrap_or_else(Rational::zero))
                .collect();
            let cs: Vec<Cx> = qs.iter().map(|q| Cx::from_rational(q, prec)).collect();
            let abs: Vec<Cx> = qs.iter().map(|q| Cx::from_rational(&q.abs(), prec)).collect();
            let v = horner(&cs, v1);
            let scale = horner(&abs, &r).max_abs();
            if scale.is_zero() || v.max_abs().log2_abs() < scale.log2_abs() - rel_bits {
                Cx::zero(prec)
            } else {
                v
            }
        })
        .collect()
}

/// Isolated solutions of `e0(u, w) = e1(u, w) = 0` for polynomials in two
/// variables (`nvars == 2`). Fails when the system has a common curve.
pub fn solve_planar(e0: &MPoly, e1: &MPoly, prec: u32) -> Result<Vec<PlanarSolution>> {
    assert_eq!(e0.nvars(), 2);
    assert_eq!(e1.nvars(), 2);
    if e0.is_zero() || e1.is_zero() {
        return Err(Error::Invalid("planar system with a zero equation".into()));
    }
    let g = e0.gcd(e1);
    if !g.is_constant() {
        return Err(Error::Invalid(format!(
            "planar system is not zero-dimensional: common factor {g}"
        )));
    }
    let d0 = e0.degree_in(0).unwrap_or(0);
    let d1 = e1.degree_in(0).unwrap_or(0);
    let elim = if d0 == 0 && d1 == 0 {
        // neither involves u: only a common root in w could solve, which the
        // gcd test above already excluded unless one equation is constant
        return Ok(Vec::new());
    } else {
        sylvester_resultant(e0, e1, 0, d0, d1)
    };
    if elim.is_zero() {
        return Err(Error::Invalid("eliminant vanishes identically".into()));
    }
    let newton = PlanarNewton::new(e0, e1, prec);
    let accept_bits = prec as f64 / 3.0;
    let mut out: Vec<PlanarSolution> = Vec::new();
    for (factor, mult) in squarefree_decomposition(&elim, 1) {
        for w in rational_poly_roots(&factor, 1, prec)? {
            let c0 = trimmed(specialize(e0, &w, prec as f64 * 0.75), prec as f64 * 0.75);
            let c1 = trimmed(specialize(e1, &w, prec as f64 * 0.75), prec as f64 * 0.75);
            // back-substitute through whichever equation still involves u
            let (main, other) = if c0.len() >= 2 { (c0, c1) } else { (c1, c0) };
            if main.len() < 2 {
                continue;
            }
            let mut found = Vec::new();
            for u in poly_roots(&main, prec)? {
                let check = horner(&other, &u).max_abs();
                let scale = other
                    .iter()
                    .map(|c| c.max_abs().log2_abs())
                    .fold(f64::NEG_INFINITY, f64::max)
                    + u.max_abs().log2_abs().max(0.0) * other.len().saturating_sub(1) as f64;
                if !other.is_empty() && check.log2_abs() > scale - accept_bits {
                    continue;
                }
                let p = newton.refine([u, w.clone()], 60);
                let res = newton.residual(&p);
                if res.log2_abs() > -accept_bits {
                    continue;
                }
                if found.iter().any(|q: &[Cx; 2]| close(q, &p, prec)) {
                    continue;
                }
                found.push(p);
            }
            let siblings = found.len() as u32;
            for p in found {
                let residual = newton.residual(&p);
                out.push(PlanarSolution {
                    point: p,
                    eliminant_multiplicity: mult,
                    siblings,
                    residual,
                });
            }
        }
    }
    Ok(out)
}

fn close(a: &[Cx; 2], b: &[Cx; 2], prec: u32) -> bool {
    let tol = -(prec as f64) / 4.0;
    (0..2).all(|i| {
        let d = (&a[i] - &b[i]).max_abs().log2_abs();
        let m = a[i].max_abs().log2_abs().max(0.0);
        d - m < tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn roots_of_cyclotomic_like_polynomial() {
        // t^3 - 1
        let p = 256;
        let c = vec![
            Cx::from_f64(-1.0, 0.0, p),
            Cx::zero(p),
            Cx::zero(p),
            Cx::one(p),
        ];
        let r = poly_roots(&c, p).unwrap();
        assert_eq!(r.len(), 3);
        for z in &r {
            let v = horner(&c, z);
            assert!(v.max_abs().log2_abs() < -240.0);
        }
    }

    #[test]
    fn zero_roots_are_split_off() {
        let p = 128;
        let c = vec![Cx::zero(p), Cx::zero(p), Cx::from_f64(-2.0, 0.0, p), Cx::one(p)];
        let r = poly_roots(&c, p).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r[0].is_zero() && r[1].is_zero());
        assert_eq!(r[2].to_c64().re, 2.0);
    }

    #[test]
    fn yun_decomposition() {
        let t = MPoly::var(2, 1);
        let one = MPoly::one(2);
        let a = t.sub(&one);
        let b = t.add(&one);
        let p = a.pow(3).mul(&b).mul(&t.pow(2));
        let dec = squarefree_decomposition(&p, 1);
        assert_eq!(dec, vec![(b.normalized(), 1), (t.clone(), 2), (a.normalized(), 3)]);
    }

    #[test]
    fn planar_system_with_decoupled_equations() {
        // u^2 - u = 0, w^2 - w = 0: four solutions
        let u = MPoly::var(2, 0);
        let w = MPoly::var(2, 1);
        let e0 = u.mul(&u).sub(&u);
        let e1 = w.mul(&w).sub(&w);
        let sols = solve_planar(&e0, &e1, 256).unwrap();
        assert_eq!(sols.len(), 4);
        for s in &sols {
            assert!(s.residual.log2_abs() < -200.0);
            assert_eq!(s.eliminant_multiplicity, 2);
            assert_eq!(s.siblings, 2);
        }
    }

    #[test]
    fn planar_tangency_is_found() {
        // w - u^2 = 0 and w = 0 meet at the origin with multiplicity 2
        let u = MPoly::var(2, 0);
        let w = MPoly::var(2, 1);
        let e0 = w.sub(&u.mul(&u));
        let sols = solve_planar(&w, &e0, 256).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].point[0].max_abs().log2_abs() < -60.0);
        let _ = rat(0);
    }
}
