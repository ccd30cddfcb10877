//! The JSON map format: decimal-string rational coefficients per term.

use std::fmt;

use num_bigint::BigInt;
use pcflab_core::mpoly::Rational;
use pcflab_core::poly::HomPoly;
use pcflab_core::projmap::ProjectiveMap;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub num: String,
    pub den: String,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub k: usize,
    pub degree: u32,
    pub components: Vec<Vec<Term>>,
}

/// Where a map file went wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based component index, when the problem is local to one.
    pub component: Option<usize>,
    /// 1-based term index within the component.
    pub term: Option<usize>,
    /// Source line and column for JSON syntax errors.
    pub line: Option<(usize, usize)>,
    pub message: String,
}

impl Diagnostic {
    fn global(message: impl Into<String>) -> Self {
        Diagnostic { component: None, term: None, line: None, message: message.into() }
    }

    fn at(component: usize, term: Option<usize>, message: impl Into<String>) -> Self {
        Diagnostic {
            component: Some(component + 1),
            term: term.map(|t| t + 1),
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((l, c)) = self.line {
            write!(f, "line {l}, column {c}: ")?;
        }
        match (self.component, self.term) {
            (Some(c), Some(t)) => write!(f, "component {c}, term {t}: ")?,
            (Some(c), None) => write!(f, "component {c}: ")?,
            _ => {}
        }
        write!(f, "{}", self.message)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl MapFile {
    pub fn parse(text: &str) -> Result<Self, Diagnostic> {
        serde_json::from_str(text).map_err(|e| Diagnostic {
            line: Some((e.line(), e.column())),
            ..Diagnostic::global(e.to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map files serialize")
    }

    pub fn from_map(m: &ProjectiveMap) -> Self {
        MapFile {
            k: m.k(),
            degree: m.degree(),
            components: m
                .comps()
                .iter()
                .map(|c| {
                    c.terms()
                        .map(|(e, q)| Term {
                            num: q.numer().to_string(),
                            den: q.denom().to_string(),
                            exps: e.clone(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// The component forms, after checking shape, exponents and
    /// coefficients. Nondegeneracy is left to validation.
    pub fn forms(&self) -> Result<Vec<HomPoly>, Diagnostic> {
        if self.k == 0 {
            return Err(Diagnostic::global("k must be at least 1"));
        }
        if self.components.len() != self.k + 1 {
            return Err(Diagnostic::global(format!(
                "expected k + 1 = {} components, found {}",
                self.k + 1,
                self.components.len()
            )));
        }
        let n = self.k + 1;
        let mut out = Vec::with_capacity(n);
        for (ci, comp) in self.components.iter().enumerate() {
            let mut terms = Vec::with_capacity(comp.len());
            for (ti, t) in comp.iter().enumerate() {
                if t.exps.len() != n {
                    return Err(Diagnostic::at(
                        ci,
                        Some(ti),
                        format!("exponent tuple has length {}, expected {n}", t.exps.len()),
                    ));
                }
                let sum: u64 = t.exps.iter().map(|&e| e as u64).sum();
                if sum != self.degree as u64 {
                    return Err(Diagnostic::at(
                        ci,
                        Some(ti),
                        format!("exponents sum to {sum}, expected degree {}", self.degree),
                    ));
                }
                let num = parse_int(&t.num).ok_or_else(|| {
                    Diagnostic::at(ci, Some(ti), format!("numerator {:?} is not a decimal integer", t.num))
                })?;
                let den = parse_int(&t.den).ok_or_else(|| {
                    Diagnostic::at(ci, Some(ti), format!("denominator {:?} is not a decimal integer", t.den))
                })?;
                if den <= BigInt::from(0) {
                    return Err(Diagnostic::at(
                        ci,
                        Some(ti),
                        format!("denominator {} is not positive", t.den),
                    ));
                }
                if terms.iter().any(|(e, _): &(Vec<u32>, Rational)| *e == t.exps) {
                    return Err(Diagnostic::at(ci, Some(ti), "repeated exponent tuple"));
                }
                terms.push((t.exps.clone(), Rational::new(num, den)));
            }
            let form = HomPoly::from_terms(n, self.degree, terms)
                .map_err(|e| Diagnostic::at(ci, None, e.to_string()))?;
            out.push(form);
        }
        if out.iter().all(|f| f.is_zero()) {
            return Err(Diagnostic::global("all components are zero"));
        }
        Ok(out)
    }
}
