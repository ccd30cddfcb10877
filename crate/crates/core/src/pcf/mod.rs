//! Critical and post-critical components, the post-critical orbit graph,
//! the restriction tower and the structural audits run on it.

mod audit;
mod graph;
mod image;
mod tower;

use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::error::Result;
use crate::mpoly::{MPoly, Rational};
use crate::poly::{linear_order, HomPoly, DEFAULT_LINEAR_HEIGHT};
use crate::projmap::ProjectiveMap;

pub use audit::{
    restricted_critical_containment, topdeg_check, weak_transversality, ContainmentEntry,
    ContainmentReport, IntersectionEvidence, PointCheck, TopDegEntry, Transversality,
    TransversalityReport,
};
pub use graph::{postcritical_graph, Bounds, Node, PcfStatus, PcfVerdict, PostCriticalGraph};
pub use image::{
    image_by_double_resultant, image_by_parametrization, image_of_component, ImageMethod,
    ImageResult,
};
pub use tower::{build_tower, EntryVerdict, Tower, TowerEntry, TowerLevel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IrreducibleStatus {
    CertifiedLinear,
    Unverified,
}

/// A component of a critical or post-critical hypersurface, given by a
/// primitive, square-free, sign-normalized form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Component {
    form: HomPoly,
}

impl Component {
    /// Normalizes `form` (which must be square-free) into a component.
    pub fn new(form: &HomPoly) -> Self {
        Component {
            form: form.normalized(),
        }
    }

    pub fn form(&self) -> &HomPoly {
        &self.form
    }

    pub fn is_linear(&self) -> bool {
        self.form.is_linear()
    }

    pub fn status(&self) -> IrreducibleStatus {
        if self.is_linear() {
            IrreducibleStatus::CertifiedLinear
        } else {
            IrreducibleStatus::Unverified
        }
    }

    pub fn degree(&self) -> u32 {
        self.form.degree()
    }

    pub fn linear_coeffs(&self) -> Option<Vec<Rational>> {
        self.form.linear_coeffs()
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.form)
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Component({})", self.form)
    }
}

impl Serialize for Component {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Component", 3)?;
        st.serialize_field("form", &self.form)?;
        st.serialize_field("linear", &self.is_linear())?;
        st.serialize_field("status", &self.status())?;
        st.end()
    }
}

/// Splits a nonzero form into components: square-free part, rational
/// linear factors (with `extra` as additional candidates), and the
/// remaining cofactor as one unverified component.
pub fn split_components(form: &HomPoly, extra: &[HomPoly]) -> Result<Vec<Component>> {
    if form.degree() == 0 {
        return Ok(Vec::new());
    }
    let sqf = form.squarefree_part()?;
    let lf = sqf.linear_factors(DEFAULT_LINEAR_HEIGHT, extra)?;
    let mut out: Vec<Component> = lf.factors.iter().map(|(f, _)| Component::new(f)).collect();
    if lf.residual.degree() > 0 {
        out.push(Component::new(&lf.residual));
    }
    Ok(out)
}

/// Components of the critical set: the zero locus of the Jacobian
/// determinant.
pub fn critical_components(m: &ProjectiveMap) -> Result<Vec<Component>> {
    m.require_degree_two()?;
    let j = m.jacobian_det();
    let mut comps = split_components(&j, &[])?;
    comps.sort_by(component_order);
    Ok(comps)
}

/// Linear components first in the order of [`linear_order`], then the
/// others by degree and form.
pub fn component_order(a: &Component, b: &Component) -> std::cmp::Ordering {
    match (a.is_linear(), b.is_linear()) {
        (true, true) => linear_order(&a.form, &b.form),
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        (false, false) => a
            .degree()
            .cmp(&b.degree())
            .then_with(|| a.form.to_string().cmp(&b.form.to_string())),
    }
}

/// `h` with `x_chart = 1`, its remaining variables sent to `targets` in a
/// ring of `nvars` variables.
pub(crate) fn lift_chart(h: &HomPoly, chart: Option<usize>, targets: &[Option<usize>], nvars: usize) -> MPoly {
    let p = match chart {
        Some(c) => h.as_mpoly().eval_var(c, &Rational::one()),
        None => h.as_mpoly().clone(),
    };
    p.remap(nvars, targets)
}
