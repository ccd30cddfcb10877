//! Breadth-first closure of the critical set under forward images.

use std::collections::VecDeque;

use serde::Serialize;

use super::{critical_components, image_of_component, Component, ImageMethod};
use crate::error::Result;
use crate::projmap::ProjectiveMap;

/// Limits on the closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Maximum number of image computations.
    pub max_iter: usize,
    /// Maximum total degree of all stored components.
    pub max_degree: u32,
    /// Largest coefficient size, in bits, of a post-critical component.
    pub max_height_bits: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_iter: 64,
            max_degree: 512,
            max_height_bits: 1024,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Node {
    pub component: Component,
    /// Component of the critical set.
    pub critical: bool,
    /// Image of some node, hence part of the post-critical set.
    pub postcritical: bool,
    /// Indices of the components of the image; one for irreducible nodes.
    pub successors: Vec<usize>,
    pub image_method: Option<ImageMethod>,
    pub period: Option<u32>,
    pub preperiod: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcfStatus {
    Pcf,
    NotPcfWithinBound,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct PcfVerdict {
    pub status: PcfStatus,
    pub reason: Option<String>,
    pub bounds: Bounds,
    pub images_computed: usize,
    pub total_degree: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct PostCriticalGraph {
    pub k: usize,
    pub nodes: Vec<Node>,
}

impl PostCriticalGraph {
    pub fn find(&self, c: &Component) -> Option<usize> {
        self.nodes.iter().position(|n| &n.component == c)
    }

    /// Components of the post-critical set.
    pub fn postcritical(&self) -> Vec<&Component> {
        self.nodes
            .iter()
            .filter(|n| n.postcritical)
            .map(|n| &n.component)
            .collect()
    }

    pub fn periodic(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].period.is_some())
            .collect()
    }

    fn annotate(&mut self) {
        let n = self.nodes.len();
        let resolved = self.nodes.iter().all(|x| !x.successors.is_empty());
        if !resolved {
            return;
        }
        // shortest return time along the image relation
        for i in 0..n {
            let mut dist = vec![u32::MAX; n];
            let mut q = VecDeque::new();
            for &s in &self.nodes[i].successors {
                if dist[s] == u32::MAX {
                    dist[s] = 1;
                    q.push_back(s);
                }
            }
            while let Some(u) = q.pop_front() {
                for &s in &self.nodes[u].successors {
                    if dist[s] == u32::MAX {
                        dist[s] = dist[u] + 1;
                        q.push_back(s);
                    }
                }
            }
            self.nodes[i].period = (dist[i] != u32::MAX).then_some(dist[i]);
        }
        for i in 0..n {
            let mut dist = vec![u32::MAX; n];
            dist[i] = 0;
            let mut q = VecDeque::from([i]);
            let mut pre = None;
            while let Some(u) = q.pop_front() {
                if self.nodes[u].period.is_some() {
                    pre = Some(dist[u]);
                    break;
                }
                for &s in &self.nodes[u].successors {
                    if dist[s] == u32::MAX {
                        dist[s] = dist[u] + 1;
                        q.push_back(s);
                    }
                }
            }
            self.nodes[i].preperiod = pre;
        }
    }
}

/// Closure of the critical components under [`image_of_component`].
///
/// Stops with [`PcfStatus::Pcf`] once every node's image is a node, and
/// with [`PcfStatus::NotPcfWithinBound`] when a bound is hit; it never
/// claims that a map is not post-critically finite.
fn coefficient_bits(c: &Component) -> u64 {
    c.form()
        .terms()
        .map(|(_, q)| q.numer().bits().max(q.denom().bits()))
        .max()
        .unwrap_or(0)
}

pub fn postcritical_graph(
    m: &ProjectiveMap,
    bounds: Bounds,
) -> Result<(PostCriticalGraph, PcfVerdict)> {
    let crit = critical_components(m)?;
    let mut g = PostCriticalGraph {
        k: m.k(),
        nodes: crit
            .into_iter()
            .map(|c| Node {
                component: c,
                critical: true,
                postcritical: false,
                successors: Vec::new(),
                image_method: None,
                period: None,
                preperiod: None,
            })
            .collect(),
    };
    let mut height = 0;
    let mut queue: VecDeque<usize> = (0..g.nodes.len()).collect();
    let mut images = 0;
    let mut total_degree: u32 = g.nodes.iter().map(|n| n.component.degree()).sum();
    let verdict = |status, reason: Option<String>, images, total_degree| PcfVerdict {
        status,
        reason,
        bounds,
        images_computed: images,
        total_degree,
    };
    while let Some(i) = queue.pop_front() {
        if images >= bounds.max_iter {
            let v = verdict(
                PcfStatus::NotPcfWithinBound,
                Some(format!("image budget of {} exhausted", bounds.max_iter)),
                images,
                total_degree,
            );
            return Ok((g, v));
        }
        let candidates: Vec<Component> = g.nodes.iter().map(|n| n.component.clone()).collect();
        let img = match image_of_component(m, &g.nodes[i].component, &candidates) {
            Ok(r) => r,
            Err(e) => {
                let v = verdict(
                    PcfStatus::Inconclusive,
                    Some(format!("image of {} failed: {e}", g.nodes[i].component)),
                    images,
                    total_degree,
                );
                return Ok((g, v));
            }
        };
        images += 1;
        let mut succ = Vec::new();
        for c in img.components {
            let j = match g.find(&c) {
                Some(j) => j,
                None => {
                    total_degree += c.degree();
                    g.nodes.push(Node {
                        component: c,
                        critical: false,
                        postcritical: false,
                        successors: Vec::new(),
                        image_method: None,
                        period: None,
                        preperiod: None,
                    });
                    queue.push_back(g.nodes.len() - 1);
                    g.nodes.len() - 1
                }
            };
            g.nodes[j].postcritical = true;
            succ.push(j);
            height = height.max(coefficient_bits(&g.nodes[j].component));
        }
        g.nodes[i].successors = succ;
        g.nodes[i].image_method = Some(img.method);
        if total_degree > bounds.max_degree {
            let v = verdict(
                PcfStatus::NotPcfWithinBound,
                Some(format!(
                    "total component degree {total_degree} exceeds {}",
                    bounds.max_degree
                )),
                images,
                total_degree,
            );
            return Ok((g, v));
        }
        if height > bounds.max_height_bits {
            let v = verdict(
                PcfStatus::NotPcfWithinBound,
                Some(format!(
                    "coefficient size {height} bits exceeds {}",
                    bounds.max_height_bits
                )),
                images,
                total_degree,
            );
            return Ok((g, v));
        }
    }
    g.annotate();
    let v = verdict(PcfStatus::Pcf, None, images, total_degree);
    Ok((g, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::HomPoly;

    fn v(i: usize) -> HomPoly {
        HomPoly::var(3, i)
    }

    #[test]
    fn squaring_graph() {
        let f = ProjectiveMap::new(vec![v(0).pow(2), v(1).pow(2), v(2).pow(2)]).unwrap();
        let (g, verdict) = postcritical_graph(&f, Bounds::default()).unwrap();
        assert_eq!(verdict.status, PcfStatus::Pcf);
        assert_eq!(g.nodes.len(), 3);
        for (i, n) in g.nodes.iter().enumerate() {
            assert_eq!(n.successors, vec![i]);
            assert_eq!(n.period, Some(1));
            assert_eq!(n.preperiod, Some(0));
        }
    }

    #[test]
    fn control_map_is_not_pcf_within_bound() {
        let f = ProjectiveMap::new(vec![
            v(0).pow(2).add(&v(1).mul(&v(2)).unwrap()).unwrap(),
            v(1).pow(2),
            v(2).pow(2),
        ])
        .unwrap();
        let b = Bounds {
            max_iter: 10,
            ..Bounds::default()
        };
        let (g, verdict) = postcritical_graph(&f, b).unwrap();
        assert_eq!(verdict.status, PcfStatus::NotPcfWithinBound);
        assert!(g.nodes.len() > 5);
    }
}
