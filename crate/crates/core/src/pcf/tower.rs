//! The tower of periodic post-critical components and first-return maps.

use num_integer::Integer;
use serde::Serialize;

use super::{postcritical_graph, Bounds, PcfStatus, PcfVerdict, PostCriticalGraph};
use crate::error::{Error, Result};
use crate::projmap::{format_point, LinearEmbedding, ProjectiveMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryVerdict {
    /// Restricted map of degree 1: empty critical set.
    Unbranched,
    Pcf,
    Inconclusive(String),
    UnsupportedNonlinear,
    /// Dimension 0: the tower stops here.
    Terminal,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerEntry {
    /// Defining data of the entry: form in the parent's coordinates or an
    /// ambient point.
    pub locus: String,
    /// Ambient embedding; absent for non-rational loci.
    pub embedding: Option<LinearEmbedding>,
    pub dim: usize,
    /// First-return map on the entry.
    pub restricted_map: Option<ProjectiveMap>,
    pub verdict: EntryVerdict,
    /// Indices of the entries of the previous level containing this one.
    pub parents: Vec<usize>,
    #[serde(skip)]
    pub graph: Option<PostCriticalGraph>,
    pub pcf: Option<PcfVerdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerLevel {
    /// Codimension of the entries.
    pub m: usize,
    /// Iterate exponent relative to the previous level's maps.
    pub k_m: u32,
    /// Exponent relative to the ambient map.
    pub cumulative_exponent: u32,
    pub entries: Vec<TowerEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tower {
    pub levels: Vec<TowerLevel>,
}

impl Tower {
    pub fn all_entries(&self) -> impl Iterator<Item = &TowerEntry> {
        self.levels.iter().flat_map(|l| l.entries.iter())
    }
}

struct Parent {
    /// Index of the entry in the previous level.
    index: usize,
    embedding: LinearEmbedding,
    map: ProjectiveMap,
    graph: PostCriticalGraph,
}

/// Builds the tower from a post-critical graph with PCF status.
///
/// Level `m` consists of the periodic components of the post-critical sets
/// of the level `m - 1` maps; `k_m` is the lcm of their periods and each
/// linear entry carries the restriction of the `k_m`-th iterate.
pub fn build_tower(
    m: &ProjectiveMap,
    graph: &PostCriticalGraph,
    verdict: &PcfVerdict,
    bounds: Bounds,
) -> Result<Tower> {
    if verdict.status != PcfStatus::Pcf {
        return Err(Error::Invalid(
            "the tower is only defined for a closed post-critical graph".into(),
        ));
    }
    let mut parents = vec![Parent {
        index: 0,
        embedding: LinearEmbedding::identity(m.nvars()),
        map: m.clone(),
        graph: graph.clone(),
    }];
    let mut levels = Vec::new();
    let mut cumulative = 1u32;
    let mut codim = 0;
    while !parents.is_empty() {
        codim += 1;
        let k_m = parents
            .iter()
            .flat_map(|p| p.graph.nodes.iter().filter_map(|n| n.period))
            .fold(1u32, |acc, p| acc.lcm(&p));
        cumulative = cumulative.saturating_mul(k_m);
        let mut entries: Vec<TowerEntry> = Vec::new();
        let mut next = Vec::new();
        for parent in &parents {
            let pi = parent.index;
            let r = parent.map.k();
            let mut iterated: Option<ProjectiveMap> = None;
            for node in parent.graph.nodes.iter().filter(|n| n.period.is_some()) {
                let comp = &node.component;
                if !comp.is_linear() {
                    let verdict = if r == 1 {
                        EntryVerdict::Terminal
                    } else {
                        EntryVerdict::UnsupportedNonlinear
                    };
                    entries.push(TowerEntry {
                        locus: format!("{comp} on entry {pi}"),
                        embedding: None,
                        dim: r - 1,
                        restricted_map: None,
                        verdict,
                        parents: vec![pi],
                        graph: None,
                        pcf: None,
                    });
                    continue;
                }
                let local = LinearEmbedding::hyperplane(&comp.linear_coeffs().unwrap());
                let ambient = parent.embedding.compose(&local);
                if let Some(e) = entries
                    .iter_mut()
                    .find(|e| e.embedding.as_ref().is_some_and(|x| x.same_span(&ambient)))
                {
                    if !e.parents.contains(&pi) {
                        e.parents.push(pi);
                    }
                    continue;
                }
                let dim = local.dim();
                if dim == 0 {
                    let p = ambient.as_point().unwrap();
                    entries.push(TowerEntry {
                        locus: format_point(&p),
                        embedding: Some(LinearEmbedding::point(&p)),
                        dim,
                        restricted_map: None,
                        verdict: EntryVerdict::Terminal,
                        parents: vec![pi],
                        graph: None,
                        pcf: None,
                    });
                    continue;
                }
                if iterated.is_none() {
                    iterated = Some(parent.map.iterate(k_m)?);
                }
                let g = iterated.as_ref().unwrap().restrict(&local, &local)?;
                let (verdict, sub) = if g.degree() <= 1 {
                    (EntryVerdict::Unbranched, None)
                } else {
                    let (sg, sv) = postcritical_graph(&g, bounds)?;
                    let v = match sv.status {
                        PcfStatus::Pcf => EntryVerdict::Pcf,
                        _ => EntryVerdict::Inconclusive(
                            sv.reason.clone().unwrap_or_else(|| "bound reached".into()),
                        ),
                    };
                    (v, Some((sg, sv)))
                };
                if verdict == EntryVerdict::Pcf {
                    next.push(Parent {
                        index: entries.len(),
                        embedding: ambient.clone(),
                        map: g.clone(),
                        graph: sub.as_ref().unwrap().0.clone(),
                    });
                }
                entries.push(TowerEntry {
                    locus: comp.to_string(),
                    embedding: Some(ambient),
                    dim,
                    restricted_map: Some(g),
                    verdict,
                    parents: vec![pi],
                    pcf: sub.as_ref().map(|s| s.1.clone()),
                    graph: sub.map(|s| s.0),
                });
            }
        }
        if entries.is_empty() {
            break;
        }
        levels.push(TowerLevel {
            m: codim,
            k_m,
            cumulative_exponent: cumulative,
            entries,
        });
        // entries that became parents keep their level order
        parents = next;
    }
    Ok(Tower { levels })
}
