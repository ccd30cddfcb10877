//! The analysis report and its sections. Field order is the output order.

use pcflab_core::fatou::{BasinSummary, CandidateSearch, ScanConfig, CONSECUTIVE_HITS, DERIVATIVE_DECAY};
use pcflab_core::pcf::{
    Bounds, Component, ContainmentReport, PcfVerdict, PostCriticalGraph, TopDegEntry, Tower,
    TransversalityReport,
};
use pcflab_core::periodic::{AuditedPoint, BezoutReport, ClassifyTol};
use pcflab_core::projmap::{Certificate, DegenerateWitness};
use serde::Serialize;

/// Sample-point tolerance used to prune extraneous elimination factors.
pub const IMAGE_SAMPLE_TOLERANCE: f64 = 1e-25;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub map: MapEcho,
    pub pcf: Option<PcfSection>,
    pub tower: Option<Tower>,
    pub transversality: Option<TransversalityReport>,
    pub containment: Option<ContainmentSection>,
    pub degree_checks: Option<DegreeChecks>,
    pub periodic: Option<PeriodicSection>,
    #[serde(rename = "theorem_b")]
    pub eigenvalue_audit: Option<EigenvalueAuditSection>,
    pub fatou: Option<FatouSection>,
    pub bounds: BoundsSection,
}

impl Report {
    pub fn new(map: MapEcho, bounds: BoundsSection) -> Self {
        Report {
            map,
            pcf: None,
            tower: None,
            transversality: None,
            containment: None,
            degree_checks: None,
            periodic: None,
            eigenvalue_audit: None,
            fatou: None,
            bounds,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MapEcho {
    pub source: String,
    pub k: usize,
    pub degree: u32,
    pub components: Vec<String>,
    pub certificate: Option<Certificate>,
    /// Common factor divided out of the input tuple.
    pub removed_factor: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerateReport {
    pub source: String,
    pub verdict: &'static str,
    pub witness: DegenerateWitness,
}

#[derive(Clone, Debug, Serialize)]
pub struct PcfSection {
    pub verdict: PcfVerdict,
    pub critical: Vec<Component>,
    pub postcritical: Vec<Component>,
    pub graph: PostCriticalGraph,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainmentSection {
    pub applicable: bool,
    pub note: Option<String>,
    pub report: Option<ContainmentReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterateDegree {
    pub n: u32,
    pub degree: u32,
    pub expected: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeChecks {
    pub restrictions: Vec<TopDegEntry>,
    pub iterates: Vec<IterateDegree>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicSection {
    pub max_period: u32,
    /// Points of minimal period `l`, for each `l`.
    pub counts: Vec<u32>,
    pub points: Vec<AuditedPoint>,
    pub bezout: Vec<BezoutReport>,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueAuditSection {
    pub pass: bool,
    pub violations: Vec<String>,
    pub findings: Vec<String>,
    pub tolerances: ClassifyTol,
}

#[derive(Clone, Debug, Serialize)]
pub struct FatouSection {
    pub candidates: CandidateSearch,
    /// Whether the targets came from `--candidates`.
    pub explicit: bool,
    pub scan: Option<ScanSection>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSection {
    pub chart: usize,
    pub center: Vec<[f64; 2]>,
    pub radius: f64,
    pub resolution: usize,
    pub max_iters: u32,
    pub window: &'static str,
    pub summary: BasinSummary,
    pub files: Vec<String>,
}

impl ScanSection {
    pub fn new(config: &ScanConfig, summary: BasinSummary, files: Vec<String>) -> Self {
        ScanSection {
            chart: config.chart,
            center: config.center.iter().map(|z| [z.re, z.im]).collect(),
            radius: config.radius,
            resolution: config.resolution,
            max_iters: config.max_iters,
            window: if config.center.len() == 1 {
                "complex square in the chart coordinate"
            } else {
                "real slice spanned by the first two chart coordinates"
            },
            summary,
            files,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanTolerances {
    pub convergence: f64,
    pub consecutive_hits: u32,
    pub derivative_decay: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsSection {
    pub precision_bits: u32,
    pub pcf: Option<Bounds>,
    pub image_sample_tolerance: f64,
    pub degree_cap: u64,
    pub elimination_budget: Option<u64>,
    pub classify: Option<ClassifyTol>,
    pub scan: Option<ScanTolerances>,
}

impl BoundsSection {
    pub fn new(precision_bits: u32) -> Self {
        BoundsSection {
            precision_bits,
            pcf: None,
            image_sample_tolerance: IMAGE_SAMPLE_TOLERANCE,
            degree_cap: pcflab_core::projmap::DEFAULT_DEGREE_CAP,
            elimination_budget: None,
            classify: None,
            scan: None,
        }
    }

    pub fn with_scan(mut self, config: &ScanConfig) -> Self {
        self.scan = Some(ScanTolerances {
            convergence: config.tolerance,
            consecutive_hits: CONSECUTIVE_HITS,
            derivative_decay: DERIVATIVE_DECAY,
        });
        self
    }
}
