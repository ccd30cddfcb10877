//! Command-line front end: map ingestion, the catalog, the analysis
//! pipeline and report emission.

pub mod mapfile;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use pcflab_core::catalog::{lookup, CATALOG};
use pcflab_core::fatou::{basin_summary, BasinStatus, candidate_at, scan, superattracting_candidates, CandidateSearch, ScanConfig};
use pcflab_core::mpoly::Rational;
use pcflab_core::pcf::{
    build_tower, critical_components, postcritical_graph, restricted_critical_containment,
    topdeg_check, weak_transversality, Bounds, Component, PcfStatus, PostCriticalGraph,
};
use pcflab_core::periodic::{
    bezout_audit, periodic_table, eigenvalue_audit, ClassifyTol, DEFAULT_ELIMINATION_BUDGET,
};
use pcflab_core::projmap::{format_point, ProjectiveMap, Validation};
use pcflab_core::Error;

use mapfile::MapFile;
use report::{
    BoundsSection, ContainmentSection, DegenerateReport, DegreeChecks, FatouSection, IterateDegree,
    MapEcho, PcfSection, PeriodicSection, Report, ScanSection, EigenvalueAuditSection,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_NO_CANDIDATES: i32 = 5;

pub const DEFAULT_PRECISION: u32 = 256;
pub const PRECISION_ENV: &str = "PCFLAB_PRECISION";

/// Largest iterate whose degree is checked against `d^n`.
pub const ITERATE_DEGREE_CHECKS: u32 = 4;

/// An operational failure with its exit code.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Structured detail printed to stdout, e.g. a degeneracy witness.
    pub detail: Option<String>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), detail: None }
    }

    fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, message)
    }

    fn core(stage: &str, e: Error) -> Self {
        let code = match e {
            Error::LowDegree(_) => EXIT_DEGENERATE,
            _ => EXIT_RESOURCE,
        };
        Self::new(code, format!("{stage}: {e}"))
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

#[derive(Debug, Parser)]
#[command(name = "pcflab", version, about = "Post-critically finite endomorphisms of P^1 and P^2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Post-critical graph, tower and structural audits.
    Analyze(AnalyzeArgs),
    /// Periodic points, multiplier spectra and the eigenvalue audit.
    Periodic(PeriodicArgs),
    /// Basin scan of super-attracting candidates over a window.
    Fatou(FatouArgs),
    /// Built-in example maps.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Show { name: String },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `catalog:NAME` or a path to a map file.
    pub input: String,
    /// Working precision in bits; defaults to $PCFLAB_PRECISION or 256.
    #[arg(long)]
    pub precision: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Maximum number of component images in the post-critical closure.
    #[arg(long, default_value_t = Bounds::default().max_iter)]
    pub max_iter: usize,
    /// Maximum total degree of the post-critical components.
    #[arg(long, default_value_t = Bounds::default().max_degree)]
    pub max_degree: u32,
    /// Maximum coefficient size, in bits, of the post-critical components.
    #[arg(long, default_value_t = Bounds::default().max_height_bits)]
    pub max_height_bits: u64,
    /// Also tabulate periodic points up to this period.
    #[arg(long)]
    pub period: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodicArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub period: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Elimination size bound `(d^l + 1)^k`.
    #[arg(long, default_value_t = DEFAULT_ELIMINATION_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args)]
pub struct FatouArgs {
    #[command(flatten)]
    pub common: Common,
    /// Affine chart index: coordinate set to 1. Defaults to the last one.
    #[arg(long)]
    pub chart: Option<usize>,
    /// Window center: `re,im` on P^1, `a,b` (real) on P^2.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Pixels per side.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 60)]
    pub iters: u32,
    /// Output directory for basin.csv, basin.pgm and summary.json.
    #[arg(long, default_value = "pcflab-fatou")]
    pub out: PathBuf,
    /// Explicit targets, e.g. `1:0:0;0:0:1`; skips the candidate search.
    #[arg(long)]
    pub candidates: Option<String>,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if let Some(d) = &f.detail {
                println!("{d}");
            }
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command) -> CmdResult<()> {
    match cmd {
        Command::Analyze(a) => {
            let prec = precision(a.common.precision)?;
            let input = load_input(&a.common.input)?;
            let bounds = Bounds {
                max_iter: a.max_iter,
                max_degree: a.max_degree,
                max_height_bits: a.max_height_bits,
            };
            let report = analyze(&input, bounds, prec, a.period)?;
            emit(&report.to_json(), a.out.as_deref())
        }
        Command::Periodic(a) => {
            let prec = precision(a.common.precision)?;
            let input = load_input(&a.common.input)?;
            let mut report = Report::new(input.echo(), BoundsSection::new(prec));
            periodic_sections(&mut report, &input.map, a.period, prec, a.budget)?;
            emit(&report.to_json(), a.out.as_deref())
        }
        Command::Fatou(a) => fatou(&a),
        Command::Catalog { action } => catalog(action),
    }
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult<()> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Flag, then environment, then the default.
pub fn precision(flag: Option<u32>) -> CmdResult<u32> {
    let bits = match flag {
        Some(b) => b,
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Failure::input(format!("{PRECISION_ENV}={v:?} is not a bit count"))
            })?,
            Err(_) => DEFAULT_PRECISION,
        },
    };
    if !(64..=1 << 16).contains(&bits) {
        return Err(Failure::input(format!("precision {bits} outside 64..=65536 bits")));
    }
    Ok(bits)
}

/// A validated map and how it was obtained.
#[derive(Clone, Debug)]
pub struct Input {
    pub source: String,
    pub map: ProjectiveMap,
    pub validation: Validation,
}

impl Input {
    pub fn echo(&self) -> MapEcho {
        let (certificate, removed) = match &self.validation {
            Validation::WellDefined { certificate, removed_factor, .. } => {
                (Some(certificate.clone()), removed_factor.as_ref().map(|f| f.to_string()))
            }
            Validation::Degenerate(_) => (None, None),
        };
        MapEcho {
            source: self.source.clone(),
            k: self.map.k(),
            degree: self.map.degree(),
            components: self.map.comps().iter().map(|c| c.to_string()).collect(),
            certificate,
            removed_factor: removed,
        }
    }
}

/// Reads `catalog:NAME` or a map file path, validates the map and
/// requires degree at least 2.
pub fn load_input(spec: &str) -> CmdResult<Input> {
    let (source, forms) = if let Some(name) = spec.strip_prefix("catalog:") {
        let e = lookup(name).ok_or_else(|| {
            Failure::input(format!("unknown catalog map {name:?}; see `pcflab catalog list`"))
        })?;
        (spec.to_string(), e.map().comps().to_vec())
    } else {
        let text = fs::read_to_string(spec)
            .map_err(|e| Failure::input(format!("cannot read {spec}: {e}")))?;
        let mf = MapFile::parse(&text).map_err(|d| Failure::input(format!("{spec}: {d}")))?;
        let forms = mf.forms().map_err(|d| Failure::input(format!("{spec}: {d}")))?;
        (spec.to_string(), forms)
    };
    let validation = ProjectiveMap::validate(forms).map_err(|e| match e {
        Error::Unsupported(_) => Failure::input(format!("{source}: {e}")),
        e => Failure::input(format!("{source}: invalid map: {e}")),
    })?;
    let map = match &validation {
        Validation::WellDefined { map, .. } => map.clone(),
        Validation::Degenerate(w) => {
            let detail = serde_json::to_string_pretty(&DegenerateReport {
                source: source.clone(),
                verdict: "degenerate",
                witness: w.clone(),
            })
            .expect("witness serializes");
            return Err(Failure {
                code: EXIT_DEGENERATE,
                message: format!(
                    "{source}: degenerate map, common zero ({}): {}",
                    w.point.join(":"),
                    w.detail
                ),
                detail: Some(detail),
            });
        }
    };
    if map.degree() < 2 {
        let removed = match &validation {
            Validation::WellDefined { removed_factor: Some(f), .. } => {
                format!(" after removing the common factor {f}")
            }
            _ => String::new(),
        };
        return Err(Failure::new(
            EXIT_DEGENERATE,
            format!("{source}: algebraic degree {}{removed} is below 2", map.degree()),
        ));
    }
    Ok(Input { source, map, validation })
}

/// The structural pipeline: post-critical graph, tower, transversality,
/// containment and degree audits, super-attracting candidates, and
/// optionally the periodic table.
pub fn analyze(input: &Input, bounds: Bounds, prec: u32, period: Option<u32>) -> CmdResult<Report> {
    let m = &input.map;
    let mut b = BoundsSection::new(prec);
    b.pcf = Some(bounds);
    let mut report = Report::new(input.echo(), b);
    let crit = critical_components(m).map_err(|e| Failure::core("critical set", e))?;
    let (graph, verdict) =
        postcritical_graph(m, bounds).map_err(|e| Failure::core("post-critical graph", e))?;
    let pc: Vec<Component> = graph.postcritical().into_iter().cloned().collect();
    let is_pcf = verdict.status == PcfStatus::Pcf;
    let tower = if is_pcf {
        Some(build_tower(m, &graph, &verdict, bounds).map_err(|e| Failure::core("tower", e))?)
    } else {
        None
    };
    report.transversality =
        Some(weak_transversality(&pc, prec).map_err(|e| Failure::core("transversality", e))?);
    report.containment = Some(match (&tower, m.k()) {
        (Some(t), 2) => {
            let graph_crit: Vec<Component> =
                graph.nodes.iter().filter(|n| n.critical).map(|n| n.component.clone()).collect();
            let r = restricted_critical_containment(m, &t.levels[0], &graph_crit, prec)
                .map_err(|e| Failure::core("containment", e))?;
            ContainmentSection { applicable: true, note: None, report: Some(r) }
        }
        (Some(_), _) => ContainmentSection {
            applicable: false,
            note: Some("first tower level is zero-dimensional".into()),
            report: None,
        },
        (None, _) => ContainmentSection {
            applicable: false,
            note: Some("no tower: post-critical closure did not finish".into()),
            report: None,
        },
    });
    report.degree_checks = Some(degree_checks(m, tower.as_ref())?);
    if is_pcf {
        let tol = ClassifyTol::default();
        let search = superattracting_candidates(m, &graph, prec, &tol)
            .map_err(|e| Failure::core("candidates", e))?;
        report.fatou = Some(FatouSection { candidates: search, explicit: false, scan: None });
        report.bounds.classify = Some(tol);
    }
    report.pcf = Some(PcfSection { verdict, critical: crit, postcritical: pc, graph });
    report.tower = tower;
    if let Some(l) = period {
        periodic_sections(&mut report, m, l, prec, DEFAULT_ELIMINATION_BUDGET)?;
    }
    Ok(report)
}

fn degree_checks(m: &ProjectiveMap, tower: Option<&pcflab_core::pcf::Tower>) -> CmdResult<DegreeChecks> {
    let restrictions: Vec<_> = tower
        .map(|t| t.levels.iter().flat_map(|l| topdeg_check(l, m.degree())).collect())
        .unwrap_or_default();
    let mut iterates = Vec::new();
    for n in 1..=ITERATE_DEGREE_CHECKS {
        let f = m.iterate(n).map_err(|e| Failure::core("iterate", e))?;
        let expected = (m.degree() as u64).pow(n);
        iterates.push(IterateDegree { n, degree: f.degree(), expected, pass: f.degree() as u64 == expected });
    }
    let pass = restrictions.iter().all(|r| r.pass) && iterates.iter().all(|r| r.pass);
    Ok(DegreeChecks { restrictions, iterates, pass })
}

/// Fills the periodic table, the eigenvalue audit and the Bezout checks.
pub fn periodic_sections(
    report: &mut Report,
    m: &ProjectiveMap,
    max_period: u32,
    prec: u32,
    budget: u64,
) -> CmdResult<()> {
    if max_period == 0 {
        return Err(Failure::input("period must be at least 1"));
    }
    let tol = ClassifyTol::default();
    let (points, searches) =
        periodic_table(m, max_period, prec, budget, &tol).map_err(|e| Failure::core("periodic points", e))?;
    let audit = eigenvalue_audit(&points, &tol);
    let counts = (1..=max_period)
        .map(|l| points.iter().filter(|p| p.period == l).count() as u32)
        .collect();
    report.periodic = Some(PeriodicSection {
        max_period,
        counts,
        points: audit.points,
        bezout: searches.iter().map(|s| bezout_audit(m, s)).collect(),
        diagnostics: searches.iter().flat_map(|s| s.diagnostics.iter().cloned()).collect(),
    });
    report.eigenvalue_audit = Some(EigenvalueAuditSection {
        pass: audit.violations.is_empty(),
        violations: audit.violations,
        findings: audit.findings,
        tolerances: audit.tolerances,
    });
    report.bounds.elimination_budget = Some(budget);
    report.bounds.classify = Some(tol);
    Ok(())
}

fn parse_f64(s: &str, what: &str) -> CmdResult<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Failure::input(format!("{what}: {s:?} is not a finite number")))
}

/// Window center in chart coordinates; the origin when absent.
pub fn parse_center(s: Option<&str>, k: usize) -> CmdResult<Vec<Complex64>> {
    let Some(s) = s else {
        return Ok(vec![Complex64::new(0.0, 0.0); k]);
    };
    let parts: Vec<f64> = s.split(',').map(|p| parse_f64(p, "--center")).collect::<CmdResult<_>>()?;
    match (k, parts.len()) {
        (1, 1) => Ok(vec![Complex64::new(parts[0], 0.0)]),
        (1, 2) => Ok(vec![Complex64::new(parts[0], parts[1])]),
        (2, 2) => Ok(parts.iter().map(|&x| Complex64::new(x, 0.0)).collect()),
        _ => Err(Failure::input(format!(
            "--center {s:?}: expected {} comma-separated numbers",
            if k == 1 { "re,im" } else { "a,b" }
        ))),
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (num_bigint::BigInt, num_bigint::BigInt) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
            (d != num_bigint::BigInt::from(0)).then(|| Rational::new(n, d))
        }
        None => s.parse().ok().map(Rational::from_integer),
    }
}

/// `p0:p1:...;q0:q1:...` with optional parentheses and rational entries.
pub fn parse_candidates(s: &str) -> CmdResult<Vec<Vec<Rational>>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let inner = p.trim().trim_start_matches('(').trim_end_matches(')');
            inner
                .split(':')
                .map(|c| {
                    parse_rational(c)
                        .ok_or_else(|| Failure::input(format!("--candidates: bad coordinate {c:?} in {p:?}")))
                })
                .collect()
        })
        .collect()
}

fn fatou(a: &FatouArgs) -> CmdResult<()> {
    let prec = precision(a.common.precision)?;
    let input = load_input(&a.common.input)?;
    let m = &input.map;
    let k = m.k();
    let tol = ClassifyTol::default();
    let (search, explicit) = match &a.candidates {
        Some(s) => {
            let pts = parse_candidates(s)?;
            let mut cands = Vec::new();
            for p in &pts {
                cands.push(candidate_at(m, p, prec).map_err(|e| Failure::input(format!("--candidates: {e}")))?);
            }
            let search = CandidateSearch {
                candidates: cands,
                intersections: pts.iter().map(|p| format_point(p)).collect(),
                diagnostics: vec!["targets supplied with --candidates".into()],
            };
            (search, true)
        }
        None => {
            let (graph, verdict): (PostCriticalGraph, _) = postcritical_graph(m, Bounds::default())
                .map_err(|e| Failure::core("post-critical graph", e))?;
            if verdict.status != PcfStatus::Pcf {
                return Err(Failure::new(
                    EXIT_NO_CANDIDATES,
                    format!(
                        "no candidates: the post-critical closure did not finish ({:?}); pass targets with --candidates",
                        verdict.status
                    ),
                ));
            }
            let s = superattracting_candidates(m, &graph, prec, &tol)
                .map_err(|e| Failure::core("candidates", e))?;
            (s, false)
        }
    };
    if search.candidates.is_empty() {
        return Err(Failure::new(
            EXIT_NO_CANDIDATES,
            "no super-attracting candidates among the post-critical intersections; \
             run `pcflab analyze` to inspect them or pass targets with --candidates",
        ));
    }
    let chart = a.chart.unwrap_or(k);
    let center = parse_center(a.center.as_deref(), k)?;
    let mut config = ScanConfig::new(chart, center, a.radius, a.grid);
    config.max_iters = a.iters;
    config.candidates = search.candidates.iter().map(|c| c.cycle_f64()).collect();
    let grid = scan(m, &config).map_err(|e| match e {
        Error::Invalid(msg) => Failure::input(msg),
        e => Failure::core("scan", e),
    })?;
    let names: Vec<String> = search.candidates.iter().map(|c| format_point(&c.point)).collect();
    let summary = basin_summary(&grid, &names);
    fs::create_dir_all(&a.out)
        .map_err(|e| Failure::input(format!("cannot create {}: {e}", a.out.display())))?;
    let write = |name: &str, bytes: &[u8]| -> CmdResult<String> {
        let p = a.out.join(name);
        fs::write(&p, bytes).map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display())))?;
        Ok(p.display().to_string())
    };
    let mut files = vec![write("basin.csv", grid.to_csv().as_bytes())?, write("basin.pgm", &grid.to_pgm())?];
    files.push(a.out.join("summary.json").display().to_string());
    let headline = format!(
        "{}: {}",
        match summary.status {
            BasinStatus::Consistent => "CONSISTENT",
            BasinStatus::Finding => "FINDING",
        },
        summary
            .basins
            .iter()
            .map(|b| format!("{:.2}% {}", 100.0 * b.fraction, b.label))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let mut report = Report::new(input.echo(), BoundsSection::new(prec).with_scan(&config));
    report.bounds.classify = Some(tol);
    report.fatou = Some(FatouSection {
        candidates: search,
        explicit,
        scan: Some(ScanSection::new(&config, summary, files)),
    });
    write("summary.json", report.to_json().as_bytes())?;
    println!("{headline}");
    Ok(())
}

fn catalog(action: CatalogAction) -> CmdResult<()> {
    match action {
        CatalogAction::List => {
            for e in CATALOG {
                println!("{}\t{}\t{}", e.name, e.summary, e.provenance);
            }
            Ok(())
        }
        CatalogAction::Show { name } => {
            let e = lookup(&name).ok_or_else(|| {
                Failure::input(format!("unknown catalog map {name:?}; see `pcflab catalog list`"))
            })?;
            println!("{}", MapFile::from_map(&e.map()).to_json());
            Ok(())
        }
    }
}
