use std::fs;
use std::process::{Command, Output};

use num_bigint::BigInt;
use pcflab::mapfile::{MapFile, Term};
use pcflab::{load_input, parse_candidates, parse_center};
use pcflab_core::catalog::CATALOG;
use pcflab_core::mpoly::Rational;
use pcflab_core::poly::HomPoly;
use proptest::prelude::*;
use serde_json::Value;

fn pcflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcflab"))
        .args(args)
        .env_remove("PCFLAB_PRECISION")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn catalog_listing_and_show() {
    let o = pcflab(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 3);
    let fs_line = text.lines().find(|l| l.starts_with("fs-1992-a\t")).unwrap();
    assert!(fs_line.contains("all dynamical claims derived by this tool, not assumed"));

    let o = pcflab(&["catalog", "show", "squaring-p2"]);
    assert_eq!(code(&o), 0);
    let mf: MapFile = serde_json::from_slice(&o.stdout).unwrap();
    let one = |exps: Vec<u32>| vec![Term { num: "1".into(), den: "1".into(), exps }];
    assert_eq!(
        mf,
        MapFile {
            k: 2,
            degree: 2,
            components: vec![one(vec![2, 0, 0]), one(vec![0, 2, 0]), one(vec![0, 0, 2])],
        }
    );

    assert_eq!(code(&pcflab(&["catalog", "show", "nope"])), 2);
}

#[test]
fn show_then_analyze_round_trips_every_catalog_map() {
    let dir = tempfile::tempdir().unwrap();
    for e in CATALOG {
        let o = pcflab(&["catalog", "show", e.name]);
        assert_eq!(code(&o), 0);
        let path = write(&dir, &format!("{}.json", e.name), &String::from_utf8(o.stdout).unwrap());
        let loaded = load_input(&path).unwrap();
        assert_eq!(loaded.map.comps(), e.map().comps(), "{}", e.name);
        let from_catalog = load_input(&format!("catalog:{}", e.name)).unwrap();
        assert_eq!(loaded.map, from_catalog.map);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        &dir,
        "broken.json",
        r#"{"k":2,"degree":2,"components":[[{"num":"1","den":"1","exps":[2,0,0]}],
        [{"num":"1","den":"1","exps":[1,1,1]}],[{"num":"1","den":"1","exps":[0,2,0]}]]}"#,
    );
    let o = pcflab(&["analyze", &broken]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("component 2, term 1: exponents sum to 3, expected degree 2"));

    let syntax = write(&dir, "syntax.json", "{\"k\": 2,\n \"degree\": 2,\n \"components\": [}");
    let o = pcflab(&["analyze", &syntax]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let missing = dir.path().join("absent.json").display().to_string();
    assert_eq!(code(&pcflab(&["analyze", &missing])), 2);
    assert_eq!(code(&pcflab(&["analyze", "catalog:nope"])), 2);
    assert_eq!(code(&pcflab(&["analyze"])), 2);
    assert_eq!(code(&pcflab(&["frobnicate"])), 2);

    let degenerate = write(
        &dir,
        "degenerate.json",
        r#"{"k":2,"degree":2,"components":[[{"num":"1","den":"1","exps":[2,0,0]}],
        [{"num":"1","den":"1","exps":[1,1,0]}],[{"num":"1","den":"1","exps":[0,2,0]}]]}"#,
    );
    let o = pcflab(&["analyze", &degenerate]);
    assert_eq!(code(&o), 3);
    let w = json(&o);
    assert_eq!(w["witness"]["point"], serde_json::json!(["0", "0", "1"]));

    let linear = write(
        &dir,
        "linear.json",
        r#"{"k":1,"degree":1,"components":[[{"num":"1","den":"1","exps":[1,0]}],
        [{"num":"1","den":"1","exps":[0,1]}]]}"#,
    );
    assert_eq!(code(&pcflab(&["analyze", &linear])), 3);
    // (s^3 : s t^2) has the common factor s and degree 2 left
    let factor = write(
        &dir,
        "factor.json",
        r#"{"k":1,"degree":3,"components":[[{"num":"1","den":"1","exps":[3,0]}],
        [{"num":"1","den":"1","exps":[1,2]}]]}"#,
    );
    let o = pcflab(&["analyze", &factor]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["map"]["removed_factor"], "s");

    let o = pcflab(&["periodic", "catalog:squaring-p2", "--period", "9"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("budget"));
    assert_eq!(code(&pcflab(&["periodic", "catalog:squaring-p2", "--period", "0"])), 2);

    // (x^2 + yz : y^2 : z^2) does not close up within the bounds
    let open = write(
        &dir,
        "open.json",
        r#"{"k":2,"degree":2,"components":[[{"num":"1","den":"1","exps":[2,0,0]},
        {"num":"1","den":"1","exps":[0,1,1]}],[{"num":"1","den":"1","exps":[0,2,0]}],
        [{"num":"1","den":"1","exps":[0,0,2]}]]}"#,
    );
    let out = dir.path().join("fatou").display().to_string();
    let o = pcflab(&["fatou", &open, "--out", &out]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("--candidates"));
    let o = pcflab(&["analyze", &open, "--max-iter", "10"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["pcf"]["verdict"]["status"], "not-pcf-within-bound");
    assert!(json(&o)["tower"].is_null());
}

#[test]
fn report_layout_is_fixed() {
    let o = pcflab(&["analyze", "catalog:squaring-p1", "--period", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("  \""))
        .filter_map(|l| l.split('"').next())
        .collect();
    let v = json(&o);
    assert_eq!(
        keys,
        [
            "map",
            "pcf",
            "tower",
            "transversality",
            "containment",
            "degree_checks",
            "periodic",
            "theorem_b",
            "fatou",
            "bounds"
        ]
    );
    assert_eq!(v["periodic"]["counts"], serde_json::json!([3, 2]));
    assert_eq!(v["bounds"]["precision_bits"], 256);
}

#[test]
fn reports_and_scans_are_deterministic() {
    let a = pcflab(&["analyze", "catalog:fs-1992-a"]);
    let b = pcflab(&["analyze", "catalog:fs-1992-a"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub).display().to_string();
        let args = [
            "fatou", "catalog:basilica-squaring-p2", "--center", "0.1,-0.2", "--radius", "1.5",
            "--grid", "24", "--out", &out,
        ];
        assert_eq!(code(&pcflab(&args)), 0);
        ["basin.csv", "basin.pgm", "summary.json"].map(|f| fs::read(dir.path().join(sub).join(f)).unwrap())
    };
    let (x, y) = (run("one"), run("two"));
    assert_eq!(x[0], y[0]);
    assert_eq!(x[1], y[1]);
}

#[test]
fn fatou_writes_grid_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan").display().to_string();
    let o = pcflab(&[
        "fatou", "catalog:squaring-p1", "--chart", "1", "--center", "0,0", "--radius", "0.5",
        "--grid", "16", "--out", &out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("CONSISTENT"));
    let csv = fs::read_to_string(dir.path().join("scan/basin.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("row,col,label,iters"));
    assert_eq!(lines.count(), 256);
    let pgm = fs::read(dir.path().join("scan/basin.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n16 16\n255\n"));
    assert_eq!(pgm.len(), b"P5\n16 16\n255\n".len() + 256);
    let summary: Value =
        serde_json::from_slice(&fs::read(dir.path().join("scan/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["fatou"]["scan"]["summary"]["status"], "CONSISTENT");
    assert_eq!(summary["fatou"]["scan"]["summary"]["basins"][0]["label"], "(0:1)");

    let o = pcflab(&[
        "fatou", "catalog:squaring-p2", "--candidates", "(1:0:0)", "--center", "2,0.5", "--radius",
        "0.2", "--grid", "8", "--out", &out,
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("100.00% (1:0:0)"));
    let o = pcflab(&["fatou", "catalog:squaring-p2", "--candidates", "1:2:3", "--out", &out]);
    assert_eq!(code(&o), 2);
    let o = pcflab(&["fatou", "catalog:squaring-p2", "--center", "1,2,3", "--out", &out]);
    assert_eq!(code(&o), 2);
}

#[test]
fn precision_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_pcflab"));
        c.args(["periodic", "catalog:squaring-p1"]).args(extra);
        match env {
            Some(v) => c.env("PCFLAB_PRECISION", v),
            None => c.env_remove("PCFLAB_PRECISION"),
        };
        c.output().unwrap()
    };
    let bits = |o: &Output| json(o)["bounds"]["precision_bits"].as_u64().unwrap();
    assert_eq!(bits(&run(None, &[])), 256);
    assert_eq!(bits(&run(Some("384"), &[])), 384);
    assert_eq!(bits(&run(Some("384"), &["--precision", "192"])), 192);
    assert_eq!(code(&run(Some("lots"), &[])), 2);
}

#[test]
fn argument_parsers() {
    assert_eq!(parse_center(Some("0.5,-1"), 1).unwrap()[0].im, -1.0);
    assert_eq!(parse_center(Some("2,0.5"), 2).unwrap().len(), 2);
    assert!(parse_center(Some("2"), 2).is_err());
    assert!(parse_center(Some("a,b"), 2).is_err());
    let c = parse_candidates("(1:0:0); 1/2:-3:0").unwrap();
    assert_eq!(c[1][0], Rational::new(BigInt::from(1), BigInt::from(2)));
    assert!(parse_candidates("1:x:0").is_err());
    assert!(parse_candidates("1/0:1:0").is_err());
}

/// Exponent vectors of total degree `d` in `n` variables.
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

fn random_forms() -> impl Strategy<Value = Vec<HomPoly>> {
    (1usize..=2, 1u32..=3).prop_flat_map(|(k, d)| {
        let monos = monomials(k + 1, d);
        let count = monos.len();
        let term = (0..count, -50i64..=50, 1i64..=12);
        prop::collection::vec(prop::collection::vec(term, 0..=4), k + 1).prop_map(move |comps| {
            comps
                .into_iter()
                .map(|ts| {
                    let mut seen = Vec::new();
                    let terms: Vec<(Vec<u32>, Rational)> = ts
                        .into_iter()
                        .filter(|(i, _, _)| {
                            let fresh = !seen.contains(i);
                            seen.push(*i);
                            fresh
                        })
                        .map(|(i, a, b)| (monos[i].clone(), Rational::new(a.into(), b.into())))
                        .collect();
                    HomPoly::from_terms(k + 1, d, terms).unwrap()
                })
                .collect()
        })
    })
}

fn file_from_forms(forms: &[HomPoly], degree: u32) -> MapFile {
    MapFile {
        k: forms.len() - 1,
        degree,
        components: forms
            .iter()
            .map(|f| {
                f.terms()
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn map_files_round_trip(forms in random_forms()) {
        prop_assume!(forms.iter().any(|f| !f.is_zero()));
        let d = forms[0].degree();
        let text = file_from_forms(&forms, d).to_json();
        let parsed = MapFile::parse(&text).unwrap();
        prop_assert_eq!(parsed.forms().unwrap(), forms.clone());
        prop_assert_eq!(MapFile::parse(&parsed.to_json()).unwrap(), parsed);
    }
}
