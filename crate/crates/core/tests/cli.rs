use std::fs;
use std::path::{Path, PathBuf};

use quantaloid_core::cli::{run, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
use quantaloid_core::library::m3;
use quantaloid_core::text::parse_map;
use quantaloid_core::{LatticeMorphism, VerificationReport};
use tempfile::TempDir;

const M3_FILE: &str = "lattice M3\nelements: 0 a b c 1\ncovers: 0<a 0<b 0<c a<1 b<1 c<1\n";
const C3_FILE: &str = "# chain\nlattice C3\nelements: 0 a 1\ncovers: 0<a a<1\n";
const SPLIT_MAP: &str = "map f : M3 -> M3\nclass: power\na -> a\nb -> b\nc -> c\n1 -> a b c\n";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn qlat(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("qlat").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_files_passes() {
    let dir = TempDir::new().unwrap();
    let (m, c) = (write(&dir, "M3.lat", M3_FILE), write(&dir, "C3.lat", C3_FILE));
    let r = qlat(&["verify", s(&m), s(&c), "C2"]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.out, r.err);
    assert!(r.out.contains("0 failed"));
    assert!(r.out.contains("not-applicable  state-outside-minus      C3"));
}

#[test]
fn verify_nothing_is_empty_success() {
    let r = qlat(&["verify"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("0 checks, 0 failed"));
}

#[test]
fn verify_reports_bad_lattice_per_lattice() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.lat", "lattice X\nelements: 0 1\ncovers: 0<1 1<0\n");
    let r = qlat(&["verify", s(&bad), "C2"]);
    assert_eq!(r.code, EXIT_CHECK_FAILED);
    assert!(r.out.contains("fail            construction"));
    assert!(r.out.contains("pass            strict-inclusions") || r.out.contains("not-applicable  strict-inclusions"));
}

#[test]
fn verify_structured_round_trips() {
    let r = qlat(&["--format", "structured", "verify", "C3"]);
    assert_eq!(r.code, EXIT_OK);
    let report = VerificationReport::from_json(&r.out).unwrap();
    assert!(report.passed());
    let again = VerificationReport::from_json(&qlat(&["--format", "structured", "verify", "C3"]).out).unwrap();
    let untimed = |mut rep: VerificationReport| {
        rep.records.iter_mut().for_each(|r| r.elapsed_ms = 0);
        rep
    };
    assert_eq!(untimed(again), untimed(report));
}

#[test]
fn enumerate_counts() {
    let r = qlat(&["enumerate", "--hom", "M3", "M3", "--tier", "qplus"]);
    assert_eq!((r.code, r.out.as_str()), (EXIT_OK, "65536\n"));
    let r = qlat(&["enumerate", "--hom", "C3", "C3"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out, "C3 -> C3\npA       6\nqminus   11\nqst      11\nqplus    16\n");
    let r = qlat(&["enumerate", "--hom", "M3", "M3", "--class", "monotone"]);
    assert_eq!(r.out, "150\n");
    let r = qlat(&["enumerate", "--hom", "C3", "C3", "--class", "partial", "--list"]);
    assert!(
        r.out
            .starts_with("9\nmap f0 : C3 -> C3\nclass: partial\na -> -\n1 -> -\n"),
        "{}",
        r.out
    );
}

#[test]
fn enumerate_subcategories() {
    let r = qlat(&["enumerate", "--hom", "C3", "C3", "--tier", "pA", "--subcat", "fixedtop"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let dir = TempDir::new().unwrap();
    let gens = write(&dir, "gens.map", "map g : C3 -> C3\nclass: join\na -> a\n1 -> a\n");
    let sub = format!("generated:{}", s(&gens));
    let plain = qlat(&["enumerate", "--hom", "C3", "C3", "--tier", "pA", "--subcat", &sub]);
    let enriched = qlat(&[
        "enumerate",
        "--hom",
        "C3",
        "C3",
        "--tier",
        "pA",
        "--subcat",
        &sub,
        "--enrich",
    ]);
    assert_eq!(plain.code, EXIT_OK, "{}", plain.err);
    // identity and the idempotent g; closing under joins adds the zero map
    assert_eq!(plain.out, "2\n");
    assert_eq!(enriched.out, "3\n");
    let r = qlat(&["enumerate", "--hom", "C3", "C3", "--subcat", "bogus"]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn guard_is_enforced() {
    let r = qlat(&["--guard", "100", "enumerate", "--hom", "M3", "M3", "--tier", "qplus"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("guard"), "{}", r.err);
}

#[test]
fn classify_split_join_map() {
    let dir = TempDir::new().unwrap();
    let map = write(&dir, "split.map", SPLIT_MAP);
    let r = qlat(&["classify", s(&map)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(
        r.out.contains("state transition: yes; f_pr = id; in Q⁻: no"),
        "{}",
        r.out
    );
    let r = qlat(&["--format", "structured", "classify", s(&map)]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v[0]["state_transition"], true);
    assert_eq!(v[0]["in_q_minus"], false);
}

#[test]
fn classify_replays_suite_witness() {
    let report = VerificationReport::from_json(&qlat(&["--format", "structured", "verify", "C3"]).out).unwrap();
    let record = report.records.iter().find(|r| r.id == "state-plus-collapse").unwrap();
    let dir = TempDir::new().unwrap();
    let map = write(&dir, "w.map", &record.witnesses[0]);
    let r = qlat(&["classify", s(&map)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("state transition: no"), "{}", r.out);
}

#[test]
fn lattice_flag_registers_names() {
    let dir = TempDir::new().unwrap();
    let chain = write(&dir, "k.lat", "lattice K\nelements: 0 x y 1\ncovers: 0<x x<y y<1\n");
    let map = write(&dir, "k.map", "map h : K -> K\nclass: join\nx -> x\ny -> x\n1 -> 1\n");
    let r = qlat(&["--lattice", s(&chain), "classify", s(&map)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("map h : K -> K (join)"));
    assert!(r.out.contains("in Q⁻: yes"));
    assert_eq!(qlat(&["classify", s(&map)]).code, EXIT_USAGE);
}

#[test]
fn validate_profiles() {
    let r = qlat(&["validate", "M3", "B2"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("witness triple: a b c"));
    assert!(r.out.contains("orthocomplemented: yes"));
    let r = qlat(&["--format", "structured", "validate", "C2"]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v[0]["two_element_chain"], true);
}

#[test]
fn parse_errors_exit_two_with_line_numbers() {
    let dir = TempDir::new().unwrap();
    let missing = write(&dir, "m.lat", "lattice X\ncovers: 0<1\n");
    let r = qlat(&["validate", s(&missing)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("elements:"), "{}", r.err);
    let self_loop = write(&dir, "l.lat", "lattice X\nelements: 0 a 1\ncovers: 0<a a<a a<1\n");
    let r = qlat(&["validate", s(&self_loop)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("partial order"), "{}", r.err);
    let dup = write(&dir, "d.map", "map f : C3 -> C3\nclass: join\na -> a\na -> 1\n1 -> 1\n");
    let r = qlat(&["classify", s(&dup)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("line 4"), "{}", r.err);
    let not_join = write(
        &dir,
        "j.map",
        "map f : M3 -> M3\nclass: join\na -> a\nb -> 0\nc -> 0\n1 -> a\n",
    );
    let r = qlat(&["classify", s(&not_join)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("join"), "{}", r.err);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qlat(&["enumerate", "--hom", "M3", "M3", "--bogus"]).code, EXIT_USAGE);
    assert_eq!(qlat(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(
        qlat(&["enumerate", "--hom", "M3", "M3", "--tier", "qmid"]).code,
        EXIT_USAGE
    );
    assert_eq!(qlat(&["validate", "nowhere"]).code, EXIT_USAGE);
    assert_eq!(qlat(&["--help"]).code, EXIT_OK);
}

#[test]
fn compose_and_join_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "f.map",
        "map f : M3 -> M3\nclass: join\na -> b\nb -> a\nc -> c\n1 -> 1\n",
    );
    let g = write(
        &dir,
        "g.map",
        "map g : M3 -> M3\nclass: join\na -> a\nb -> 0\nc -> a\n1 -> a\n",
    );
    let r = qlat(&["compose", s(&g), s(&f)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(
        r.out,
        "map g_f : M3 -> M3\nclass: join\na -> 0\nb -> a\nc -> a\n1 -> a\n"
    );
    let resolve = |n: &str| (n == "M3").then(m3);
    let parsed = parse_map(&r.out, &resolve).unwrap();
    assert!(matches!(parsed.morphism, LatticeMorphism::Join(_)));

    let r = qlat(&["join", s(&f), s(&g)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(
        r.out,
        "map join : M3 -> M3\nclass: join\na -> 1\nb -> a\nc -> 1\n1 -> 1\n"
    );
    let p = write(&dir, "p.map", SPLIT_MAP);
    assert_eq!(qlat(&["join", s(&f), s(&p)]).code, EXIT_USAGE);
}

#[test]
fn shipped_data_files() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let lat = |n: &str| data.join("lattices").join(n).to_str().unwrap().to_string();
    let map = |n: &str| data.join("maps").join(n).to_str().unwrap().to_string();
    for name in ["C2.lat", "C3.lat", "M3.lat", "N5.lat"] {
        assert_eq!(qlat(&["validate", &lat(name)]).code, EXIT_OK, "{name}");
    }
    let r = qlat(&["classify", &map("split_join.map")]);
    assert!(r.out.contains("state transition: yes; f_pr = id; in Q⁻: no"), "{}", r.out);
    let r = qlat(&["classify", &map("interior_point.map")]);
    assert!(r.out.contains("state transition: no; in Q⁻: no"), "{}", r.out);
    let sub = format!("generated:{}", map("c3_generators.map"));
    let r = qlat(&["enumerate", "--hom", "C3", "C3", "--subcat", &sub, "--enrich"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
}
