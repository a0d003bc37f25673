mod common;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use common::*;
use dga_core::cdgacore::{expand_free, BasisRef, Bidegree};
use dga_core::cellconn::{Connection, ModElem};
use dga_core::dslcli::*;
use dga_core::exactla::q as rat;
use proptest::prelude::*;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn corpus_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(corpus())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "dga"))
        .collect();
    v.sort();
    v
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<String> = std::iter::once("dga")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let code = run_cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn parses_small_sources() {
    let f = parse("group Gm  cdga A { gen x : deg 1, adams 1; d x = 0; }").unwrap();
    let Item::Cdga(c) = &f.items[1] else { panic!() };
    assert_eq!(c.gens.len(), 1);
    let h = parse(&std::fs::read_to_string(corpus().join("heisenberg.dga")).unwrap()).unwrap();
    let Item::Cdga(c) = &h.items[1] else { panic!() };
    assert_eq!(c.gens.len(), 3);
    assert_eq!(c.diffs[0].poly[0].factors, vec!["x", "y"]);
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse("group Gm\ncdga H {\n  gen x : deg 1, adams 1;\n  d z = x*;\n}").unwrap_err();
    assert_eq!((e.line, e.col), (4, 11));
    assert_eq!(e.expected, vec!["a name"]);
    let e = parse("cdga A { gen x : deg 1, weight 1; }").unwrap_err();
    assert_eq!((e.line, e.col), (1, 25));
    assert!(e.expected.contains(&"`adams`".to_string()));
    let e = parse("cdga A { gen x : deg 1, adams 1;").unwrap_err();
    assert_eq!(e.found, "end of input");
    let e = parse("d x = 1/0;").unwrap_err();
    assert_eq!(e.line, 1);
}

#[test]
fn elaborates_the_extension_module() {
    let doc = load(&std::fs::read_to_string(corpus().join("lx.dga")).unwrap()).unwrap();
    let p = doc.cdga("LX").unwrap();
    assert_eq!(p, &gm_pres(&[("x", 1, 1)]));
    let base = Arc::new(expand_free(p, doc.window).unwrap());
    let e = doc.module("E").unwrap().build(base.clone()).unwrap();
    let x = BasisRef::new(Bidegree::new(1, 1), 0);
    let img: ModElem = [((x, 1), rat(1))].into_iter().collect();
    let vecs = vec![
        ("m0".to_string(), 0, gm_label(0)),
        ("m1".to_string(), 0, gm_label(-1)),
    ];
    assert_eq!(
        e,
        Connection::from_highest_weight(base, &vecs, &[img, ModElem::new()])
    );
    let h = load(&std::fs::read_to_string(corpus().join("heisenberg.dga")).unwrap()).unwrap();
    assert_eq!(h.cdga("H").unwrap(), &heisenberg());
    let g = load(&std::fs::read_to_string(corpus().join("gl2_ext.dga")).unwrap()).unwrap();
    assert_eq!(g.cdga("X").unwrap(), &gl2_ext());
}

#[test]
fn elaboration_errors() {
    let src = std::fs::read_to_string(fixture("undeclared.dga")).unwrap();
    assert!(matches!(load(&src), Err(DslError::Name { line: 5, .. })));
    let mixed = "group GL2\ncdga A { gen x : deg 1, adams 1; }";
    assert!(matches!(load(mixed), Err(DslError::DegreeMismatch { .. })));
    let mixed = "group Gm\ncdga A { gen x : deg 1, rep sym(1)det(-1); }";
    assert!(matches!(load(mixed), Err(DslError::DegreeMismatch { .. })));
    assert!(matches!(
        load("cdga A { gen x : deg 1, adams 1; d y = x; }"),
        Err(DslError::Name { .. })
    ));
    assert!(matches!(
        load("cdga A { gen x : deg 1, adams 1; d x = w; }"),
        Err(DslError::Name { .. })
    ));
    assert!(matches!(
        load("cdga A { gen x : deg 0, adams 1; }"),
        Err(DslError::DegreeMismatch { .. })
    ));
    let m =
        "cdga A { gen x : deg 1, adams 1; } module M over A { vec m : deg 0, adams 0; G m = n; }";
    assert!(matches!(load(m), Err(DslError::DegreeMismatch { .. })));
    let m = "cdga A { gen x : deg 1, adams 1; } module M over A { vec m : deg 0, adams 0; G m = x ⊗ n; }";
    assert!(matches!(load(m), Err(DslError::Name { .. })));
}

#[test]
fn corpus_round_trips() {
    for f in corpus_files() {
        let ast = parse(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let printed = print(&ast);
        assert_eq!(parse(&printed).unwrap(), ast, "{}", f.display());
        assert_eq!(print(&parse(&printed).unwrap()), printed);
    }
}

fn arb_term() -> impl Strategy<Value = (i64, i64, Vec<usize>)> {
    (-5i64..=5, 1i64..=3, prop::collection::vec(0usize..3, 0..3))
}

proptest! {
    #[test]
    fn random_polynomials_round_trip(terms in prop::collection::vec(arb_term(), 1..5)) {
        let names = ["x", "y", "z.1"];
        let ast = SourceFile {
            items: vec![Item::Cdga(CdgaDecl {
                name: "A".into(),
                gens: vec![],
                diffs: vec![DiffDecl {
                    name: "x".into(),
                    poly: terms
                        .iter()
                        .map(|(n, d, f)| Term {
                            coeff: dga_core::exactla::Q::new((*n).into(), (*d).into()),
                            factors: f.iter().map(|&i| names[i].to_string()).collect(),
                            pos: Pos::default(),
                        })
                        .collect(),
                    pos: Pos::default(),
                }],
                pos: Pos::default(),
            })],
        };
        let text = print(&ast);
        prop_assert_eq!(parse(&text).unwrap(), ast);
    }
}

#[test]
fn cli_examples() {
    let h = corpus().join("heisenberg.dga");
    let (code, out, _) = run(&["gamma", h.to_str().unwrap(), "--adams-max", "2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["gamma"], serde_json::json!({ "1": 2, "2": 1 }));
    let (code, out, _) = run(&["check", &fixture("corrupt.dga")]);
    assert_eq!(code, 1);
    assert!(!json(&out)["cdgas"]["C"]["violations"]
        .as_array()
        .unwrap()
        .is_empty());
    let lx = corpus().join("lx.dga");
    let (code, out, _) = run(&["cohomology", lx.to_str().unwrap(), "--window", "0:2,0:2"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["cohomology"]["1"]["1"], 1);
}

#[test]
fn cli_module_commands() {
    let lx = corpus().join("lx.dga");
    let lx = lx.to_str().unwrap();
    let (code, out, _) = run(&["module", "check", lx, "--module", "E"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["modules"]["E"]["flat_window"], true);
    let (_, out, _) = run(&["module", "heart", lx]);
    assert_eq!(json(&out)["modules"]["E"]["heart"], true);
    let (_, out, _) = run(&["module", "truncate", lx, "--module", "E"]);
    assert_eq!(json(&out)["modules"]["E"]["dim"], 2);
    let (_, out, _) = run(&["module", "qiso", lx, "--map", "Id"]);
    assert_eq!(json(&out)["quasi_iso"], true);
    let (_, out, _) = run(&["module", "qiso", lx, "--map", "I"]);
    assert_eq!(json(&out)["quasi_iso"], false);
    let (code, out, _) = run(&[
        "module",
        "ext",
        lx,
        "--v",
        "w(0)",
        "--w",
        "w(1)",
        "--k",
        "1",
        "--adams-max",
        "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["dim"], 1);
    let (code, out, _) = run(&["minimal", lx, "--n", "1", "--adams-max", "3"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["generators"][0]["name"], "x");
    let (code, out, _) = run(&["bar", lx, "--adams-max", "3"]);
    assert_eq!(code, 0);
    assert_eq!(
        json(&out)["chi"],
        serde_json::json!({ "0": 1, "1": 1, "2": 1, "3": 1 })
    );
}

#[test]
fn cli_usage_and_parse_errors_exit_2() {
    for f in [
        "dangling.dga",
        "unclosed.dga",
        "badtoken.dga",
        "undeclared.dga",
    ] {
        let (code, out, err) = run(&["check", &fixture(f)]);
        assert_eq!(code, 2, "{f}");
        assert!(out.is_empty());
        assert!(err.contains(':'), "{err}");
    }
    let (_, _, err) = run(&["check", &fixture("dangling.dga")]);
    assert!(err.contains("6:11"), "{err}");
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["gamma"]).0, 2);
    assert_eq!(run(&["check", "/nonexistent.dga"]).0, 2);
    let lx = corpus().join("lx.dga");
    assert_eq!(
        run(&["cohomology", lx.to_str().unwrap(), "--window", "0:2"]).0,
        2
    );
    assert_eq!(run(&["--help"]).0, 0);
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares with the committed file; `UPDATE_GOLDEN=1` rewrites it.
fn against_golden(name: &str, text: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, text).unwrap();
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(want == text, "{name} differs from its golden file");
}

#[test]
fn report_matches_golden_files() {
    let (code, all, _) = run(&["report", "--all", corpus().to_str().unwrap()]);
    assert_eq!(code, 0);
    against_golden("all.json", &all);
    assert_eq!(run(&["report", "--all", corpus().to_str().unwrap()]).1, all);
    for f in corpus_files() {
        let (code, out, _) = run(&["report", f.to_str().unwrap()]);
        assert_eq!(code, 0);
        against_golden(
            &format!("{}.json", f.file_stem().unwrap().to_string_lossy()),
            &out,
        );
    }
}
